#include "mathprep/retrieval/q_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "mathprep/error.hpp"

namespace mathprep::retrieval {

void EstimatorConfig::check() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) fail(ErrorCode::Config, "alpha must be positive");
  if (!(gamma >= 0.0 && gamma < 1.0)) fail(ErrorCode::Config, "gamma must lie in [0, 1)");
  if (!(step_size >= 0.0) || !std::isfinite(step_size)) {
    fail(ErrorCode::Config, "step size must be non-negative");
  }
  if (!std::isfinite(q0)) fail(ErrorCode::Config, "cold-start prior must be finite");
  if (!(param_floor > 0.0)) fail(ErrorCode::Config, "parameter floor must be positive");
}

QEstimator::QEstimator(std::size_t dimension, EstimatorConfig config)
    : QEstimator(KernelParams::isotropic(dimension), config) {}

QEstimator::QEstimator(KernelParams params, EstimatorConfig config)
    : params_(std::move(params)), target_(params_), config_(config) {
  params_.check();
  config_.check();
}

void QEstimator::set_params(KernelParams params) {
  params.check();
  if (params.dimension() != params_.dimension()) {
    fail(ErrorCode::Shape, "kernel parameter dimension cannot change");
  }
  params_ = std::move(params);
}

void QEstimator::restore_target(TargetParams target) {
  target.check();
  if (target.dimension() != params_.dimension()) fail(ErrorCode::Shape, "target dimension mismatch");
  target_ = std::move(target);
}

void QEstimator::add_record(const std::string& case_id, Record record) {
  if (record.state.size() != dimension()) {
    fail(ErrorCode::Shape, "record dimension " + std::to_string(record.state.size()) +
                               " does not match estimator dimension " +
                               std::to_string(dimension()));
  }
  if (!std::isfinite(record.q)) fail(ErrorCode::Domain, "record value must be finite");
  datasets_[case_id].push_back(std::move(record));
}

const std::vector<Record>& QEstimator::dataset(const std::string& case_id) const {
  static const std::vector<Record> kEmpty;
  auto it = datasets_.find(case_id);
  return it == datasets_.end() ? kEmpty : it->second;
}

std::size_t QEstimator::record_count() const {
  std::size_t n = 0;
  for (const auto& [id, records] : datasets_) n += records.size();
  return n;
}

void QEstimator::check_references(const memory::CaseBank& bank) const {
  for (const auto& [id, records] : datasets_) {
    if (!bank.contains(id)) fail(ErrorCode::Reference, "dataset for unknown case '" + id + "'");
  }
}

void QEstimator::sync_target() {
  target_ = params_;
  ++syncs_;
}

void QEstimator::apply_step(std::span<const double> d_diag_scale, double d_length_scale,
                            double step) {
  if (d_diag_scale.size() != params_.dimension()) fail(ErrorCode::Shape, "gradient dimension mismatch");
  if (step < 0.0) fail(ErrorCode::Config, "step size must be non-negative");
  if (step == 0.0) return;
  for (std::size_t i = 0; i < d_diag_scale.size(); ++i) {
    params_.diag_scale[i] =
        std::max(config_.param_floor, params_.diag_scale[i] - step * d_diag_scale[i]);
  }
  params_.length_scale = std::max(config_.param_floor, params_.length_scale - step * d_length_scale);
  ++updates_;
  if (config_.sync_every > 0 && updates_ % config_.sync_every == 0) sync_target();
}

QValue q_ec(const Embedding& state, std::span<const Record> records, const KernelParams& params,
            double prior) {
  if (records.empty()) return QValue{prior, true};
  std::vector<double> logk(records.size());
  double max_logk = -std::numeric_limits<double>::infinity();
  double lo = records.front().q;
  double hi = lo;
  for (std::size_t j = 0; j < records.size(); ++j) {
    logk[j] = kernel_log_value(params, state, records[j].state);
    max_logk = std::max(max_logk, logk[j]);
    lo = std::min(lo, records[j].q);
    hi = std::max(hi, records[j].q);
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < records.size(); ++j) {
    double w = std::exp(logk[j] - max_logk);
    num += w * records[j].q;
    den += w;
  }
  return QValue{std::clamp(num / den, lo, hi), false};
}

QValue q_ec(const Embedding& state, const std::string& case_id, const QEstimator& estimator,
            const KernelParams& params) {
  return q_ec(state, estimator.dataset(case_id), params, estimator.config().q0);
}

QValue q_ec(const Embedding& state, const std::string& case_id, const QEstimator& estimator) {
  return q_ec(state, case_id, estimator, estimator.params());
}

namespace {

using nlohmann::ordered_json;

ordered_json params_json(const KernelParams& p) {
  ordered_json out;
  out["diag_scale"] = p.diag_scale;
  out["length_scale"] = p.length_scale;
  return out;
}

KernelParams params_from(const ordered_json& json) {
  KernelParams p;
  p.diag_scale = json.at("diag_scale").get<std::vector<double>>();
  p.length_scale = json.at("length_scale").get<double>();
  p.check();
  return p;
}

}  // namespace

void save_checkpoint(const QEstimator& estimator, std::ostream& out) {
  const auto& cfg = estimator.config();
  ordered_json root;
  root["format"] = "mathprep.q_estimator";
  root["version"] = kCheckpointVersion;
  root["params"] = params_json(estimator.params());
  root["target"] = params_json(estimator.target());
  root["hyperparameters"] = {
      {"alpha", cfg.alpha},
      {"gamma", cfg.gamma},
      {"step_size", cfg.step_size},
      {"q0", cfg.q0},
      {"sync_every", cfg.sync_every},
      {"backup", cfg.backup == SoftBackup::MaxEntropy ? "max_entropy" : "literal"},
      {"param_floor", cfg.param_floor},
  };
  root["updates"] = estimator.update_count();
  root["syncs"] = estimator.sync_count();
  ordered_json datasets = ordered_json::object();
  for (const auto& [id, records] : estimator.datasets()) {
    ordered_json list = ordered_json::array();
    for (const auto& r : records) {
      ordered_json rec;
      rec["q"] = r.q;
      rec["state"] = std::vector<double>(r.state.values().begin(), r.state.values().end());
      list.push_back(std::move(rec));
    }
    datasets[id] = std::move(list);
  }
  root["datasets"] = std::move(datasets);
  out << root.dump() << '\n';
  if (!out) fail(ErrorCode::Io, "failed writing estimator checkpoint");
}

QEstimator load_checkpoint(std::istream& in) {
  ordered_json root;
  try {
    root = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::Format, std::string("invalid checkpoint JSON: ") + e.what());
  }
  try {
    if (root.at("format").get<std::string>() != "mathprep.q_estimator") {
      fail(ErrorCode::Format, "not an estimator checkpoint");
    }
    int version = root.at("version").get<int>();
    if (version != kCheckpointVersion) {
      fail(ErrorCode::Version, "checkpoint version " + std::to_string(version) +
                                   " is not supported (expected " +
                                   std::to_string(kCheckpointVersion) + ")");
    }
    const auto& h = root.at("hyperparameters");
    EstimatorConfig cfg;
    cfg.alpha = h.at("alpha").get<double>();
    cfg.gamma = h.at("gamma").get<double>();
    cfg.step_size = h.at("step_size").get<double>();
    cfg.q0 = h.at("q0").get<double>();
    cfg.sync_every = h.at("sync_every").get<std::size_t>();
    auto backup = h.at("backup").get<std::string>();
    if (backup == "max_entropy") {
      cfg.backup = SoftBackup::MaxEntropy;
    } else if (backup == "literal") {
      cfg.backup = SoftBackup::Literal;
    } else {
      fail(ErrorCode::Format, "unknown backup mode '" + backup + "'");
    }
    cfg.param_floor = h.at("param_floor").get<double>();
    QEstimator estimator(params_from(root.at("params")), cfg);
    estimator.restore_target(params_from(root.at("target")));
    estimator.restore_counters(root.at("updates").get<std::uint64_t>(),
                               root.at("syncs").get<std::uint64_t>());
    for (const auto& [id, list] : root.at("datasets").items()) {
      for (const auto& rec : list) {
        estimator.add_record(id, Record{Embedding(rec.at("state").get<std::vector<double>>()),
                                        rec.at("q").get<double>()});
      }
    }
    return estimator;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Format, std::string("malformed checkpoint: ") + e.what());
  }
}

}  // namespace mathprep::retrieval
