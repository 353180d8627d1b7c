#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mathprep/memory/case_bank.hpp"
#include "mathprep/retrieval/embedding.hpp"
#include "mathprep/retrieval/kernel.hpp"

namespace mathprep::retrieval {

/// One entry of a per-case dataset D_c: a state embedding and its stored value.
struct Record {
  Embedding state;
  double q = 0.0;
  bool operator==(const Record&) const = default;
};

/// Form of the soft state value used in the TD backup.
///   MaxEntropy: alpha * log sum exp(Q / alpha)
///   Literal:    alpha * log sum exp(Q)
enum class SoftBackup { MaxEntropy, Literal };

struct EstimatorConfig {
  double alpha = 1.0;
  double gamma = 0.9;
  double step_size = 0.05;
  double q0 = 0.0;  // cold-start prior for cases with an empty dataset
  std::size_t sync_every = 50;  // 0 disables automatic target syncs
  SoftBackup backup = SoftBackup::MaxEntropy;
  double param_floor = 1e-6;  // kernel parameters are projected onto [floor, inf)

  /// Throws Error(Config).
  void check() const;
  bool operator==(const EstimatorConfig&) const = default;
};

struct QValue {
  double value = 0.0;
  bool cold_start = false;
};

/// Kernel episodic-control estimator: learnable kernel, frozen target copy
/// and per-case datasets.
class QEstimator {
 public:
  explicit QEstimator(std::size_t dimension = kDefaultDimension, EstimatorConfig config = {});
  QEstimator(KernelParams params, EstimatorConfig config);

  const KernelParams& params() const noexcept { return params_; }
  const TargetParams& target() const noexcept { return target_; }
  const EstimatorConfig& config() const noexcept { return config_; }
  EstimatorConfig& mutable_config() noexcept { return config_; }
  std::size_t dimension() const noexcept { return params_.dimension(); }

  /// Replaces the online parameters; the target is left untouched.
  void set_params(KernelParams params);

  /// Throws Error(Shape) on dimension mismatch, Error(Domain) on a non-finite q.
  void add_record(const std::string& case_id, Record record);
  const std::vector<Record>& dataset(const std::string& case_id) const;
  const std::map<std::string, std::vector<Record>>& datasets() const noexcept { return datasets_; }
  std::size_t record_count() const;

  /// Throws Error(Reference) when a dataset key names a case missing from the bank.
  void check_references(const memory::CaseBank& bank) const;

  /// target := params.
  void sync_target();
  std::uint64_t update_count() const noexcept { return updates_; }
  std::uint64_t sync_count() const noexcept { return syncs_; }

  /// Gradient-descent step `params -= step * gradient`, projected onto the
  /// parameter floor. Counts as one update and syncs the target every
  /// sync_every updates.
  void apply_step(std::span<const double> d_diag_scale, double d_length_scale, double step);

  void restore_counters(std::uint64_t updates, std::uint64_t syncs) {
    updates_ = updates;
    syncs_ = syncs;
  }
  void restore_target(TargetParams target);

 private:
  KernelParams params_;
  TargetParams target_;
  EstimatorConfig config_;
  std::map<std::string, std::vector<Record>> datasets_;
  std::uint64_t updates_ = 0;
  std::uint64_t syncs_ = 0;
};

/// Kernel-weighted mean of the stored values of D_c. An empty dataset yields
/// the configured prior with cold_start set. The result always lies within
/// [min q, max q] of D_c.
QValue q_ec(const Embedding& state, const std::string& case_id, const QEstimator& estimator);
QValue q_ec(const Embedding& state, const std::string& case_id, const QEstimator& estimator,
            const KernelParams& params);
/// Same estimate computed against an explicit dataset.
QValue q_ec(const Embedding& state, std::span<const Record> records, const KernelParams& params,
            double prior);

// Versioned JSON checkpoint: params, target, hyperparameters, counters and
// every dataset record.
inline constexpr int kCheckpointVersion = 1;
void save_checkpoint(const QEstimator& estimator, std::ostream& out);
/// Throws Error(Version) on a version mismatch, Error(Format) on bad content.
QEstimator load_checkpoint(std::istream& in);

}  // namespace mathprep::retrieval
