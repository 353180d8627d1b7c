#include "mathprep/retrieval/retrieval.hpp"

#include <algorithm>
#include <numeric>

#include "mathprep/error.hpp"

namespace mathprep::retrieval {

std::string_view to_string(RetrievalMode mode) noexcept {
  switch (mode) {
    case RetrievalMode::None: return "none";
    case RetrievalMode::ReadNP: return "readnp";
    case RetrievalMode::ReadP: return "readp";
  }
  return "?";
}

RetrievalMode parse_retrieval_mode(std::string_view text) {
  if (text == "none") return RetrievalMode::None;
  if (text == "readnp") return RetrievalMode::ReadNP;
  if (text == "readp") return RetrievalMode::ReadP;
  fail(ErrorCode::Config, "unknown retrieval mode '" + std::string(text) + "'");
}

void RetrievalConfig::check() const {
  if (k < 1) fail(ErrorCode::Config, "K must be >= 1");
  if (!(alpha > 0.0)) fail(ErrorCode::Config, "alpha must be positive");
  if (k_pre < k) fail(ErrorCode::Config, "candidate pool must hold at least K cases");
}

void CaseEmbeddings::sync(const memory::CaseBank& bank) {
  if (bank.size() < embeddings_.size()) {
    fail(ErrorCode::Contract, "case bank shrank below its embedding cache");
  }
  for (std::size_t i = embeddings_.size(); i < bank.size(); ++i) {
    embeddings_.push_back(embedder_->embed(bank.at(i).state_text));
  }
}

namespace {

// Keeps the k best (score desc, index asc) in order.
std::vector<RetrievedCase> top_k(std::vector<RetrievedCase> scored, std::size_t k) {
  auto better = [](const RetrievedCase& a, const RetrievedCase& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.index < b.index;
  };
  const std::size_t n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                    better);
  scored.resize(n);
  return scored;
}

}  // namespace

std::vector<RetrievedCase> read_np(const Embedding& query, std::span<const Embedding> case_states,
                                   std::size_t k) {
  if (k == 0) fail(ErrorCode::InvalidArgument, "K must be >= 1");
  std::vector<RetrievedCase> scored;
  scored.reserve(case_states.size());
  for (std::size_t i = 0; i < case_states.size(); ++i) {
    scored.push_back({i, cosine(query, case_states[i]), false});
  }
  return top_k(std::move(scored), k);
}

std::vector<RetrievedCase> read_np(const Embedding& query, const memory::CaseBank& bank,
                                   const Embedder& embedder, std::size_t k) {
  CaseEmbeddings cache(embedder);
  cache.sync(bank);
  return read_np(query, cache.embeddings(), k);
}

std::vector<RetrievedCase> read_p(const Embedding& query, const memory::CaseBank& bank,
                                  const QEstimator& estimator, std::size_t k,
                                  std::span<const std::size_t> pool) {
  if (k == 0) fail(ErrorCode::InvalidArgument, "K must be >= 1");
  std::vector<RetrievedCase> scored;
  scored.reserve(pool.size());
  for (std::size_t index : pool) {
    auto q = q_ec(query, bank.at(index).case_id, estimator);
    scored.push_back({index, q.value, q.cold_start});
  }
  return top_k(std::move(scored), k);
}

std::vector<RetrievedCase> read_p(const Embedding& query, const memory::CaseBank& bank,
                                  const QEstimator& estimator, std::size_t k) {
  std::vector<std::size_t> all(bank.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return read_p(query, bank, estimator, k, all);
}

}  // namespace mathprep::retrieval
