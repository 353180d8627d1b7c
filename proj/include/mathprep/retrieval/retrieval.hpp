#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mathprep/memory/case_bank.hpp"
#include "mathprep/retrieval/embedding.hpp"
#include "mathprep/retrieval/q_estimator.hpp"

namespace mathprep::retrieval {

enum class RetrievalMode { None, ReadNP, ReadP };

std::string_view to_string(RetrievalMode mode) noexcept;
/// Accepts "none", "readnp", "readp". Throws Error(Config) otherwise.
RetrievalMode parse_retrieval_mode(std::string_view text);

struct RetrievalConfig {
  RetrievalMode mode = RetrievalMode::ReadNP;
  std::size_t k = 4;
  double alpha = 1.0;
  std::size_t k_pre = 32;  // ReadP candidate pool: nearest cases by embedding

  void check() const;
  bool operator==(const RetrievalConfig&) const = default;
};

/// A bank position with the score it was ranked by.
struct RetrievedCase {
  std::size_t index = 0;
  double score = 0.0;
  bool cold_start = false;
  bool operator==(const RetrievedCase&) const = default;
};

/// Embeddings of bank cases, kept aligned with bank positions.
class CaseEmbeddings {
 public:
  explicit CaseEmbeddings(const Embedder& embedder) : embedder_(&embedder) {}
  /// Embeds state texts of cases appended since the last call.
  void sync(const memory::CaseBank& bank);
  std::span<const Embedding> embeddings() const noexcept { return embeddings_; }
  const Embedder& embedder() const noexcept { return *embedder_; }

 private:
  const Embedder* embedder_;
  std::vector<Embedding> embeddings_;
};

/// Top-k by cosine similarity to the query, descending; ties go to the
/// earlier case (lower created_seq). Returns fewer than k for small banks.
/// Throws Error(InvalidArgument) when k == 0.
std::vector<RetrievedCase> read_np(const Embedding& query, std::span<const Embedding> case_states,
                                   std::size_t k);
std::vector<RetrievedCase> read_np(const Embedding& query, const memory::CaseBank& bank,
                                   const Embedder& embedder, std::size_t k);

/// Top-k by Q_EC score (cold-start prior for empty datasets), descending;
/// ties go to the earlier case. The optional pool restricts the scan to the
/// given bank positions.
std::vector<RetrievedCase> read_p(const Embedding& query, const memory::CaseBank& bank,
                                  const QEstimator& estimator, std::size_t k);
std::vector<RetrievedCase> read_p(const Embedding& query, const memory::CaseBank& bank,
                                  const QEstimator& estimator, std::size_t k,
                                  std::span<const std::size_t> pool);

}  // namespace mathprep::retrieval
