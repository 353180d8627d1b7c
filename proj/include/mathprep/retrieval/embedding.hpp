#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace mathprep::retrieval {

inline constexpr std::size_t kDefaultDimension = 256;

/// Fixed-length vector with a cached Euclidean norm.
class Embedding {
 public:
  Embedding() = default;
  /// Throws Error(Domain) on a non-finite entry.
  explicit Embedding(std::vector<double> values);
  static Embedding zeros(std::size_t dimension);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double norm() const noexcept { return norm_; }

  bool operator==(const Embedding& other) const { return values_ == other.values_; }

 private:
  std::vector<double> values_;
  double norm_ = 0.0;
};

/// Throws Error(Shape) on a dimension mismatch.
double dot(const Embedding& a, const Embedding& b);
/// Cosine similarity; 0 when either vector is zero.
double cosine(const Embedding& a, const Embedding& b);

/// Text-to-vector contract. Implementations must be deterministic.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::size_t dimension() const = 0;
  virtual Embedding embed(std::string_view text) const = 0;
};

/// Hashes character trigrams (UTF-8 code points) into `dimension` buckets and
/// L2-normalizes. Texts shorter than three characters hash as one gram; the
/// empty text maps to the zero vector.
class HashingEmbedder final : public Embedder {
 public:
  explicit HashingEmbedder(std::size_t dimension = kDefaultDimension);
  std::size_t dimension() const override { return dimension_; }
  Embedding embed(std::string_view text) const override;

 private:
  std::size_t dimension_;
};

Embedding embed(std::string_view text, std::size_t dimension = kDefaultDimension);

}  // namespace mathprep::retrieval
