#include "mathprep/retrieval/embedding.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include "mathprep/error.hpp"

namespace mathprep::retrieval {

Embedding::Embedding(std::vector<double> values) : values_(std::move(values)) {
  double sq = 0.0;
  for (double v : values_) {
    if (!std::isfinite(v)) fail(ErrorCode::Domain, "embedding entries must be finite");
    sq += v * v;
  }
  norm_ = std::sqrt(sq);
}

Embedding Embedding::zeros(std::size_t dimension) {
  return Embedding(std::vector<double>(dimension, 0.0));
}

double dot(const Embedding& a, const Embedding& b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::Shape, "embedding dimensions differ: " + std::to_string(a.size()) + " vs " +
                               std::to_string(b.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double cosine(const Embedding& a, const Embedding& b) {
  double d = dot(a, b);
  if (a.norm() == 0.0 || b.norm() == 0.0) return 0.0;
  return d / (a.norm() * b.norm());
}

namespace {

// Splits UTF-8 into code-point byte ranges; stray bytes stand alone.
std::vector<std::string_view> code_points(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    auto lead = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    if (lead >= 0xF0) {
      len = 4;
    } else if (lead >= 0xE0) {
      len = 3;
    } else if (lead >= 0xC0) {
      len = 2;
    }
    if (i + len > text.size()) len = 1;
    for (std::size_t j = 1; j < len; ++j) {
      if ((static_cast<unsigned char>(text[i + j]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    out.push_back(text.substr(i, len));
    i += len;
  }
  return out;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) fail(ErrorCode::Config, "embedding dimension must be positive");
}

Embedding HashingEmbedder::embed(std::string_view text) const {
  std::vector<double> values(dimension_, 0.0);
  if (text.empty()) return Embedding(std::move(values));
  auto cps = code_points(text);
  auto add = [&](std::size_t from, std::size_t count) {
    std::string gram;
    for (std::size_t i = from; i < from + count; ++i) gram += cps[i];
    values[fnv1a(gram) % dimension_] += 1.0;
  };
  if (cps.size() < 3) {
    add(0, cps.size());
  } else {
    for (std::size_t i = 0; i + 3 <= cps.size(); ++i) add(i, 3);
  }
  double sq = 0.0;
  for (double v : values) sq += v * v;
  const double norm = std::sqrt(sq);
  for (double& v : values) v /= norm;
  return Embedding(std::move(values));
}

Embedding embed(std::string_view text, std::size_t dimension) {
  return HashingEmbedder(dimension).embed(text);
}

}  // namespace mathprep::retrieval
