#pragma once

// Brute-force reference computations. Each one is written from the defining
// formula and shares no code with the library under test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

inline Vec random_vector(std::mt19937_64& gen, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(n);
  for (auto& x : v) x = u(gen);
  return v;
}

// exp(q_i / alpha) / sum_j exp(q_j / alpha), unshifted, in long double.
inline Vec softmax(const Vec& q, double alpha) {
  std::vector<long double> e(q.size());
  long double total = 0.0L;
  for (std::size_t i = 0; i < q.size(); ++i) {
    e[i] = std::exp(static_cast<long double>(q[i]) / alpha);
    total += e[i];
  }
  Vec p(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) p[i] = static_cast<double>(e[i] / total);
  return p;
}

inline double entropy(const Vec& p) {
  long double h = 0.0L;
  for (double x : p) {
    if (x > 0.0) h -= static_cast<long double>(x) * std::log(static_cast<long double>(x));
  }
  return static_cast<double>(h);
}

// exp(-sum_i (d_i (a_i - b_i))^2 / (2 l^2))
inline long double kernel(const Vec& a, const Vec& b, const Vec& diag, double length) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long double d = static_cast<long double>(diag[i]) * (a[i] - b[i]);
    s += d * d;
  }
  return std::exp(-s / (2.0L * length * length));
}

struct Point {
  Vec state;
  double q = 0.0;
};

// sum_j k(s, s_j) q_j / sum_j k(s, s_j)
inline double kernel_mean(const Vec& s, const std::vector<Point>& data, const Vec& diag,
                          double length) {
  long double num = 0.0L;
  long double den = 0.0L;
  for (const auto& p : data) {
    const long double w = kernel(s, p.state, diag, length);
    num += w * p.q;
    den += w;
  }
  return static_cast<double>(num / den);
}

// -(r log q + (1 - r) log(1 - q)) with q clamped to [eps, 1 - eps].
inline double bce(double r, double q, double eps = 1e-7) {
  q = std::clamp(q, eps, 1.0 - eps);
  return -(r * std::log(q) + (1.0 - r) * std::log(1.0 - q));
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double relative_error(double a, double b, double floor = 1e-7) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// Soft state values of the advance/stay chain, solved state by state from
// the terminal end: V(p) is the fixed point of
//   V = alpha log(exp(adv / alpha) + exp(gamma V / alpha)).
inline Vec chain_soft_values(int length, double gamma, double alpha) {
  Vec v(static_cast<std::size_t>(length), 0.0);
  for (int p = length - 1; p >= 0; --p) {
    const double adv = p + 1 == length ? 1.0 : gamma * v[static_cast<std::size_t>(p + 1)];
    double x = adv;
    for (int it = 0; it < 100000; ++it) {
      const double next = alpha * std::log(std::exp(adv / alpha) + std::exp(gamma * x / alpha));
      if (std::abs(next - x) < 1e-15) {
        x = next;
        break;
      }
      x = next;
    }
    v[static_cast<std::size_t>(p)] = x;
  }
  return v;
}

// pi(a) = sum_c mu_c p(a | c) over a dense case-by-action table.
inline Vec mixture(const Vec& mu, const std::vector<Vec>& table) {
  Vec pi(table.front().size(), 0.0);
  for (std::size_t c = 0; c < mu.size(); ++c) {
    for (std::size_t a = 0; a < pi.size(); ++a) pi[a] += mu[c] * table[c][a];
  }
  return pi;
}

inline double cosine(const Vec& a, const Vec& b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Full stable sort by score, descending; equal scores keep bank order.
inline std::vector<std::size_t> top_k(const std::vector<double>& scores, std::size_t k) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(std::min(k, order.size()));
  return order;
}

// Nearest-rank percentile.
inline double percentile(Vec sample, double p) {
  std::sort(sample.begin(), sample.end());
  const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(sample.size())));
  return sample[std::max<std::size_t>(rank, 1) - 1];
}

// Skills with two or more wrong attempts.
inline int repeated_errors(const std::vector<std::pair<std::string, bool>>& attempts) {
  std::map<std::string, int> wrong;
  for (const auto& [skill, correct] : attempts) {
    if (!correct) ++wrong[skill];
  }
  int n = 0;
  for (const auto& [skill, count] : wrong) n += count >= 2 ? 1 : 0;
  return n;
}

}  // namespace oracle
