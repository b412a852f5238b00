#pragma once

// Projection onto the diagonal span X* = {alpha e} and the distance d(x, X*)
// under the max, Euclidean, 1- and weighted Euclidean norms.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "contractlab/error.hpp"
#include "contractlab/matrix.hpp"

namespace contractlab {

class NormKind {
 public:
  enum class Tag { Linf, L2, L1, WeightedL2 };

  static NormKind linf() { return NormKind(Tag::Linf, {}); }
  static NormKind l2() { return NormKind(Tag::L2, {}); }
  static NormKind l1() { return NormKind(Tag::L1, {}); }

  /// ||x||_w = sqrt(sum_i w_i x_i^2). Weights are rescaled so that max_i w_i = 1.
  static NormKind weighted_l2(Vector w) {
    if (w.empty()) throw InvalidInput("weighted norm needs a nonempty weight vector");
    for (double wi : w)
      if (!std::isfinite(wi) || !(wi > 0.0))
        throw InvalidInput("weights must be finite and strictly positive");
    const double top = *std::max_element(w.begin(), w.end());
    for (double& wi : w) wi /= top;
    return NormKind(Tag::WeightedL2, std::move(w));
  }

  /// Parses "linf", "l2", "l1" or "wl2" (the latter needs weights).
  static NormKind parse(std::string_view name, const Vector& weights = {}) {
    if (name == "linf") return linf();
    if (name == "l2") return l2();
    if (name == "l1") return l1();
    if (name == "wl2") return weighted_l2(weights);
    throw InvalidInput("unknown norm '" + std::string(name) + "' (expected linf, l2, l1, wl2)");
  }

  Tag tag() const noexcept { return tag_; }
  const Vector& weights() const noexcept { return weights_; }

  std::string name() const {
    switch (tag_) {
      case Tag::Linf: return "linf";
      case Tag::L2: return "l2";
      case Tag::L1: return "l1";
      case Tag::WeightedL2: return "wl2";
    }
    return {};
  }

  /// |x_i| <= |y_i| for all i implies ||x|| <= ||y||. All four kinds qualify.
  bool is_monotone() const noexcept { return true; }

  void check_dimension(std::size_t n) const {
    if (tag_ == Tag::WeightedL2 && weights_.size() != n)
      throw InvalidInput("weight vector has length " + std::to_string(weights_.size()) +
                         ", expected " + std::to_string(n));
  }

  friend bool operator==(const NormKind&, const NormKind&) = default;

 private:
  NormKind(Tag tag, Vector w) : tag_(tag), weights_(std::move(w)) {}

  Tag tag_;
  Vector weights_;
};

inline double norm(std::span<const double> x, const NormKind& kind) {
  kind.check_dimension(x.size());
  switch (kind.tag()) {
    case NormKind::Tag::Linf: {
      double m = 0.0;
      for (double v : x) m = std::max(m, std::abs(v));
      return m;
    }
    case NormKind::Tag::L2:
      return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
    case NormKind::Tag::L1: {
      double s = 0.0;
      for (double v : x) s += std::abs(v);
      return s;
    }
    case NormKind::Tag::WeightedL2: {
      const auto& w = kind.weights();
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * x[i] * x[i];
      return std::sqrt(s);
    }
  }
  return 0.0;
}

/// P(x) = alpha * e and d(x, X*) = ||x - P(x)||.
struct Projection {
  double alpha = 0.0;
  double distance = 0.0;
};

namespace detail {

inline void check_vector(std::span<const double> x) {
  if (x.empty()) throw InvalidInput("vector must be nonempty");
  for (double v : x)
    if (!std::isfinite(v)) throw InvalidInput("vector entries must be finite");
}

inline double distance_from(std::span<const double> x, double alpha, const NormKind& kind) {
  Vector r(x.begin(), x.end());
  for (double& v : r) v -= alpha;
  return norm(r, kind);
}

}  // namespace detail

inline Projection project(std::span<const double> x, const NormKind& kind) {
  detail::check_vector(x);
  kind.check_dimension(x.size());
  const std::size_t n = x.size();
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) return {x[0], 0.0};
  switch (kind.tag()) {
    case NormKind::Tag::Linf: {
      const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
      return {0.5 * (*hi + *lo), 0.5 * (*hi - *lo)};
    }
    case NormKind::Tag::L2: {
      const double alpha = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
      return {alpha, detail::distance_from(x, alpha, kind)};
    }
    case NormKind::Tag::L1: {
      Vector sorted(x.begin(), x.end());
      std::stable_sort(sorted.begin(), sorted.end());
      // 1-based: odd n -> x^_{ceil(n/2)}, even n -> lower median x^_{n/2}.
      const std::size_t median_index = (n + 1) / 2 - 1;
      const std::size_t upper_start = (n + 1) / 2;  // ceil(n/2), 0-based start of the upper part
      const std::size_t lower_count = n / 2;        // floor(n/2)
      double upper = 0.0;
      double lower = 0.0;
      for (std::size_t i = upper_start; i < n; ++i) upper += sorted[i];
      for (std::size_t i = 0; i < lower_count; ++i) lower += sorted[i];
      return {sorted[median_index], upper - lower};
    }
    case NormKind::Tag::WeightedL2: {
      const auto& w = kind.weights();
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      const double alpha = std::inner_product(w.begin(), w.end(), x.begin(), 0.0) / total;
      return {alpha, detail::distance_from(x, alpha, kind)};
    }
  }
  return {};
}

inline double distance_to_diagonal(std::span<const double> x, const NormKind& kind) {
  return project(x, kind).distance;
}

}  // namespace contractlab
