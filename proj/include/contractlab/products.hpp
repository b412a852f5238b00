#pragma once

// Finite and generated matrix sequences, their products, and finite-horizon
// diagnostics for convergence of x(k+1) = A_k x(k) and weak ergodicity.
//
// Order convention: index k is application time, so the composite operator
// over [a, b] is A_b * A_{b-1} * ... * A_a.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "contractlab/contractivity.hpp"
#include "contractlab/error.hpp"
#include "contractlab/graphs.hpp"
#include "contractlab/matrix.hpp"
#include "contractlab/projections.hpp"
#include "contractlab/random.hpp"

namespace contractlab {

/// Parameters of the seeded "random_stochastic_spanning_tree" generator.
struct GeneratorSpec {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double min_entry = 0.05;
  double extra_edge_probability = 0.2;
  /// Finite length of the sequence; unbounded when empty.
  std::optional<std::size_t> length;
  /// Item k is item (k mod period) when set.
  std::optional<std::size_t> period;
};

class MatrixSequence {
 public:
  static MatrixSequence finite(std::vector<Matrix> items) {
    if (items.empty()) throw InvalidInput("matrix sequence must be nonempty");
    const std::size_t n = items.front().n();
    for (std::size_t k = 0; k < items.size(); ++k)
      if (items[k].n() != n)
        throw InvalidInput("dimension mismatch: item " + std::to_string(k) + " is " +
                           std::to_string(items[k].n()) + "x" + std::to_string(items[k].n()) +
                           ", expected " + std::to_string(n));
    return MatrixSequence(std::move(items));
  }

  static MatrixSequence repeated(const Matrix& a, std::size_t count) {
    if (count == 0) throw InvalidInput("repeat count must be >= 1");
    return finite(std::vector<Matrix>(count, a));
  }

  static MatrixSequence generated(GeneratorSpec spec) {
    if (spec.n == 0) throw InvalidInput("generator dimension must be >= 1");
    if (!(spec.min_entry > 0.0) || static_cast<double>(spec.n) * spec.min_entry > 1.0)
      throw InvalidInput("generator min_entry must satisfy 0 < min_entry <= 1/n");
    if (spec.period && *spec.period == 0) throw InvalidInput("generator period must be >= 1");
    if (spec.length && *spec.length == 0) throw InvalidInput("generator length must be >= 1");
    return MatrixSequence(spec);
  }

  std::size_t n() const {
    if (const auto* items = std::get_if<std::vector<Matrix>>(&source_)) return items->front().n();
    return std::get<GeneratorSpec>(source_).n;
  }

  std::optional<std::size_t> length() const {
    if (const auto* items = std::get_if<std::vector<Matrix>>(&source_)) return items->size();
    return std::get<GeneratorSpec>(source_).length;
  }

  bool is_generated() const { return std::holds_alternative<GeneratorSpec>(source_); }

  /// Number of distinct items (list size, or the generator period if any).
  std::optional<std::size_t> period() const {
    if (const auto* items = std::get_if<std::vector<Matrix>>(&source_)) return items->size();
    return std::get<GeneratorSpec>(source_).period;
  }

  Matrix at(std::size_t k) const {
    if (const auto len = length(); len && k >= *len)
      throw InvalidInput("sequence index " + std::to_string(k) + " out of range (length " +
                         std::to_string(*len) + ")");
    if (const auto* items = std::get_if<std::vector<Matrix>>(&source_)) return (*items)[k];
    const auto& spec = std::get<GeneratorSpec>(source_);
    const std::size_t key = spec.period ? k % *spec.period : k;
    auto gen = random::keyed_engine(spec.seed, key);
    return random::spanning_tree_matrix(spec.n, 1.0, spec.min_entry, spec.extra_edge_probability,
                                        gen);
  }

  /// Item k with wrap-around for finite sequences (used when a simulation
  /// runs longer than the list).
  Matrix cyclic_at(std::size_t k) const {
    const auto len = length();
    return at(len ? k % *len : k);
  }

  /// Items [0, count).
  std::vector<Matrix> take(std::size_t count) const {
    std::vector<Matrix> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) out.push_back(at(k));
    return out;
  }

 private:
  explicit MatrixSequence(std::vector<Matrix> items) : source_(std::move(items)) {}
  explicit MatrixSequence(GeneratorSpec spec) : source_(std::move(spec)) {}

  std::variant<std::vector<Matrix>, GeneratorSpec> source_;
};

/// Composite A_to * ... * A_from (maps x(from) to x(to + 1)).
inline Matrix product(const MatrixSequence& seq, std::size_t from, std::size_t to) {
  if (from > to) throw InvalidInput("product range requires from <= to");
  Matrix p = seq.at(from);
  for (std::size_t k = from + 1; k <= to; ++k) p = seq.at(k) * p;
  return p;
}

inline Matrix product(std::span<const Matrix> items) {
  if (items.empty()) throw InvalidInput("product of an empty list");
  Matrix p = items.front();
  for (std::size_t k = 1; k < items.size(); ++k) p = items[k] * p;
  return p;
}

struct ProductContractivity {
  /// Coefficient of the full composite.
  double c_exact = 0.0;
  /// Product of the per-factor coefficients.
  double c_bound = 0.0;
  std::vector<double> factor_c;
  ContractivityMethod method = ContractivityMethod::ClosedFormLinf;
};

/// c of the composite versus the product of factor coefficients
/// (submultiplicativity c(T1 T2) <= c(T1) c(T2)).
inline ProductContractivity product_contractivity_bound(const MatrixSequence& seq,
                                                        const NormKind& norm,
                                                        const ContractivityOptions& opts = {}) {
  const auto len = seq.length();
  if (!len) throw InvalidInput("product_contractivity_bound requires a finite sequence");
  ProductContractivity out;
  out.c_bound = 1.0;
  for (std::size_t k = 0; k < *len; ++k) {
    const double c = contractivity(seq.at(k), norm, opts).c;
    out.factor_c.push_back(c);
    out.c_bound *= c;
  }
  const auto rep = contractivity(product(seq, 0, *len - 1), norm, opts);
  out.c_exact = rep.c;
  out.method = rep.method;
  return out;
}

inline constexpr double kProductToZeroThreshold = 1e-12;
inline constexpr double kDeltaToZeroThreshold = 1e-8;

/// Finite-horizon surrogate for lim prod c(T_k) = 0.
struct ConvergenceCheck {
  bool converges_to_zero_over_horizon = false;
  std::vector<double> running_products;
};

inline ConvergenceCheck check_convergence_condition(std::span<const double> c_values,
                                                    std::size_t horizon,
                                                    double threshold = kProductToZeroThreshold) {
  if (c_values.size() < horizon)
    throw InvalidInput("need at least `horizon` coefficients (" + std::to_string(horizon) +
                       "), got " + std::to_string(c_values.size()));
  ConvergenceCheck out;
  double p = 1.0;
  for (std::size_t k = 0; k < horizon; ++k) {
    if (!(c_values[k] >= 0.0) || !std::isfinite(c_values[k]))
      throw InvalidInput("contractivity values must be finite and nonnegative");
    p *= c_values[k];
    out.running_products.push_back(p);
  }
  out.converges_to_zero_over_horizon = horizon > 0 && p < threshold;
  return out;
}

struct ScramblingProductCheck {
  bool hypotheses_hold = false;
  /// Human-readable reasons for every failed hypothesis.
  std::vector<std::string> violations;
  bool product_is_scrambling = false;
  double mu_product = 0.0;
  /// epsilon^(n-1)
  double mu_lower_bound = 0.0;
  bool mu_bound_holds = false;
  /// c_inf of the (n-1)-fold product (= its max row sum minus mu when rows are constant).
  double c_linf_product = 0.0;
  /// r^(n-1) - epsilon^(n-1)
  double c_bound = 0.0;
};

/// Checks the hypotheses of the scrambling-product theorem on the first n-1
/// items (nonnegative, positive diagonal, nonzeros >= epsilon, constant row
/// sums <= r, spanning directed tree, r^(n-1) - epsilon^(n-1) < 1) and
/// evaluates the conclusion on their composite.
inline ScramblingProductCheck scrambling_product_theorem_check(
    const MatrixSequence& seq, double epsilon, double r, double row_sum_tol = kDefaultRowSumTol) {
  const std::size_t n = seq.n();
  const std::size_t count = n - 1;
  if (const auto len = seq.length(); len && *len < count)
    throw InvalidInput("scrambling product check needs at least n-1 = " + std::to_string(count) +
                       " items");
  if (!(epsilon > 0.0) || !std::isfinite(r)) throw InvalidInput("epsilon must be positive, r finite");

  ScramblingProductCheck out;
  const double e_pow = std::pow(epsilon, static_cast<double>(count));
  const double r_pow = std::pow(r, static_cast<double>(count));
  out.mu_lower_bound = e_pow;
  out.c_bound = r_pow - e_pow;
  if (!(out.c_bound < 1.0)) out.violations.push_back("r^(n-1) - epsilon^(n-1) >= 1");

  const auto items = seq.take(count);
  for (std::size_t k = 0; k < items.size(); ++k) {
    const auto& a = items[k];
    const std::string tag = "item " + std::to_string(k) + ": ";
    if (!is_nonnegative(a)) out.violations.push_back(tag + "negative entry");
    for (std::size_t i = 0; i < n; ++i)
      if (!(a(i, i) > a.zero_tol())) {
        out.violations.push_back(tag + "nonpositive diagonal entry");
        break;
      }
    bool small = false;
    for (std::size_t i = 0; i < n && !small; ++i)
      for (std::size_t j = 0; j < n && !small; ++j)
        small = a.is_nonzero(i, j) && a(i, j) < epsilon * (1.0 - 1e-12);
    if (small) out.violations.push_back(tag + "nonzero entry below epsilon");
    const auto profile = a.row_sum_profile(row_sum_tol);
    if (!profile.is_constant) out.violations.push_back(tag + "row sums not constant");
    else if (profile.r > r + row_sum_tol) out.violations.push_back(tag + "row sum exceeds r");
    if (!has_spanning_directed_tree(interaction_digraph(a)).exists)
      out.violations.push_back(tag + "interaction digraph has no spanning directed tree");
  }
  out.hypotheses_hold = out.violations.empty();

  const Matrix p = count == 0 ? Matrix::identity(n) : product(items);
  out.product_is_scrambling = is_scrambling(p);
  out.mu_product = mu(p);
  out.mu_bound_holds = out.mu_product >= e_pow * (1.0 - 1e-12);
  const auto profile = p.row_sum_profile(row_sum_tol * std::max<double>(1.0, count));
  out.c_linf_product = profile.is_constant ? std::max(0.0, profile.r - out.mu_product)
                                           : std::numeric_limits<double>::quiet_NaN();
  return out;
}

enum class ProductPredicate { SetContractive, Scrambling };

inline constexpr std::uint64_t kEnumerationBudget = 1'000'000;

/// Smallest m <= max_m such that every length-m product over `family` (all
/// |family|^m orderings) satisfies the predicate: set-contractive under
/// `norm` (c < 1) or scrambling. Empty when no such m exists within max_m.
inline std::optional<std::size_t> min_contractive_product_length(
    std::span<const Matrix> family, const NormKind& norm, std::size_t max_m,
    ProductPredicate predicate = ProductPredicate::SetContractive,
    std::uint64_t budget = kEnumerationBudget, double row_sum_tol = kDefaultRowSumTol) {
  if (family.empty()) throw InvalidInput("matrix family must be nonempty");
  const std::size_t n = family.front().n();
  for (const auto& a : family) {
    if (a.n() != n) throw InvalidInput("matrix family has mixed dimensions");
    if (!a.row_sum_profile(row_sum_tol).is_constant)
      throw PreconditionViolated("min_contractive_product_length requires constant row sums");
  }
  if (predicate == ProductPredicate::SetContractive && norm.tag() == NormKind::Tag::L1)
    throw PreconditionViolated("no exact contractivity under l1; use linf, l2 or wl2");

  std::uint64_t total = 1;
  for (std::size_t m = 0; m < max_m; ++m) {
    if (total > budget / family.size())
      throw BudgetExceeded("|H|^max_m = " + std::to_string(family.size()) + "^" +
                           std::to_string(max_m) + " exceeds the enumeration budget of " +
                           std::to_string(budget) + " products");
    total *= family.size();
  }

  auto satisfies = [&](const Matrix& p) {
    if (predicate == ProductPredicate::Scrambling) return is_scrambling(p);
    ContractivityOptions opts;
    opts.row_sum_tol = row_sum_tol * 1e3;
    return contractivity(p, norm, opts).is_set_contractive;
  };

  for (std::size_t m = 1; m <= max_m; ++m) {
    // Depth-first over orderings, reusing prefix products.
    bool all_ok = true;
    std::vector<Matrix> stack;
    std::function<void(std::size_t)> visit = [&](std::size_t depth) {
      if (!all_ok) return;
      if (depth == m) {
        all_ok = satisfies(stack.back());
        return;
      }
      for (const auto& a : family) {
        stack.push_back(stack.empty() ? a : a * stack.back());
        visit(depth + 1);
        stack.pop_back();
        if (!all_ok) return;
      }
    };
    visit(0);
    if (all_ok) return m;
  }
  return std::nullopt;
}

/// mu_c(A) = 1 - c(A), a proper coefficient of ergodicity on stochastic
/// matrices that are set-nonexpansive under the norm.
inline double ergodicity_coefficient(const Matrix& a, const NormKind& norm,
                                     double tol = kDefaultRowSumTol) {
  if (!is_stochastic(a, tol))
    throw PreconditionViolated("ergodicity_coefficient requires a stochastic matrix");
  if (norm.tag() != NormKind::Tag::Linf && norm.tag() != NormKind::Tag::L2)
    throw PreconditionViolated("ergodicity_coefficient needs an exact coefficient (linf or l2)");
  ContractivityOptions opts;
  opts.row_sum_tol = tol;
  const auto rep = contractivity(a, norm, opts);
  if (!rep.is_set_nonexpansive)
    throw PreconditionViolated("matrix is not set-nonexpansive under " + norm.name() +
                               " (c = " + std::to_string(rep.c) + ")");
  return std::clamp(1.0 - rep.c, 0.0, 1.0);
}

enum class ErgodicityVerdict { ConsistentWithWeakErgodicity, Inconclusive, ViolatedNonincrease };

inline std::string to_string(ErgodicityVerdict v) {
  switch (v) {
    case ErgodicityVerdict::ConsistentWithWeakErgodicity: return "consistent_with_weak_ergodicity";
    case ErgodicityVerdict::Inconclusive: return "inconclusive";
    case ErgodicityVerdict::ViolatedNonincrease: return "violated_nonincrease";
  }
  return {};
}

struct AnchorTrace {
  std::size_t anchor = 0;
  /// delta(A_{anchor+k} ... A_anchor), k = 0, 1, ...
  std::vector<double> deltas;
};

/// Finite-horizon diagnostic, never a proof. Blocks use the canonical
/// subsequence i_j = j * block_len.
struct ErgodicityReport {
  std::size_t horizon = 0;
  std::size_t block_len = 1;
  /// delta of growing composites from anchor 0.
  std::vector<double> delta_of_partial_products;
  std::vector<AnchorTrace> anchors;
  std::vector<double> block_mu_c;
  std::vector<double> block_mu_c_partial_sums;
  /// Blocks whose composite is not set-nonexpansive under the norm; they
  /// contribute 0 to the partial sums.
  std::size_t blocks_outside_h = 0;
  ErgodicityVerdict verdict = ErgodicityVerdict::Inconclusive;
};

inline ErgodicityReport weak_ergodicity_diagnostic(const MatrixSequence& seq, std::size_t horizon,
                                                   std::optional<std::size_t> block_len,
                                                   const NormKind& norm,
                                                   double tol = kDefaultRowSumTol) {
  if (horizon == 0) throw InvalidInput("horizon must be >= 1");
  if (const auto len = seq.length(); len && *len < horizon)
    throw InvalidInput("sequence shorter than the horizon");
  if (norm.tag() != NormKind::Tag::Linf && norm.tag() != NormKind::Tag::L2)
    throw PreconditionViolated("weak_ergodicity_diagnostic supports linf and l2");
  const auto items = seq.take(horizon);
  for (std::size_t k = 0; k < items.size(); ++k)
    if (!is_stochastic(items[k], tol))
      throw PreconditionViolated("item " + std::to_string(k) + " is not stochastic");

  ErgodicityReport rep;
  rep.horizon = horizon;
  rep.block_len = block_len.value_or(std::max<std::size_t>(1, seq.n() - 1));
  if (rep.block_len == 0) throw InvalidInput("block_len must be >= 1");

  std::vector<std::size_t> anchors{0, horizon / 4, horizon / 2};
  anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());
  bool increased = false;
  bool all_small = true;
  for (std::size_t anchor : anchors) {
    AnchorTrace trace{anchor, {}};
    Matrix p = items[anchor];
    trace.deltas.push_back(delta(p));
    for (std::size_t k = anchor + 1; k < horizon; ++k) {
      p = items[k] * p;
      const double d = delta(p);
      if (d > trace.deltas.back() + 1e-12) increased = true;
      trace.deltas.push_back(d);
    }
    all_small = all_small && trace.deltas.back() < kDeltaToZeroThreshold;
    rep.anchors.push_back(std::move(trace));
  }
  rep.delta_of_partial_products = rep.anchors.front().deltas;

  double sum = 0.0;
  ContractivityOptions opts;
  opts.row_sum_tol = tol * static_cast<double>(rep.block_len);
  for (std::size_t start = 0; start + rep.block_len <= horizon; start += rep.block_len) {
    const Matrix block = product(std::span<const Matrix>(items).subspan(start, rep.block_len));
    const auto c = contractivity(block, norm, opts);
    double mu_c = 0.0;
    if (c.is_set_nonexpansive) mu_c = std::clamp(1.0 - c.c, 0.0, 1.0);
    else ++rep.blocks_outside_h;
    rep.block_mu_c.push_back(mu_c);
    sum += mu_c;
    rep.block_mu_c_partial_sums.push_back(sum);
  }

  if (increased) rep.verdict = ErgodicityVerdict::ViolatedNonincrease;
  else if (all_small) rep.verdict = ErgodicityVerdict::ConsistentWithWeakErgodicity;
  else rep.verdict = ErgodicityVerdict::Inconclusive;
  return rep;
}

}  // namespace contractlab
