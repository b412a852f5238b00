#pragma once

// Set-contractivity coefficient c(A) = sup_{x not in X*} d(Ax, X*) / d(x, X*)
// for constant row sum matrices and X* = {alpha e}:
//   max norm        c = r - mu(A)                     (exact)
//   Euclidean norm  c = ||A K||_2                     (exact, K spans e-perp)
//   weighted norm   c <= ||W^{1/2} A W^{-1} K||_2     (upper bound)
// plus sampling / enumeration oracles, classification predicates and the
// affine stochastic decomposition T(x) = Bx + x*.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "contractlab/error.hpp"
#include "contractlab/linalg.hpp"
#include "contractlab/matrix.hpp"
#include "contractlab/projections.hpp"

namespace contractlab {

/// Slack used when turning a coefficient into a verdict: contractive iff
/// c < 1 - kVerdictTol, nonexpansive iff c <= 1 + kVerdictTol.
inline constexpr double kVerdictTol = 1e-10;

enum class ContractivityMethod { ClosedFormLinf, SpectralL2, WeightedBound, Sampled };

inline std::string to_string(ContractivityMethod m) {
  switch (m) {
    case ContractivityMethod::ClosedFormLinf: return "closed_form_linf";
    case ContractivityMethod::SpectralL2: return "spectral_l2";
    case ContractivityMethod::WeightedBound: return "weighted_bound";
    case ContractivityMethod::Sampled: return "sampled";
  }
  return {};
}

/// For WeightedBound, `c` is an upper bound and the verdicts are only
/// asserted when the bound proves them. For Sampled, `c` is a lower bound and
/// the verdicts are heuristic.
struct ContractivityReport {
  NormKind norm = NormKind::linf();
  double c = 0.0;
  bool is_set_nonexpansive = false;
  bool is_set_contractive = false;
  ContractivityMethod method = ContractivityMethod::ClosedFormLinf;
  bool is_bound_only = false;
};

/// n x (n-1) matrix with orthonormal columns spanning the complement of e.
struct BasisK {
  std::size_t n = 0;
  DenseMatrix columns;
};

/// Columns 2..n of the Householder reflector that maps e/sqrt(n) to e_1.
inline BasisK basis_K(std::size_t n) {
  if (n < 2) throw InvalidInput("basis_K requires n >= 2");
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  Vector v(n, inv_sqrt_n);
  v[0] -= 1.0;
  double vv = 0.0;
  for (double vi : v) vv += vi * vi;
  BasisK k{n, DenseMatrix(n, n - 1)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 1; j < n; ++j)
      k.columns(i, j - 1) = (i == j ? 1.0 : 0.0) - 2.0 * v[i] * v[j] / vv;
  return k;
}

namespace detail {

inline RowSumProfile require_constant_row_sums(const Matrix& a, double row_sum_tol,
                                               const char* what) {
  auto profile = a.row_sum_profile(row_sum_tol);
  if (!profile.is_constant)
    throw PreconditionViolated(std::string(what) + " requires constant row sums");
  return profile;
}

inline ContractivityReport make_report(NormKind norm, double c, ContractivityMethod method,
                                       bool bound_only) {
  ContractivityReport rep;
  rep.norm = std::move(norm);
  rep.c = c;
  rep.method = method;
  rep.is_bound_only = bound_only;
  rep.is_set_nonexpansive = c <= 1.0 + kVerdictTol;
  rep.is_set_contractive = c < 1.0 - kVerdictTol;
  return rep;
}

}  // namespace detail

/// c(A) = r - mu(A) under the max norm.
inline ContractivityReport contractivity_linf(const Matrix& a,
                                              double row_sum_tol = kDefaultRowSumTol) {
  const auto profile = detail::require_constant_row_sums(a, row_sum_tol, "contractivity_linf");
  const double c = std::max(0.0, profile.r - mu(a));
  return detail::make_report(NormKind::linf(), c, ContractivityMethod::ClosedFormLinf, false);
}

/// ||A K||_2. An upper bound on the Euclidean coefficient, equal to it when
/// the column sums of A are constant as well.
inline double ak_norm_2(const Matrix& a, double row_sum_tol = kDefaultRowSumTol) {
  detail::require_constant_row_sums(a, row_sum_tol, "ak_norm_2");
  return a.n() == 1 ? 0.0 : spectral_norm_2(multiply(a.dense(), basis_K(a.n()).columns));
}

/// c(A) = ||K^T A K||_2 under the Euclidean norm. For x orthogonal to e,
/// d(Ax, X*) = ||K K^T A x||_2, so the supremum is taken over K^T A K rather
/// than A K.
inline ContractivityReport contractivity_l2(const Matrix& a,
                                            double row_sum_tol = kDefaultRowSumTol) {
  detail::require_constant_row_sums(a, row_sum_tol, "contractivity_l2");
  double c = 0.0;
  if (a.n() > 1) {
    const auto& k = basis_K(a.n()).columns;
    c = spectral_norm_2(multiply(k.transposed(), multiply(a.dense(), k)));
  }
  return detail::make_report(NormKind::l2(), c, ContractivityMethod::SpectralL2, false);
}

/// Upper bound ||W^{1/2} A W^{-1} K||_2 on c(A) under ||.||_w, W = diag(w), max w = 1.
inline ContractivityReport contractivity_weighted_bound(const Matrix& a, const Vector& w,
                                                        double row_sum_tol = kDefaultRowSumTol) {
  detail::require_constant_row_sums(a, row_sum_tol, "contractivity_weighted_bound");
  const auto norm = NormKind::weighted_l2(w);
  norm.check_dimension(a.n());
  const auto& wn = norm.weights();
  const std::size_t n = a.n();
  double bound = 0.0;
  if (n > 1) {
    DenseMatrix scaled(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) scaled(i, j) = std::sqrt(wn[i]) * a(i, j) / wn[j];
    bound = spectral_norm_2(multiply(scaled, basis_K(n).columns));
  }
  auto rep = detail::make_report(norm, bound, ContractivityMethod::WeightedBound, true);
  return rep;
}

namespace detail {

inline constexpr std::size_t kSampleBlock = 1024;

inline std::mt19937_64 block_generator(std::uint64_t seed, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
  return std::mt19937_64(seq);
}

inline double ratio(const Matrix& a, std::span<const double> x, const NormKind& norm) {
  const double dx = distance_to_diagonal(x, norm);
  if (dx <= 0.0) return 0.0;
  return distance_to_diagonal(a * x, norm) / dx;
}

}  // namespace detail

/// Monte-Carlo lower bound on c(A): max of d(Ax, X*)/d(x, X*) over `samples`
/// random x with P(x) = 0 and ||x|| = 1. Sample i is drawn from the generator
/// of block i / 1024, so the result depends only on (A, norm, samples, seed),
/// not on `threads`.
inline double empirical_contractivity(const Matrix& a, const NormKind& norm, std::size_t samples,
                                      std::uint64_t seed, unsigned threads = 1,
                                      double row_sum_tol = kDefaultRowSumTol) {
  detail::require_constant_row_sums(a, row_sum_tol, "empirical_contractivity");
  if (samples == 0) throw InvalidInput("samples must be >= 1");
  norm.check_dimension(a.n());
  const std::size_t n = a.n();
  if (n == 1) return 0.0;

  const std::size_t blocks = (samples + detail::kSampleBlock - 1) / detail::kSampleBlock;
  std::vector<double> block_max(blocks, 0.0);
  auto run_block = [&](std::size_t b) {
    auto gen = detail::block_generator(seed, b);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t begin = b * detail::kSampleBlock;
    const std::size_t end = std::min(samples, begin + detail::kSampleBlock);
    Vector x(n);
    double best = 0.0;
    for (std::size_t s = begin; s < end; ++s) {
      for (double& v : x) v = normal(gen);
      const double alpha = project(x, norm).alpha;
      for (double& v : x) v -= alpha;
      const double len = contractlab::norm(x, norm);
      if (!(len > 0.0)) continue;
      for (double& v : x) v /= len;
      best = std::max(best, detail::ratio(a, x, norm));
    }
    block_max[b] = best;
  };

  threads = std::max(1u, threads);
  if (threads == 1 || blocks == 1) {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t b = t; b < blocks; b += threads) run_block(b);
      });
    for (auto& th : pool) th.join();
  }
  return *std::max_element(block_max.begin(), block_max.end());
}

/// Exact max of d(Ax, X*)/d(x, X*) over every binary vector x in {0,1}^n
/// other than 0 and e. Under the max norm this attains r - mu(A).
inline double binary_vector_contractivity(const Matrix& a, const NormKind& norm) {
  const std::size_t n = a.n();
  if (n > 24) throw BudgetExceeded("binary enumeration limited to n <= 24");
  norm.check_dimension(n);
  double best = 0.0;
  Vector x(n);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t mask = 1; mask + 1 < total; ++mask) {
    for (std::size_t i = 0; i < n; ++i) x[i] = (mask >> i) & 1U ? 1.0 : 0.0;
    best = std::max(best, detail::ratio(a, x, norm));
  }
  return best;
}

/// Coefficient under any norm: exact where a closed form exists, the weighted
/// bound for wl2, and a sampled lower bound for l1.
struct ContractivityOptions {
  double row_sum_tol = kDefaultRowSumTol;
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
};

inline ContractivityReport contractivity(const Matrix& a, const NormKind& norm,
                                         const ContractivityOptions& opts = {}) {
  switch (norm.tag()) {
    case NormKind::Tag::Linf: return contractivity_linf(a, opts.row_sum_tol);
    case NormKind::Tag::L2: return contractivity_l2(a, opts.row_sum_tol);
    case NormKind::Tag::WeightedL2:
      return contractivity_weighted_bound(a, norm.weights(), opts.row_sum_tol);
    case NormKind::Tag::L1: {
      const double c = empirical_contractivity(a, norm, opts.samples, opts.seed, 1, opts.row_sum_tol);
      return detail::make_report(norm, c, ContractivityMethod::Sampled, false);
    }
  }
  throw InvalidInput("unknown norm");
}

/// Paracontractivity of a linear map under ||.||_2: ||B||_2 <= 1 and every
/// right singular vector with singular value 1 is a fixed point of B.
/// The second condition is measured as ||(B - I) V_1||_2 < subspace_tol,
/// where V_1 is an orthonormal basis of the unit singular subspace.
inline bool is_paracontractive_l2(const Matrix& b, double norm_tol = 1e-8,
                                  double subspace_tol = 1e-6) {
  const auto svd = right_singular(b.dense());
  if (svd.singular_values.front() > 1.0 + norm_tol) return false;
  const std::size_t n = b.n();
  std::vector<std::size_t> unit;
  for (std::size_t j = 0; j < n; ++j)
    if (std::abs(svd.singular_values[j] - 1.0) < norm_tol) unit.push_back(j);
  if (unit.empty()) return true;
  DenseMatrix residual(n, unit.size());
  for (std::size_t c = 0; c < unit.size(); ++c) {
    Vector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = svd.vectors(i, unit[c]);
    const Vector bv = b * v;
    for (std::size_t i = 0; i < n; ++i) residual(i, c) = bv[i] - v[i];
  }
  return spectral_norm_2(residual) < subspace_tol;
}

/// For stochastic A, pseudocontractivity under the max norm is exactly the
/// scrambling property.
inline bool is_pseudocontractive_stochastic_linf(const Matrix& a,
                                                 double tol = kDefaultRowSumTol) {
  if (!is_stochastic(a, tol))
    throw PreconditionViolated("is_pseudocontractive_stochastic_linf requires a stochastic matrix");
  return is_scrambling(a);
}

/// Ax = Bx + x* with B row-stochastic and x* = alpha e.
struct AffineDecomposition {
  Matrix b;
  double xstar_alpha = 0.0;
  Vector xstar;
};

/// Requires constant row sums and c_inf(A) <= 1. Row i of B puts weight
/// lambda_i on the (first) argmin column of x and 1 - lambda_i on the (first)
/// argmax column; for x in X* B = ee^T/n.
inline AffineDecomposition decompose_affine(const Matrix& a, std::span<const double> x,
                                            double row_sum_tol = kDefaultRowSumTol) {
  const auto rep = contractivity_linf(a, row_sum_tol);
  if (!rep.is_set_nonexpansive)
    throw PreconditionViolated("decompose_affine requires a set-nonexpansive matrix under linf (c = " +
                               std::to_string(rep.c) + ")");
  detail::check_vector(x);
  const std::size_t n = a.n();
  if (x.size() != n) throw InvalidInput("vector length does not match matrix dimension");

  const Vector ax = a * x;
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double x_min = *lo_it;
  const double x_max = *hi_it;

  if (x_max == x_min) {
    Matrix b = Matrix::averaging(n, a.zero_tol());
    const Vector bx = b * x;
    // Ax - Bx is constant here; take its midrange as the exact offset.
    Vector diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = ax[i] - bx[i];
    const double alpha = project(diff, NormKind::linf()).alpha;
    return {std::move(b), alpha, Vector(n, alpha)};
  }

  const double alpha = project(ax, NormKind::linf()).alpha - project(x, NormKind::linf()).alpha;
  // First occurrence, matching lowest-index tie breaking.
  const auto i_min = static_cast<std::size_t>(std::find(x.begin(), x.end(), x_min) - x.begin());
  const auto i_max = static_cast<std::size_t>(std::find(x.begin(), x.end(), x_max) - x.begin());
  DenseMatrix b(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = ax[i] - alpha;
    const double lambda = std::clamp((x_max - y) / (x_max - x_min), 0.0, 1.0);
    b(i, i_min) = lambda;
    b(i, i_max) = 1.0 - lambda;
  }
  return {Matrix(std::move(b), a.zero_tol()), alpha, Vector(n, alpha)};
}

}  // namespace contractlab
