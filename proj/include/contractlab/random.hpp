#pragma once

// Seeded random matrix and vector generators used by the sequence generator
// and by the property suites.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "contractlab/error.hpp"
#include "contractlab/matrix.hpp"

namespace contractlab::random {

using Engine = std::mt19937_64;

/// Engine keyed by (seed, stream) so item k of a generated sequence does not
/// depend on how many items were drawn before it.
inline Engine keyed_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x5eedU};
  return Engine(seq);
}

inline double uniform(Engine& gen, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(gen);
}

inline std::size_t uniform_index(Engine& gen, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(gen);
}

inline Vector probability_vector(std::size_t n, Engine& gen) {
  Vector v(n);
  for (double& x : v) x = std::exponential_distribution<double>(1.0)(gen);
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= s;
  return v;
}

/// Fills the `pattern` positions of a row with values >= min_entry summing to `total`.
inline void fill_row(std::span<double> row, const std::vector<bool>& pattern, double total,
                     double min_entry, Engine& gen) {
  const auto k = static_cast<double>(std::count(pattern.begin(), pattern.end(), true));
  const double free_mass = total - k * min_entry;
  std::vector<double> u(row.size(), 0.0);
  double s = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j)
    if (pattern[j]) s += (u[j] = uniform(gen, 0.05, 1.0));
  for (std::size_t j = 0; j < row.size(); ++j)
    row[j] = pattern[j] ? min_entry + free_mass * u[j] / s : 0.0;
}

/// Nonnegative matrix with constant row sum r. Each off-diagonal entry is
/// nonzero with probability `density`; the diagonal with probability
/// `diagonal_density`. Rows are never empty.
inline Matrix nonnegative_constant_row_sum(std::size_t n, double r, double density, Engine& gen,
                                           double diagonal_density = 0.5) {
  DenseMatrix m(n, n);
  std::bernoulli_distribution off(density);
  std::bernoulli_distribution diag(diagonal_density);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<bool> pattern(n, false);
    for (std::size_t j = 0; j < n; ++j) pattern[j] = (i == j) ? diag(gen) : off(gen);
    if (std::none_of(pattern.begin(), pattern.end(), [](bool b) { return b; }))
      pattern[uniform_index(gen, 0, n - 1)] = true;
    fill_row(m.row(i), pattern, r, 0.0, gen);
  }
  return Matrix(std::move(m));
}

/// Dense signed matrix with constant row sum r (entries in [-1, 1] before the
/// last column is adjusted).
inline Matrix signed_constant_row_sum(std::size_t n, double r, Engine& gen) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) s += (m(i, j) = uniform(gen, -1.0, 1.0));
    m(i, n - 1) = r - s;
  }
  return Matrix(std::move(m));
}

inline Matrix stochastic(std::size_t n, double density, Engine& gen) {
  return nonnegative_constant_row_sum(n, 1.0, density, gen);
}

/// Nonnegative matrix with positive diagonal, every nonzero >= min_entry, all
/// row sums equal to `row_sum`, and an interaction digraph that contains a
/// spanning directed tree (a random out-branching plus extra random edges).
inline Matrix spanning_tree_matrix(std::size_t n, double row_sum, double min_entry,
                                   double extra_edge_probability, Engine& gen) {
  if (n == 0) throw InvalidInput("dimension must be >= 1");
  if (!(min_entry > 0.0) || static_cast<double>(n) * min_entry > row_sum)
    throw InvalidInput("min_entry must be positive with n * min_entry <= row sum");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), gen);
  std::vector<std::vector<bool>> pattern(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) pattern[i][i] = true;
  // Edge parent -> child in the interaction digraph means A(child, parent) != 0.
  for (std::size_t t = 1; t < n; ++t) {
    const std::size_t parent = order[uniform_index(gen, 0, t - 1)];
    pattern[order[t]][parent] = true;
  }
  std::bernoulli_distribution extra(extra_edge_probability);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && extra(gen)) pattern[i][j] = true;
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) fill_row(m.row(i), pattern[i], row_sum, min_entry, gen);
  return Matrix(std::move(m));
}

}  // namespace contractlab::random
