#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "contractlab/error.hpp"
#include "contractlab/matrix.hpp"

namespace contractlab {

/// Eigenpairs of a real symmetric matrix, eigenvalues in nonincreasing order.
/// Column j of `vectors` is the eigenvector of `values[j]`.
struct SymmetricEigen {
  Vector values;
  DenseMatrix vectors;
};

struct JacobiOptions {
  /// Stop when the off-diagonal Frobenius norm is at most tol * ||S||_F.
  double tol = 1e-14;
  int max_sweeps = 100;
};

namespace detail {

inline double off_diagonal_norm(const DenseMatrix& s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j)
      if (i != j) acc += s(i, j) * s(i, j);
  return std::sqrt(acc);
}

inline double frobenius_norm(const DenseMatrix& s) {
  const auto d = s.data();
  return std::sqrt(std::inner_product(d.begin(), d.end(), d.begin(), 0.0));
}

}  // namespace detail

/// Cyclic Jacobi eigenvalue iteration. Throws NumericalFailure when the
/// off-diagonal mass does not drop below the tolerance within max_sweeps.
inline SymmetricEigen symmetric_eigen(DenseMatrix s, const JacobiOptions& opts = {}) {
  const std::size_t n = s.rows();
  if (n != s.cols()) throw InvalidInput("symmetric_eigen requires a square matrix");
  if (!s.all_finite()) throw InvalidInput("symmetric_eigen requires finite entries");
  DenseMatrix v = DenseMatrix::identity(n);

  const double scale = detail::frobenius_norm(s);
  const double threshold = opts.tol * scale;
  int sweep = 0;
  while (detail::off_diagonal_norm(s) > threshold) {
    if (++sweep > opts.max_sweeps)
      throw NumericalFailure("Jacobi eigenvalue iteration did not converge in " +
                             std::to_string(opts.max_sweeps) + " sweeps");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = s(p, q);
        if (apq == 0.0) continue;
        const double app = s(p, p);
        const double aqq = s(q, q);
        // Rotation angle annihilating s(p,q) (Golub & Van Loan, sym.schur2).
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double skp = s(k, p);
          const double skq = s(k, q);
          s(k, p) = c * skp - sn * skq;
          s(k, q) = sn * skp + c * skq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double spk = s(p, k);
          const double sqk = s(q, k);
          s(p, k) = c * spk - sn * sqk;
          s(q, k) = sn * spk + c * sqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s(a, a) > s(b, b); });
  SymmetricEigen out{Vector(n), DenseMatrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = s(order[j], order[j]);
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = v(k, order[j]);
  }
  return out;
}

/// Right singular vectors and singular values of m (m^T m eigenpairs),
/// singular values nonincreasing.
struct RightSingular {
  Vector singular_values;
  DenseMatrix vectors;
};

inline RightSingular right_singular(const DenseMatrix& m) {
  auto eig = symmetric_eigen(multiply(m.transposed(), m));
  RightSingular out{Vector(eig.values.size()), std::move(eig.vectors)};
  std::transform(eig.values.begin(), eig.values.end(), out.singular_values.begin(),
                 [](double lambda) { return std::sqrt(std::max(lambda, 0.0)); });
  return out;
}

/// Largest singular value of a rectangular matrix, via the smaller Gram matrix.
inline double spectral_norm_2(const DenseMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  if (!m.all_finite()) throw InvalidInput("spectral_norm_2 requires finite entries");
  const DenseMatrix mt = m.transposed();
  const DenseMatrix gram = m.rows() >= m.cols() ? multiply(mt, m) : multiply(m, mt);
  const auto eig = symmetric_eigen(gram);
  return std::sqrt(std::max(eig.values.front(), 0.0));
}

inline double spectral_norm_2(const Matrix& m) { return spectral_norm_2(m.dense()); }

}  // namespace contractlab
