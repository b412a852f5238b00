#pragma once

// Dense matrices, structural predicates and the pairwise row functionals
// mu(A) and delta(A).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "contractlab/error.hpp"

namespace contractlab {

using Vector = std::vector<double>;

inline constexpr double kDefaultZeroTol = 1e-12;
inline constexpr double kDefaultRowSumTol = 1e-9;

/// Plain row-major rectangular matrix. Used for intermediate products such as
/// A*K that are not square.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static DenseMatrix from_rows(const std::vector<Vector>& rows) {
    if (rows.empty()) return {};
    DenseMatrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_)
        throw InvalidInput("ragged rows: row " + std::to_string(i) + " has " +
                           std::to_string(rows[i].size()) + " entries, expected " +
                           std::to_string(m.cols_));
      std::copy(rows[i].begin(), rows[i].end(), m.data_.begin() + i * m.cols_);
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

  std::span<const double> data() const noexcept { return data_; }

  DenseMatrix transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows())
    throw InvalidInput("dimension mismatch in product: " + std::to_string(a.rows()) + "x" +
                       std::to_string(a.cols()) + " times " + std::to_string(b.rows()) + "x" +
                       std::to_string(b.cols()));
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline Vector multiply(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw InvalidInput("dimension mismatch in matrix-vector product");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    y[i] = std::inner_product(r.begin(), r.end(), x.begin(), 0.0);
  }
  return y;
}

/// Row sums of a square matrix and whether they are all equal (symbol r).
struct RowSumProfile {
  Vector sums;
  bool is_constant = false;
  /// Mean of the row sums; meaningful only when is_constant.
  double r = 0.0;
};

inline RowSumProfile row_sum_profile_of(std::span<const double> sums, double row_sum_tol) {
  RowSumProfile p;
  p.sums.assign(sums.begin(), sums.end());
  if (p.sums.empty()) return p;
  const double mean = std::accumulate(p.sums.begin(), p.sums.end(), 0.0) /
                      static_cast<double>(p.sums.size());
  p.is_constant = std::all_of(p.sums.begin(), p.sums.end(),
                              [&](double s) { return std::abs(s - mean) <= row_sum_tol; });
  p.r = p.is_constant ? mean : 0.0;
  return p;
}

/// Square, finite, immutable matrix with a structural-zero threshold.
/// Row sums and the nonzero pattern are computed once at construction.
class Matrix {
 public:
  explicit Matrix(DenseMatrix values, double zero_tol = kDefaultZeroTol)
      : values_(std::move(values)), zero_tol_(zero_tol) {
    if (values_.rows() == 0) throw InvalidInput("matrix must have dimension n >= 1");
    if (values_.rows() != values_.cols())
      throw InvalidInput("matrix must be square, got " + std::to_string(values_.rows()) + "x" +
                         std::to_string(values_.cols()));
    if (!values_.all_finite()) throw InvalidInput("matrix entries must be finite");
    if (!(zero_tol_ >= 0.0) || !std::isfinite(zero_tol_))
      throw InvalidInput("zero_tol must be a finite nonnegative number");
    const std::size_t n = values_.rows();
    row_sums_.resize(n);
    nonzero_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = values_.row(i);
      row_sums_[i] = std::accumulate(r.begin(), r.end(), 0.0);
      for (std::size_t j = 0; j < n; ++j) nonzero_[i * n + j] = std::abs(r[j]) > zero_tol_;
    }
  }

  Matrix(std::initializer_list<std::initializer_list<double>> rows,
         double zero_tol = kDefaultZeroTol)
      : Matrix(to_dense(rows), zero_tol) {}

  static Matrix from_rows(const std::vector<Vector>& rows, double zero_tol = kDefaultZeroTol) {
    return Matrix(DenseMatrix::from_rows(rows), zero_tol);
  }
  static Matrix identity(std::size_t n, double zero_tol = kDefaultZeroTol) {
    return Matrix(DenseMatrix::identity(n), zero_tol);
  }
  /// The averaging matrix J/n = ee^T/n.
  static Matrix averaging(std::size_t n, double zero_tol = kDefaultZeroTol) {
    return Matrix(DenseMatrix(n, n, 1.0 / static_cast<double>(n)), zero_tol);
  }
  /// Circulant matrix whose row i is first_row shifted right by i.
  static Matrix circulant(std::span<const double> first_row, double zero_tol = kDefaultZeroTol) {
    const std::size_t n = first_row.size();
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, (i + j) % n) = first_row[j];
    return Matrix(std::move(m), zero_tol);
  }

  std::size_t n() const noexcept { return values_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
  std::span<const double> row(std::size_t i) const { return values_.row(i); }
  const DenseMatrix& dense() const noexcept { return values_; }
  double zero_tol() const noexcept { return zero_tol_; }
  std::span<const double> row_sums() const noexcept { return row_sums_; }

  /// |A_ij| > zero_tol.
  bool is_nonzero(std::size_t i, std::size_t j) const { return nonzero_[i * n() + j] != 0; }

  RowSumProfile row_sum_profile(double row_sum_tol = kDefaultRowSumTol) const {
    return row_sum_profile_of(row_sums_, row_sum_tol);
  }

  Matrix with_zero_tol(double zero_tol) const { return Matrix(values_, zero_tol); }

  friend bool operator==(const Matrix& a, const Matrix& b) { return a.values_ == b.values_; }

 private:
  static DenseMatrix to_dense(std::initializer_list<std::initializer_list<double>> rows) {
    std::vector<Vector> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.emplace_back(r);
    return DenseMatrix::from_rows(v);
  }

  DenseMatrix values_;
  double zero_tol_;
  Vector row_sums_;
  std::vector<unsigned char> nonzero_;
};

/// Product a*b; the zero threshold of the left factor is kept.
inline Matrix operator*(const Matrix& a, const Matrix& b) {
  return Matrix(multiply(a.dense(), b.dense()), a.zero_tol());
}

inline Vector operator*(const Matrix& a, std::span<const double> x) {
  return multiply(a.dense(), x);
}

inline RowSumProfile row_sum_profile(const Matrix& a, double row_sum_tol = kDefaultRowSumTol) {
  if (!(row_sum_tol >= 0.0)) throw InvalidInput("row_sum_tol must be nonnegative");
  return a.row_sum_profile(row_sum_tol);
}

/// min over unordered row pairs j != k of sum_i min(A_ji, A_ki).
/// For n = 1 the pair set is empty and the single row sum is returned.
inline double mu(const Matrix& a) {
  const std::size_t n = a.n();
  if (n == 1) return a.row_sums()[0];
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    const auto rj = a.row(j);
    for (std::size_t k = j + 1; k < n; ++k) {
      const auto rk = a.row(k);
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += std::min(rj[i], rk[i]);
      best = std::min(best, s);
    }
  }
  return best;
}

/// max over ordered row pairs (i, j) of sum_k max(0, A_ik - A_jk). Zero for n = 1.
inline double delta(const Matrix& a) {
  const std::size_t n = a.n();
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ri = a.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto rj = a.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += std::max(0.0, ri[k] - rj[k]);
      best = std::max(best, s);
    }
  }
  return best;
}

/// Every pair of rows has a common column where both entries are structurally nonzero.
inline bool is_scrambling(const Matrix& a) {
  const std::size_t n = a.n();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      bool shared = false;
      for (std::size_t k = 0; k < n && !shared; ++k)
        shared = a.is_nonzero(i, k) && a.is_nonzero(j, k);
      if (!shared) return false;
    }
  return true;
}

inline bool is_stochastic(const Matrix& a, double tol = kDefaultRowSumTol) {
  if (!(tol >= 0.0)) throw InvalidInput("tolerance must be nonnegative");
  const auto entries = a.dense().data();
  if (std::any_of(entries.begin(), entries.end(), [&](double v) { return v < -tol; }))
    return false;
  const auto sums = a.row_sums();
  return std::all_of(sums.begin(), sums.end(),
                     [&](double s) { return std::abs(s - 1.0) <= tol; });
}

inline bool is_nonnegative(const Matrix& a, double tol = 0.0) {
  const auto entries = a.dense().data();
  return std::none_of(entries.begin(), entries.end(), [&](double v) { return v < -tol; });
}

/// max_i v_i - min_i v_i.
inline double spread(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

}  // namespace contractlab
