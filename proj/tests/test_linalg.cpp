#include <gtest/gtest.h>

#include "contractlab/fixtures.hpp"
#include "contractlab/linalg.hpp"
#include "contractlab/random.hpp"
#include "oracles.hpp"

using namespace contractlab;

TEST(SymmetricEigen, DiagonalInput) {
  DenseMatrix s(3, 3);
  s(0, 0) = 2;
  s(1, 1) = 5;
  s(2, 2) = -1;
  const auto e = symmetric_eigen(s);
  EXPECT_DOUBLE_EQ(e.values[0], 5);
  EXPECT_DOUBLE_EQ(e.values[1], 2);
  EXPECT_DOUBLE_EQ(e.values[2], -1);
}

TEST(SymmetricEigen, ReconstructsRandomSymmetric) {
  auto gen = random::keyed_engine(3, 0);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = random::uniform_index(gen, 1, 9);
    DenseMatrix s(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) s(i, j) = s(j, i) = random::uniform(gen, -2, 2);
    const auto e = symmetric_eigen(s);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double v = 0;
        for (std::size_t k = 0; k < n; ++k) v += e.vectors(i, k) * e.values[k] * e.vectors(j, k);
        EXPECT_NEAR(v, s(i, j), 1e-12);
      }
    for (std::size_t k = 1; k < n; ++k) EXPECT_GE(e.values[k - 1], e.values[k]);
  }
}

TEST(SymmetricEigen, RejectsNonSquare) {
  EXPECT_THROW(symmetric_eigen(DenseMatrix(2, 3)), InvalidInput);
}

TEST(SymmetricEigen, SweepLimitRaisesNumericalFailure) {
  DenseMatrix s(3, 3);
  s(0, 1) = s(1, 0) = 1;
  s(1, 2) = s(2, 1) = 1;
  JacobiOptions opts;
  opts.max_sweeps = 0;
  EXPECT_THROW(symmetric_eigen(s, opts), NumericalFailure);
}

TEST(SpectralNorm, ReferenceMatrix) {
  EXPECT_NEAR(spectral_norm_2(fixtures::m0()), 1.088, 1e-3);
}

TEST(SpectralNorm, MatchesEigenSvd) {
  auto gen = random::keyed_engine(4, 0);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = random::uniform_index(gen, 1, 8);
    const auto a = random::signed_constant_row_sum(n, random::uniform(gen, -2, 2), gen);
    EXPECT_NEAR(spectral_norm_2(a), oracle::spectral_norm(a), 1e-10 * std::max(1.0, oracle::spectral_norm(a)));
  }
}

TEST(SpectralNorm, Rectangular) {
  DenseMatrix m(1, 3);
  m(0, 0) = 3;
  m(0, 2) = 4;
  EXPECT_NEAR(spectral_norm_2(m), 5.0, 1e-14);
  EXPECT_NEAR(spectral_norm_2(m.transposed()), 5.0, 1e-14);
}
