#include <gtest/gtest.h>

#include <cmath>

#include "contractlab/contractivity.hpp"
#include "contractlab/fixtures.hpp"
#include "contractlab/random.hpp"
#include "oracles.hpp"

using namespace contractlab;
using namespace contractlab::fixtures;

namespace {

DenseMatrix ktk(const BasisK& k) { return multiply(k.columns.transposed(), k.columns); }

}  // namespace

TEST(BasisK, TwoDimensional) {
  const auto k = basis_K(2);
  ASSERT_EQ(k.columns.cols(), 1u);
  EXPECT_NEAR(std::abs(k.columns(0, 0)), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(k.columns(0, 0), -k.columns(1, 0), 1e-15);
}

TEST(BasisK, OrthonormalComplementOfE) {
  for (std::size_t n : {3u, 5u, 17u}) {
    const auto k = basis_K(n);
    const auto g = ktk(k);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = 0; j + 1 < n; ++j) EXPECT_NEAR(g(i, j), i == j ? 1.0 : 0.0, 1e-12);
      double s = 0;
      for (std::size_t r = 0; r < n; ++r) s += k.columns(r, i);
      EXPECT_NEAR(s, 0.0, 1e-12);
    }
    EXPECT_NEAR(spectral_norm_2(k.columns), 1.0, 1e-12);
  }
  EXPECT_THROW(basis_K(1), InvalidInput);
}

TEST(ContractivityLinf, Examples) {
  const auto r1 = contractivity_linf(a1());
  EXPECT_NEAR(r1.c, 0.5, 1e-15);
  EXPECT_TRUE(r1.is_set_contractive);
  const auto r3 = contractivity_linf(a3());
  EXPECT_DOUBLE_EQ(r3.c, 1.0);
  EXPECT_FALSE(r3.is_set_contractive);
  EXPECT_TRUE(r3.is_set_nonexpansive);
  EXPECT_NEAR(contractivity_linf(Matrix::averaging(4)).c, 0.0, 1e-15);
}

TEST(ContractivityLinf, A4IsOneMinusMu) {
  // mu(A4) = 0.1 from the entries, so c = 0.9.
  EXPECT_NEAR(contractivity_linf(a4()).c, 0.9, 1e-15);
}

TEST(ContractivityLinf, RejectsNonConstantRowSums) {
  EXPECT_THROW(contractivity_linf(Matrix{{1, 0}, {0.5, 0.6}}), PreconditionViolated);
  EXPECT_THROW(contractivity_l2(Matrix{{1, 0}, {0.5, 0.6}}), PreconditionViolated);
  EXPECT_THROW(contractivity_weighted_bound(Matrix{{1, 0}, {0.5, 0.6}}, {1, 1}), PreconditionViolated);
}

TEST(AKNorm, ReferenceValues) {
  EXPECT_NEAR(ak_norm_2(a3()), 0.939, 1e-3);
  EXPECT_NEAR(ak_norm_2(a2()), 1.0, 1e-6);
  EXPECT_NEAR(ak_norm_2(a4()), 1.125, 1e-3);
  EXPECT_NEAR(ak_norm_2(a5()), 0.939, 1e-3);
}

TEST(AKNorm, DominatesCoefficientAndIsExactForDoublyStochastic) {
  auto gen = random::keyed_engine(35, 0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = random::uniform_index(gen, 2, 8);
    const auto a = random::signed_constant_row_sum(n, random::uniform(gen, -2, 2), gen);
    EXPECT_NEAR(ak_norm_2(a), oracle::ak_norm(a), 1e-10);
    EXPECT_LE(contractivity_l2(a).c, ak_norm_2(a) + 1e-12);
  }
  const auto c = Matrix::circulant(Vector{0.5, 0.3, 0.2, 0.0});
  EXPECT_NEAR(ak_norm_2(c), contractivity_l2(c).c, 1e-12);
}

TEST(ContractivityL2, ReferenceMatrices) {
  // For x orthogonal to e the distance of Ax is |(I - ee^T/n) A x|, which
  // is strictly below |Ax| for A3, A4 and A5.
  EXPECT_NEAR(contractivity_l2(a2()).c, 1.0, 1e-12);
  EXPECT_NEAR(contractivity_l2(a3()).c, std::sqrt(3.0) / 2.0, 1e-12);
  EXPECT_NEAR(contractivity_l2(a5()).c, std::sqrt(3.0) / 2.0, 1e-12);
  EXPECT_NEAR(contractivity_l2(a4()).c, oracle::c_l2(a4()), 1e-12);
  EXPECT_NEAR(contractivity_l2(a4()).c, 0.955505, 1e-6);
}

TEST(ContractivityL2, VerdictsAtTheBoundary) {
  const auto r2 = contractivity_l2(a2());
  EXPECT_TRUE(r2.is_set_nonexpansive);
  EXPECT_FALSE(r2.is_set_contractive);
  EXPECT_TRUE(contractivity_l2(a4()).is_set_contractive);
  EXPECT_TRUE(contractivity_l2(a3()).is_set_contractive);
  EXPECT_FALSE(contractivity_l2(Matrix{{2, 0}, {0, 2}}).is_set_nonexpansive);
}

TEST(ContractivityL2, MatchesEigenOracle) {
  auto gen = random::keyed_engine(31, 0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = random::uniform_index(gen, 2, 9);
    const auto a = random::signed_constant_row_sum(n, random::uniform(gen, -2, 2), gen);
    EXPECT_NEAR(contractivity_l2(a).c, oracle::c_l2(a), 1e-10);
  }
}

TEST(ContractivityL2, SupremumIsAttained) {
  // The top right singular vector of K^T A K, lifted by K, attains c.
  auto gen = random::keyed_engine(36, 0);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = random::uniform_index(gen, 2, 6);
    const auto a = random::stochastic(n, 0.5, gen);
    const auto k = basis_K(n);
    const auto m = multiply(k.columns.transposed(), multiply(a.dense(), k.columns));
    const auto svd = right_singular(m);
    Vector x(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j + 1 < n; ++j) x[i] += k.columns(i, j) * svd.vectors(j, 0);
    const double ratio = distance_to_diagonal(a * x, NormKind::l2()) / distance_to_diagonal(x, NormKind::l2());
    EXPECT_NEAR(ratio, contractivity_l2(a).c, 1e-10);
  }
}

TEST(ContractivityL2, InvariantUnderRotationOfK) {
  auto gen = random::keyed_engine(32, 0);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = random::uniform_index(gen, 2, 7);
    const auto a = random::signed_constant_row_sum(n, 1.0, gen);
    const auto m = n - 1;
    Eigen::MatrixXd g(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) g(i, j) = random::uniform(gen, -1, 1);
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    const auto k = basis_K(n);
    DenseMatrix kq(n, m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t l = 0; l < m; ++l) kq(i, j) += k.columns(i, l) * q(l, j);
    EXPECT_NEAR(spectral_norm_2(multiply(kq.transposed(), multiply(a.dense(), kq))),
                contractivity_l2(a).c, 1e-10);
    EXPECT_NEAR(spectral_norm_2(multiply(a.dense(), kq)), ak_norm_2(a), 1e-10);
  }
}

TEST(WeightedBound, ReferenceWeights) {
  const auto r = contractivity_weighted_bound(a4(), a4_weights());
  EXPECT_LT(r.c, 1.0);
  EXPECT_TRUE(r.is_bound_only);
  EXPECT_TRUE(r.is_set_contractive);
  EXPECT_EQ(r.method, ContractivityMethod::WeightedBound);
}

TEST(WeightedBound, UnitWeightsReduceToL2) {
  auto gen = random::keyed_engine(33, 0);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = random::uniform_index(gen, 2, 7);
    const auto a = random::signed_constant_row_sum(n, 0.7, gen);
    EXPECT_NEAR(contractivity_weighted_bound(a, Vector(n, 1.0)).c, ak_norm_2(a), 1e-10);
    EXPECT_NEAR(contractivity_weighted_bound(a, Vector(n, 3.0)).c, ak_norm_2(a), 1e-10);
  }
}

TEST(WeightedBound, MatchesEigenOracle) {
  auto gen = random::keyed_engine(34, 0);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = random::uniform_index(gen, 2, 7);
    const auto a = random::stochastic(n, 0.5, gen);
    Vector w(n);
    for (double& v : w) v = random::uniform(gen, 0.05, 2.0);
    EXPECT_NEAR(contractivity_weighted_bound(a, w).c, oracle::c_weighted(a, w), 1e-10);
  }
}

TEST(WeightedBound, AveragingMatrixDominatesSamples) {
  const auto a = Matrix::averaging(3);
  const Vector w{1.0, 0.3, 0.6};
  const auto bound = contractivity_weighted_bound(a, w).c;
  const auto sampled = empirical_contractivity(a, NormKind::weighted_l2(w), 20000, 5);
  EXPECT_LE(sampled, bound + 1e-10);
  EXPECT_NEAR(sampled, 0.0, 1e-12);
}

TEST(SpectralNormExamples, IdentityAndDiagonal) {
  EXPECT_NEAR(spectral_norm_2(Matrix::identity(4)), 1.0, 1e-15);
  EXPECT_NEAR(spectral_norm_2(Matrix{{3, 0}, {0, 1}}), 3.0, 1e-15);
}

TEST(Empirical, ReferenceExamples) {
  const double c3 = contractivity_l2(a3()).c;
  EXPECT_LT(empirical_contractivity(a3(), NormKind::l2(), 100000, 1), 0.99 * ak_norm_2(a3()));
  const double e3 = empirical_contractivity(a3(), NormKind::l2(), 100000, 1);
  EXPECT_LE(e3, c3 + 1e-10);
  EXPECT_GE(e3, 0.99 * c3);
  EXPECT_NEAR(binary_vector_contractivity(a1(), NormKind::linf()), 0.5, 1e-15);
  EXPECT_NEAR(empirical_contractivity(Matrix::averaging(5), NormKind::l2(), 1000, 2), 0.0, 1e-12);
}

TEST(Empirical, DeterministicAcrossThreadCounts) {
  const auto a = a5();
  const double one = empirical_contractivity(a, NormKind::l2(), 5000, 9, 1);
  const double four = empirical_contractivity(a, NormKind::l2(), 5000, 9, 4);
  EXPECT_EQ(one, four);
  EXPECT_EQ(one, empirical_contractivity(a, NormKind::l2(), 5000, 9, 1));
}

TEST(Empirical, L1DispatchIsSampled) {
  ContractivityOptions opts;
  opts.samples = 2000;
  const auto r = contractivity(a4(), NormKind::l1(), opts);
  EXPECT_EQ(r.method, ContractivityMethod::Sampled);
  EXPECT_FALSE(r.is_bound_only);
  EXPECT_GT(r.c, 0.0);
}

TEST(Paracontractive, Examples) {
  EXPECT_TRUE(is_paracontractive_l2(Matrix::identity(3)));
  EXPECT_TRUE(is_paracontractive_l2(Matrix{{1, 0}, {0, 0.5}}));
  EXPECT_FALSE(is_paracontractive_l2(m0()));
}

TEST(Paracontractive, RotationIsNotParacontracting) {
  // Norm-preserving with no fixed points other than 0.
  EXPECT_FALSE(is_paracontractive_l2(Matrix{{0, -1}, {1, 0}}));
}

TEST(Paracontractive, AveragingProjector) {
  EXPECT_TRUE(is_paracontractive_l2(Matrix::averaging(4)));
}

TEST(Pseudocontractive, Examples) {
  EXPECT_TRUE(is_pseudocontractive_stochastic_linf(a4()));
  EXPECT_FALSE(is_pseudocontractive_stochastic_linf(a5()));
  EXPECT_TRUE(is_pseudocontractive_stochastic_linf(Matrix::averaging(3)));
  EXPECT_THROW(is_pseudocontractive_stochastic_linf(a1()), PreconditionViolated);
}

TEST(Decompose, DiagonalVectorGivesAveraging) {
  const auto d = decompose_affine(a4(), Vector{2, 2, 2});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(d.b(i, j), 1.0 / 3);
  const Vector ax = a4() * Vector{2, 2, 2};
  const Vector bx = d.b * Vector{2, 2, 2};
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(bx[i] + d.xstar[i], ax[i], 1e-12);
  for (double v : d.xstar) EXPECT_EQ(v, d.xstar_alpha);
}

TEST(Decompose, ScramblingTwoByTwo) {
  const Matrix a{{0.7, 0.3}, {0.4, 0.6}};
  const Vector x{0, 1};
  const auto d = decompose_affine(a, x);
  EXPECT_TRUE(is_stochastic(d.b, 1e-10));
  EXPECT_TRUE(is_scrambling(d.b));
  const Vector ax = a * x;
  const Vector bx = d.b * x;
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(bx[i], ax[i] - d.xstar[i], 1e-12);
}

TEST(Decompose, IdentityKeepsX) {
  const Vector x{3, -1, 2};
  const auto d = decompose_affine(Matrix::identity(3), x);
  const Vector bx = d.b * x;
  EXPECT_NEAR(d.xstar_alpha, 0.0, 1e-15);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(bx[i], x[i], 1e-12);
  EXPECT_TRUE(is_stochastic(d.b, 1e-12));
}

TEST(Decompose, RejectsExpandingMatrix) {
  const Matrix a{{2, 0}, {0, 2}};
  EXPECT_THROW(decompose_affine(a, Vector{0, 1}), PreconditionViolated);
  EXPECT_THROW(decompose_affine(a4(), Vector{0, 1}), InvalidInput);
}
