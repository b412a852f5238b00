#include <gtest/gtest.h>

#include <cmath>

#include "contractlab/fixtures.hpp"
#include "contractlab/products.hpp"
#include "contractlab/random.hpp"
#include "oracles.hpp"

using namespace contractlab;
using fixtures::a2;
using fixtures::a3;
using fixtures::a4;

namespace {

void expect_matrix_near(const Matrix& a, const Matrix& b, double tol) {
  ASSERT_EQ(a.n(), b.n());
  for (std::size_t i = 0; i < a.n(); ++i)
    for (std::size_t j = 0; j < a.n(); ++j) EXPECT_NEAR(a(i, j), b(i, j), tol) << i << "," << j;
}

}  // namespace

TEST(Product, IdentityFactorsLeaveA) {
  const auto seq = MatrixSequence::finite({Matrix::identity(3), Matrix::identity(3), a4()});
  expect_matrix_near(product(seq, 0, 2), a4(), 0.0);
}

TEST(Product, SingleItem) {
  const auto seq = MatrixSequence::finite({fixtures::a1()});
  expect_matrix_near(product(seq, 0, 0), fixtures::a1(), 0.0);
}

TEST(Product, OrderIsLaterTimesEarlier) {
  auto gen = random::keyed_engine(3, 0);
  const auto a = random::stochastic(4, 0.6, gen);
  const auto b = random::stochastic(4, 0.6, gen);
  const auto seq = MatrixSequence::finite({a, b});
  const Eigen::MatrixXd expected = oracle::to_eigen(b) * oracle::to_eigen(a);
  const auto p = product(seq, 0, 1);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      EXPECT_NEAR(p(i, j), expected(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                  1e-15);
}

TEST(Product, Errors) {
  EXPECT_THROW(MatrixSequence::finite({}), InvalidInput);
  EXPECT_THROW(MatrixSequence::finite({Matrix::identity(2), Matrix::identity(3)}), InvalidInput);
  const auto seq = MatrixSequence::repeated(a4(), 2);
  EXPECT_THROW(product(seq, 1, 0), InvalidInput);
  EXPECT_THROW(seq.at(2), InvalidInput);
}

TEST(Sequence, CyclicAtWraps) {
  const auto seq = MatrixSequence::finite({a3(), a4()});
  expect_matrix_near(seq.cyclic_at(5), a4(), 0.0);
  expect_matrix_near(seq.cyclic_at(4), a3(), 0.0);
}

TEST(Sequence, GeneratedIsDeterministicAndHonorsPeriod) {
  GeneratorSpec spec;
  spec.n = 4;
  spec.seed = 17;
  spec.period = 3;
  const auto s1 = MatrixSequence::generated(spec);
  const auto s2 = MatrixSequence::generated(spec);
  for (std::size_t k = 0; k < 7; ++k) expect_matrix_near(s1.at(k), s2.at(k), 0.0);
  expect_matrix_near(s1.at(1), s1.at(4), 0.0);
  EXPECT_FALSE(s1.length().has_value());
  EXPECT_EQ(*s1.period(), 3u);
}

TEST(Sequence, GeneratedItemsSatisfyHypotheses) {
  GeneratorSpec spec;
  spec.n = 5;
  spec.seed = 2;
  spec.min_entry = 0.1;
  const auto seq = MatrixSequence::generated(spec);
  for (std::size_t k = 0; k < 20; ++k) {
    const auto a = seq.at(k);
    EXPECT_TRUE(is_stochastic(a, 1e-12));
    for (std::size_t i = 0; i < 5; ++i) EXPECT_GE(a(i, i), 0.1);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j)
        if (a(i, j) != 0.0) {
          EXPECT_GE(a(i, j), 0.1 - 1e-15);
        }
    EXPECT_TRUE(oracle::spanning_root(oracle::interaction_adjacency(a)).has_value());
  }
}

TEST(Sequence, GeneratorRejectsBadSpec) {
  GeneratorSpec spec;
  spec.n = 4;
  spec.min_entry = 0.3;
  EXPECT_THROW(MatrixSequence::generated(spec), InvalidInput);
  spec.min_entry = 0.1;
  spec.period = 0;
  EXPECT_THROW(MatrixSequence::generated(spec), InvalidInput);
}

TEST(ProductContractivity, A3SquaredUnderL2) {
  const auto r = product_contractivity_bound(MatrixSequence::repeated(a3(), 2), NormKind::l2());
  const double c = contractivity_l2(a3()).c;
  EXPECT_NEAR(r.c_bound, c * c, 1e-12);
  EXPECT_LE(r.c_exact, r.c_bound + 1e-10);
  EXPECT_NEAR(r.c_exact, oracle::c_l2(a3() * a3()), 1e-10);
}

TEST(ProductContractivity, AveragingAnnihilates) {
  auto gen = random::keyed_engine(5, 0);
  const auto x = random::stochastic(3, 0.7, gen);
  const auto seq = MatrixSequence::finite({x, Matrix::averaging(3)});
  const auto r = product_contractivity_bound(seq, NormKind::linf());
  EXPECT_NEAR(r.c_exact, 0.0, 1e-15);
  EXPECT_NEAR(r.c_bound, 0.0, 1e-15);
}

TEST(ProductContractivity, SingleItemExactEqualsBound) {
  const auto r = product_contractivity_bound(MatrixSequence::finite({a4()}), NormKind::linf());
  EXPECT_DOUBLE_EQ(r.c_exact, r.c_bound);
  EXPECT_NEAR(r.c_exact, 0.9, 1e-15);
  ASSERT_EQ(r.factor_c.size(), 1u);
}

TEST(ProductContractivity, GeneratedInfiniteRejected) {
  GeneratorSpec spec;
  spec.n = 3;
  EXPECT_THROW(product_contractivity_bound(MatrixSequence::generated(spec), NormKind::linf()),
               InvalidInput);
}

TEST(Convergence, Examples) {
  const std::vector<double> half(50, 0.5);
  const auto r = check_convergence_condition(half, 50);
  EXPECT_TRUE(r.converges_to_zero_over_horizon);
  EXPECT_DOUBLE_EQ(r.running_products.back(), std::ldexp(1.0, -50));

  const std::vector<double> one(50, 1.0);
  EXPECT_FALSE(check_convergence_condition(one, 50).converges_to_zero_over_horizon);

  std::vector<double> alt;
  for (int k = 0; k < 50; ++k) alt.push_back(k % 2 ? 2.0 : 0.5);
  const auto a = check_convergence_condition(alt, 50);
  EXPECT_FALSE(a.converges_to_zero_over_horizon);
  EXPECT_DOUBLE_EQ(a.running_products[1], 1.0);
}

TEST(Convergence, Errors) {
  const std::vector<double> bad{0.5, -0.1};
  EXPECT_THROW(check_convergence_condition(bad, 2), InvalidInput);
  const std::vector<double> short_list{0.5};
  EXPECT_THROW(check_convergence_condition(short_list, 2), InvalidInput);
}

TEST(ScramblingProduct, CopiesOfSpanningTreeMatrix) {
  auto gen = random::keyed_engine(8, 0);
  const auto a = random::spanning_tree_matrix(5, 1.0, 0.05, 0.1, gen);
  const auto r = scrambling_product_theorem_check(MatrixSequence::repeated(a, 4), 0.05, 1.0);
  EXPECT_TRUE(r.hypotheses_hold) << (r.violations.empty() ? "" : r.violations.front());
  EXPECT_TRUE(r.product_is_scrambling);
  EXPECT_TRUE(r.mu_bound_holds);
  EXPECT_LE(r.c_linf_product, r.c_bound + 1e-12);
}

TEST(ScramblingProduct, ZeroDiagonalViolatesHypotheses) {
  const auto seq = MatrixSequence::repeated(fixtures::a5(), 2);
  const auto r = scrambling_product_theorem_check(seq, 0.5, 1.0);
  EXPECT_FALSE(r.hypotheses_hold);
  EXPECT_FALSE(r.violations.empty());
}

TEST(ScramblingProduct, TwoByTwoSingleItem) {
  const Matrix a{{0.7, 0.3}, {0.4, 0.6}};
  const auto r = scrambling_product_theorem_check(MatrixSequence::finite({a}), 0.3, 1.0);
  EXPECT_TRUE(r.hypotheses_hold);
  EXPECT_TRUE(r.product_is_scrambling);
  EXPECT_GE(r.mu_product, 0.3);
}

TEST(ScramblingProduct, TooFewItems) {
  const auto seq = MatrixSequence::finite({Matrix::averaging(4), Matrix::averaging(4)});
  EXPECT_THROW(scrambling_product_theorem_check(seq, 0.25, 1.0), InvalidInput);
}

TEST(MinProductLength, A3BecomesScrambling) {
  const std::vector<Matrix> h{a3()};
  const auto m = min_contractive_product_length(h, NormKind::linf(), 10);
  ASSERT_TRUE(m.has_value());
  // Oracle: smallest power that is scrambling, by repeated multiplication.
  Matrix p = a3();
  std::size_t expected = 1;
  while (!oracle::scrambling(p)) {
    p = a3() * p;
    ++expected;
  }
  EXPECT_EQ(*m, expected);
  EXPECT_EQ(min_contractive_product_length(h, NormKind::linf(), 10, ProductPredicate::Scrambling),
            expected);
}

TEST(MinProductLength, AveragingIsImmediate) {
  const std::vector<Matrix> h{Matrix::averaging(4)};
  EXPECT_EQ(min_contractive_product_length(h, NormKind::linf(), 3), 1u);
  EXPECT_EQ(min_contractive_product_length(h, NormKind::l2(), 3), 1u);
}

TEST(MinProductLength, A2NeverScrambling) {
  const std::vector<Matrix> h{a2()};
  EXPECT_FALSE(min_contractive_product_length(h, NormKind::linf(), 10).has_value());
}

TEST(MinProductLength, AllOrderingsMustQualify) {
  // Every product containing p contracts, but I^m never does.
  const Matrix p{{1, 0}, {1, 0}};
  const Matrix id = Matrix::identity(2);
  const std::vector<Matrix> h{p, id};
  EXPECT_FALSE(min_contractive_product_length(h, NormKind::linf(), 6).has_value());
}

TEST(MinProductLength, BudgetAndPreconditions) {
  const std::vector<Matrix> h{a2(), a3(), a4()};
  EXPECT_THROW(min_contractive_product_length(h, NormKind::linf(), 20), BudgetExceeded);
  EXPECT_THROW(min_contractive_product_length(h, NormKind::l1(), 2), PreconditionViolated);
  const std::vector<Matrix> ragged{Matrix{{1, 0}, {0.5, 0.6}}};
  EXPECT_THROW(min_contractive_product_length(ragged, NormKind::linf(), 2), PreconditionViolated);
}

TEST(ErgodicityCoefficient, Examples) {
  const Matrix rank_one{{0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}};
  EXPECT_NEAR(ergodicity_coefficient(rank_one, NormKind::linf()), 1.0, 1e-15);
  EXPECT_NEAR(ergodicity_coefficient(rank_one, NormKind::l2()), 1.0, 1e-12);
  EXPECT_NEAR(ergodicity_coefficient(a4(), NormKind::linf()), oracle::mu(a4()), 1e-15);
  EXPECT_NEAR(ergodicity_coefficient(a4(), NormKind::linf()), 0.1, 1e-15);
  EXPECT_NEAR(ergodicity_coefficient(Matrix::identity(3), NormKind::linf()), 0.0, 1e-15);
}

TEST(ErgodicityCoefficient, Errors) {
  EXPECT_THROW(ergodicity_coefficient(fixtures::a1(), NormKind::linf()), PreconditionViolated);
  EXPECT_THROW(ergodicity_coefficient(a4(), NormKind::l1()), PreconditionViolated);
}

TEST(WeakErgodicity, AveragingIsImmediate) {
  const auto r = weak_ergodicity_diagnostic(MatrixSequence::repeated(Matrix::averaging(3), 20), 20,
                                            std::nullopt, NormKind::linf());
  for (double d : r.delta_of_partial_products) EXPECT_NEAR(d, 0.0, 1e-15);
  EXPECT_EQ(r.verdict, ErgodicityVerdict::ConsistentWithWeakErgodicity);
  EXPECT_EQ(r.block_len, 2u);
}

TEST(WeakErgodicity, IdentityIsInconclusive) {
  const auto r = weak_ergodicity_diagnostic(MatrixSequence::repeated(Matrix::identity(3), 20), 20,
                                            1, NormKind::linf());
  for (double d : r.delta_of_partial_products) EXPECT_DOUBLE_EQ(d, 1.0);
  for (double s : r.block_mu_c_partial_sums) EXPECT_DOUBLE_EQ(s, 0.0);
  EXPECT_EQ(r.verdict, ErgodicityVerdict::Inconclusive);
}

TEST(WeakErgodicity, RepeatedA4) {
  const std::size_t h = 200;
  const auto r =
      weak_ergodicity_diagnostic(MatrixSequence::repeated(a4(), h), h, 1, NormKind::linf());
  ASSERT_EQ(r.delta_of_partial_products.size(), h);
  for (std::size_t k = 0; k < h; ++k)
    EXPECT_LE(r.delta_of_partial_products[k], std::pow(0.9, static_cast<double>(k + 1)) + 1e-12);
  EXPECT_EQ(r.verdict, ErgodicityVerdict::ConsistentWithWeakErgodicity);
  EXPECT_EQ(r.anchors.size(), 3u);
  EXPECT_EQ(r.anchors[1].anchor, 50u);
  EXPECT_NEAR(r.block_mu_c_partial_sums.back(), 0.1 * static_cast<double>(h), 1e-9);
}

TEST(WeakErgodicity, BlocksStartAtMultiplesOfBlockLen) {
  const auto r = weak_ergodicity_diagnostic(MatrixSequence::repeated(a4(), 10), 10, 3,
                                            NormKind::linf());
  EXPECT_EQ(r.block_mu_c.size(), 3u);
  EXPECT_NEAR(r.block_mu_c[0], 1.0 - delta(a4() * a4() * a4()), 1e-12);
}

TEST(WeakErgodicity, Errors) {
  EXPECT_THROW(weak_ergodicity_diagnostic(MatrixSequence::repeated(a4(), 5), 10, 1,
                                          NormKind::linf()),
               InvalidInput);
  EXPECT_THROW(weak_ergodicity_diagnostic(MatrixSequence::repeated(fixtures::a1(), 5), 5, 1,
                                          NormKind::linf()),
               PreconditionViolated);
}
