#pragma once

// The worked-example matrices and the reference-value table checked by
// `contractlab reproduce-paper`.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "contractlab/contractivity.hpp"
#include "contractlab/graphs.hpp"
#include "contractlab/linalg.hpp"
#include "contractlab/matrix.hpp"

namespace contractlab::fixtures {

inline Matrix m0() { return Matrix{{0.5, 0.0, 0.5}, {0.5, 0.5, 0.0}, {0.5, 0.0, 0.5}}; }
inline Matrix a1() { return Matrix{{1.1, 0.0, 0.0}, {0.6, 0.5, 0.0}, {0.6, 0.0, 0.5}}; }
inline Matrix a2() { return Matrix{{0.4, 0.3, 0.3}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}; }
inline Matrix a3() { return Matrix{{1.0, 0.0, 0.0}, {0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}}; }
inline Matrix a4() { return Matrix{{1.0, 0.0, 0.0}, {0.9, 0.1, 0.0}, {0.1, 0.1, 0.8}}; }
inline Matrix a5() { return Matrix{{0.0, 0.5, 0.5}, {1.0, 0.0, 0.0}, {0.5, 0.5, 0.0}}; }
inline Vector a4_weights() { return {1.0, 0.2265, 1.0}; }

/// One reference comparison. Boolean checks use expected/computed in {0, 1}
/// with tol 0; "less than" checks store the bound in `expected`.
struct ReferenceCheck {
  std::string id;
  std::string quantity;
  enum class Kind { Approx, Bool, LessThan, GreaterThan } kind = Kind::Approx;
  double expected = 0.0;
  double computed = 0.0;
  double tol = 0.0;
  bool pass = false;
};

inline std::string to_string(ReferenceCheck::Kind k) {
  switch (k) {
    case ReferenceCheck::Kind::Approx: return "approx";
    case ReferenceCheck::Kind::Bool: return "bool";
    case ReferenceCheck::Kind::LessThan: return "less_than";
    case ReferenceCheck::Kind::GreaterThan: return "greater_than";
  }
  return "?";
}

/// Tolerance for values the reference states exactly.
inline constexpr double kExactTol = 1e-12;

inline std::vector<ReferenceCheck> reference_checks() {
  std::vector<ReferenceCheck> out;
  auto approx = [&](std::string id, std::string q, double expected, double computed, double tol) {
    out.push_back({std::move(id), std::move(q), ReferenceCheck::Kind::Approx, expected, computed, tol,
                   std::abs(computed - expected) <= tol});
  };
  auto flag = [&](std::string id, std::string q, bool expected, bool computed) {
    out.push_back({std::move(id), std::move(q), ReferenceCheck::Kind::Bool, expected ? 1.0 : 0.0,
                   computed ? 1.0 : 0.0, 0.0, expected == computed});
  };
  auto less = [&](std::string id, std::string q, double bound, double computed) {
    out.push_back({std::move(id), std::move(q), ReferenceCheck::Kind::LessThan, bound, computed, 0.0,
                   computed < bound});
  };
  auto greater = [&](std::string id, std::string q, double bound, double computed) {
    out.push_back({std::move(id), std::move(q), ReferenceCheck::Kind::GreaterThan, bound, computed,
                   0.0, computed > bound});
  };

  const auto M0 = m0();
  approx("M0", "spectral_norm_2", 1.088, spectral_norm_2(M0), 1e-3);
  greater("M0", "spectral_norm_2 > 1", 1.0, spectral_norm_2(M0));

  const auto A1 = a1();
  approx("A1", "mu", 0.6, mu(A1), kExactTol);
  approx("A1", "c_linf", 0.5, contractivity_linf(A1).c, kExactTol);
  flag("A1", "set_contractive_linf", true, contractivity_linf(A1).is_set_contractive);

  const auto A2 = a2();
  approx("A2", "norm_2(A K)", 1.0, ak_norm_2(A2), 1e-6);
  flag("A2", "spanning_tree", false, has_spanning_directed_tree(interaction_digraph(A2)).exists);

  const auto A3 = a3();
  approx("A3", "norm_2(A K)", 0.939, ak_norm_2(A3), 1e-3);
  flag("A3", "scrambling", false, is_scrambling(A3));

  const auto A4 = a4();
  approx("A4", "norm_2(A K)", 1.125, ak_norm_2(A4), 1e-3);
  flag("A4", "scrambling", true, is_scrambling(A4));
  flag("A4", "spanning_tree", true, has_spanning_directed_tree(interaction_digraph(A4)).exists);
  less("A4", "weighted bound, w=(1,0.2265,1)", 1.0, contractivity_weighted_bound(A4, a4_weights()).c);

  const auto A5 = a5();
  approx("A5", "norm_2(A K)", 0.939, ak_norm_2(A5), 1e-3);
  flag("A5", "scrambling", false, is_scrambling(A5));
  return out;
}

}  // namespace contractlab::fixtures
