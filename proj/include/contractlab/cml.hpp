#pragma once

// Coupled map lattice x(k+1) = A_k F_k(x(k)), F_k applying a scalar map f_k
// to every site, and the synchronization criteria built on c(A_k) * rho_k.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "contractlab/contractivity.hpp"
#include "contractlab/error.hpp"
#include "contractlab/matrix.hpp"
#include "contractlab/products.hpp"
#include "contractlab/projections.hpp"

namespace contractlab::cml {

enum class MapKind { Logistic, Tent, Affine, CustomTable };

inline std::string to_string(MapKind k) {
  switch (k) {
    case MapKind::Logistic: return "logistic";
    case MapKind::Tent: return "tent";
    case MapKind::Affine: return "affine";
    case MapKind::CustomTable: return "custom_table";
  }
  return {};
}

/// Scalar map with the domain on which its Lipschitz constant rho is valid.
struct MapDef {
  MapKind kind = MapKind::Affine;
  double a = 0.0;  // logistic parameter, tent slope, or affine slope
  double b = 0.0;  // affine offset
  /// Breakpoints (u, f(u)) of a piecewise-linear table, u strictly increasing.
  std::vector<std::pair<double, double>> table;
  double domain_lo = -std::numeric_limits<double>::infinity();
  double domain_hi = std::numeric_limits<double>::infinity();
  double rho = 0.0;
  /// True when rho was estimated from data rather than known in closed form.
  bool rho_is_estimate = false;

  bool in_domain(double u) const { return u >= domain_lo && u <= domain_hi; }

  double operator()(double u) const {
    switch (kind) {
      case MapKind::Logistic: return a * u * (1.0 - u);
      case MapKind::Tent: return a * std::min(u, 1.0 - u);
      case MapKind::Affine: return a * u + b;
      case MapKind::CustomTable: return interpolate(u);
    }
    return 0.0;
  }

 private:
  double interpolate(double u) const {
    // Linear extrapolation with the end segments outside the breakpoints.
    auto it = std::upper_bound(table.begin(), table.end(), u,
                               [](double v, const auto& p) { return v < p.first; });
    std::size_t hi = static_cast<std::size_t>(it - table.begin());
    hi = std::clamp<std::size_t>(hi, 1, table.size() - 1);
    const auto& [u0, f0] = table[hi - 1];
    const auto& [u1, f1] = table[hi];
    return f0 + (f1 - f0) * (u - u0) / (u1 - u0);
  }
};

namespace detail {
inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw InvalidInput(std::string(what) + " must be finite");
}
}  // namespace detail

/// f(u) = a u (1 - u) on [0, 1]; rho = sup |a (1 - 2u)| = a.
inline MapDef make_logistic(double a) {
  detail::require_finite(a, "logistic parameter");
  if (a < 0.0) throw InvalidInput("logistic parameter must be nonnegative");
  MapDef m;
  m.kind = MapKind::Logistic;
  m.a = a;
  m.domain_lo = 0.0;
  m.domain_hi = 1.0;
  m.rho = a;
  return m;
}

/// f(u) = s min(u, 1 - u) on [0, 1]; rho = s.
inline MapDef make_tent(double s) {
  detail::require_finite(s, "tent slope");
  if (s < 0.0) throw InvalidInput("tent slope must be nonnegative");
  MapDef m;
  m.kind = MapKind::Tent;
  m.a = s;
  m.domain_lo = 0.0;
  m.domain_hi = 1.0;
  m.rho = s;
  return m;
}

/// f(u) = a u + b on the real line; rho = |a|.
inline MapDef make_affine(double a, double b) {
  detail::require_finite(a, "affine slope");
  detail::require_finite(b, "affine offset");
  MapDef m;
  m.kind = MapKind::Affine;
  m.a = a;
  m.b = b;
  m.rho = std::abs(a);
  return m;
}

/// Piecewise-linear interpolant of the table on [u_first, u_last]; rho is the
/// largest finite-difference slope between consecutive breakpoints.
inline MapDef make_custom_table(std::vector<std::pair<double, double>> table) {
  if (table.size() < 2) throw InvalidInput("custom map table needs at least two points");
  for (std::size_t i = 0; i < table.size(); ++i) {
    detail::require_finite(table[i].first, "table abscissa");
    detail::require_finite(table[i].second, "table value");
    if (i > 0 && !(table[i].first > table[i - 1].first))
      throw InvalidInput("table abscissae must be strictly increasing");
  }
  MapDef m;
  m.kind = MapKind::CustomTable;
  for (std::size_t i = 1; i < table.size(); ++i)
    m.rho = std::max(m.rho, std::abs((table[i].second - table[i - 1].second) /
                                     (table[i].first - table[i - 1].first)));
  m.domain_lo = table.front().first;
  m.domain_hi = table.back().first;
  m.rho_is_estimate = true;
  m.table = std::move(table);
  return m;
}

struct SimulationOptions {
  double sync_tol = 1e-10;
  double row_sum_tol = kDefaultRowSumTol;
  bool keep_states = true;
};

struct SimTrace {
  /// x(0), x(1), ... (empty when keep_states is false).
  std::vector<Vector> states;
  /// d(x(k), X*) for every simulated k.
  std::vector<double> distances;
  /// d(x(0), X*) * prod_{j<k} c(A_j) rho_j; empty entries where no
  /// coefficient is available or the guarantee was voided by a domain exit.
  std::vector<std::optional<double>> bound;
  /// c(A_k) under the simulation norm (NaN where unavailable).
  std::vector<double> c_values;
  std::vector<double> rho_values;
  /// Steps k at which some x_i(k) was outside the map's declared domain.
  std::vector<std::size_t> domain_exits;
  std::optional<std::size_t> synchronized_at;
  /// First k where the envelope drops below sync_tol.
  std::optional<std::size_t> envelope_sync_step;
  bool diverged = false;
  std::optional<std::size_t> diverged_at;
  /// Every available bound entry dominates the simulated distance (+1e-8).
  bool envelope_holds = true;
  /// Number of simulated steps (transitions).
  std::size_t steps = 0;
};

namespace detail {

inline std::optional<double> coefficient(const Matrix& a, const NormKind& norm,
                                         double row_sum_tol) {
  switch (norm.tag()) {
    case NormKind::Tag::Linf: return contractivity_linf(a, row_sum_tol).c;
    case NormKind::Tag::L2: return contractivity_l2(a, row_sum_tol).c;
    case NormKind::Tag::WeightedL2:
      return contractivity_weighted_bound(a, norm.weights(), row_sum_tol).c;
    case NormKind::Tag::L1: return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace detail

inline constexpr double kEnvelopeTol = 1e-8;

/// Iterates x(k+1) = A_k F_k(x(k)) for `steps` transitions. Both the matrix
/// sequence and the map list wrap around when shorter than `steps`.
inline SimTrace simulate(const MatrixSequence& a_seq, const std::vector<MapDef>& maps,
                         const Vector& x0, std::size_t steps, const NormKind& norm,
                         const SimulationOptions& opts = {}) {
  if (maps.empty()) throw InvalidInput("at least one map is required");
  if (x0.size() != a_seq.n())
    throw InvalidInput("x0 has length " + std::to_string(x0.size()) + ", matrices are " +
                       std::to_string(a_seq.n()) + "x" + std::to_string(a_seq.n()));
  for (double v : x0)
    if (!std::isfinite(v)) throw InvalidInput("x0 entries must be finite");
  norm.check_dimension(x0.size());

  SimTrace t;
  Vector x = x0;
  const double d0 = distance_to_diagonal(x, norm);
  t.distances.push_back(d0);
  t.bound.emplace_back(d0);
  if (opts.keep_states) t.states.push_back(x);
  if (d0 < opts.sync_tol) t.synchronized_at = 0;
  if (d0 < opts.sync_tol) t.envelope_sync_step = 0;

  // Coefficients of a finite list are computed once per distinct item.
  std::vector<std::optional<double>> cached;
  const auto period = a_seq.is_generated() ? std::nullopt : a_seq.length();
  if (period) cached.resize(*period);
  std::vector<bool> have(cached.size(), false);

  std::optional<double> envelope = d0;
  for (std::size_t k = 0; k < steps; ++k) {
    const Matrix a = a_seq.cyclic_at(k);
    if (!a.row_sum_profile(opts.row_sum_tol).is_constant)
      throw PreconditionViolated("coupling matrix at step " + std::to_string(k) +
                                 " does not have constant row sums");
    std::optional<double> c;
    if (period) {
      const std::size_t slot = k % *period;
      if (!have[slot]) {
        cached[slot] = detail::coefficient(a, norm, opts.row_sum_tol);
        have[slot] = true;
      }
      c = cached[slot];
    } else {
      c = detail::coefficient(a, norm, opts.row_sum_tol);
    }
    const MapDef& f = maps[k % maps.size()];
    t.c_values.push_back(c.value_or(std::numeric_limits<double>::quiet_NaN()));
    t.rho_values.push_back(f.rho);

    bool exited = false;
    Vector fx(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      exited = exited || !f.in_domain(x[i]);
      fx[i] = f(x[i]);
    }
    if (exited) t.domain_exits.push_back(k);
    x = a * fx;
    t.steps = k + 1;

    if (!std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); })) {
      t.diverged = true;
      t.diverged_at = k + 1;
      break;
    }
    if (opts.keep_states) t.states.push_back(x);
    const double d = distance_to_diagonal(x, norm);
    t.distances.push_back(d);

    if (envelope && c && !exited) envelope = *envelope * *c * f.rho;
    else envelope.reset();
    t.bound.push_back(envelope);
    if (envelope && *envelope + kEnvelopeTol < d) t.envelope_holds = false;
    if (!t.synchronized_at && d < opts.sync_tol) t.synchronized_at = k + 1;
    if (!t.envelope_sync_step && envelope && *envelope < opts.sync_tol)
      t.envelope_sync_step = k + 1;
  }
  return t;
}

struct SyncCheck {
  bool criterion_holds_over_horizon = false;
  std::vector<double> running_product;
};

/// Running products of c(A_k) rho_k over the horizon; finite-horizon
/// surrogate for prod_k c(A_k) rho_k -> 0 (final product < threshold).
inline SyncCheck check_sync_condition(std::span<const double> c_values,
                                      std::span<const double> rho_values, std::size_t horizon,
                                      double threshold = kProductToZeroThreshold) {
  if (c_values.size() < horizon || rho_values.size() < horizon)
    throw InvalidInput("c and rho sequences must have at least `horizon` entries");
  SyncCheck out;
  double p = 1.0;
  for (std::size_t k = 0; k < horizon; ++k) {
    if (!(c_values[k] >= 0.0) || !(rho_values[k] >= 0.0) || !std::isfinite(c_values[k]) ||
        !std::isfinite(rho_values[k]))
      throw InvalidInput("c and rho values must be finite and nonnegative");
    p *= c_values[k] * rho_values[k];
    out.running_product.push_back(p);
  }
  out.criterion_holds_over_horizon = horizon > 0 && p < threshold;
  return out;
}

struct CorollaryCheck {
  bool holds = false;
  /// sup_k r(A_k) - mu(A_k) - 1/rho_k
  double sup_value = 0.0;
};

/// sup_k r(A_k) - mu(A_k) - 1/rho_k < 0 over the given family. `rho_values`
/// has one entry per matrix or a single entry applied to all.
inline CorollaryCheck check_sync_corollary(std::span<const Matrix> family,
                                           std::span<const double> rho_values,
                                           double row_sum_tol = kDefaultRowSumTol) {
  if (family.empty()) throw InvalidInput("matrix family must be nonempty");
  if (rho_values.size() != family.size() && rho_values.size() != 1)
    throw InvalidInput("rho_values must have one entry per matrix or a single entry");
  CorollaryCheck out;
  out.sup_value = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < family.size(); ++k) {
    const double rho = rho_values.size() == 1 ? rho_values[0] : rho_values[k];
    if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidInput("rho must be positive and finite");
    const auto profile = family[k].row_sum_profile(row_sum_tol);
    if (!profile.is_constant)
      throw PreconditionViolated("matrix " + std::to_string(k) + " does not have constant row sums");
    out.sup_value = std::max(out.sup_value, profile.r - mu(family[k]) - 1.0 / rho);
  }
  out.holds = out.sup_value < 0.0;
  return out;
}

inline CorollaryCheck check_sync_corollary(const MatrixSequence& seq,
                                           std::span<const double> rho_values,
                                           double row_sum_tol = kDefaultRowSumTol) {
  const auto period = seq.period();
  if (!period)
    throw InvalidInput("generated sequence needs a period to evaluate the corollary");
  const auto family = seq.take(*period);
  return check_sync_corollary(family, rho_values, row_sum_tol);
}

}  // namespace contractlab::cml
