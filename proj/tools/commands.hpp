#pragma once

// Subcommand implementations for the contractlab CLI. Every command is a
// pure function of its inputs and options and returns a JSON report.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "contractlab/contractlab.hpp"
#include "contractlab/io.hpp"

namespace contractlab::cli {

using io::json;
using io::number;
namespace fs = std::filesystem;

struct Options {
  std::string norm = "linf";
  std::optional<std::string> weights;
  double zero_tol = kDefaultZeroTol;
  double row_sum_tol = kDefaultRowSumTol;
  std::optional<std::uint64_t> seed;
  std::size_t samples = 100000;
  std::optional<std::size_t> horizon;
  std::optional<std::size_t> block_len;
  std::optional<std::size_t> steps;
  std::optional<double> sync_tol;
  std::optional<std::string> norm_override;  // --norm given explicitly
  unsigned jobs = 1;
};

inline NormKind norm_from(const std::string& name, const Options& o) {
  Vector w;
  if (o.weights) w = io::load_vector_or_list(*o.weights);
  else if (name == "wl2") throw InvalidInput("--norm wl2 requires --weights");
  return NormKind::parse(name, w);
}

inline NormKind norm_from(const Options& o) { return norm_from(o.norm, o); }

inline double inf_norm(const Matrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.n(); ++i) {
    double s = 0.0;
    for (double v : a.row(i)) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

inline std::string verdict_string(const ContractivityReport& r) {
  const std::string tag = " (" + r.norm.name() + (r.is_bound_only ? ", bound" : "") + ")";
  if (r.is_set_contractive) return "set-contractive" + tag;
  if (r.is_set_nonexpansive) return "set-nonexpansive" + tag;
  return r.is_bound_only ? "bound inconclusive" + tag : "not set-nonexpansive" + tag;
}

// ---- analyze --------------------------------------------------------------

inline json analyze(const Matrix& a, const Options& o) {
  json r;
  const auto profile = a.row_sum_profile(o.row_sum_tol);
  const auto g = interaction_digraph(a);
  const auto tree = has_spanning_directed_tree(g);
  const bool stochastic = is_stochastic(a, o.row_sum_tol);
  json cls = json::array();

  r["n"] = a.n();
  r["row_sums"] = io::to_json(profile);
  r["stochastic"] = stochastic;
  r["nonnegative"] = is_nonnegative(a);
  r["scrambling"] = is_scrambling(a);
  r["mu"] = number(mu(a));
  r["delta"] = number(delta(a));
  r["norm_inf"] = number(inf_norm(a));
  r["spectral_norm_2"] = number(spectral_norm_2(a));
  r["digraph"] = io::to_json(g);
  r["spanning_tree"] = tree.exists;
  r["spanning_tree_root"] = tree.root ? json(*tree.root) : json(nullptr);
  r["irreducible"] = is_irreducible(g);
  r["paracontractive_l2"] = is_paracontractive_l2(a);

  if (stochastic) cls.push_back("stochastic");
  else if (profile.is_constant) cls.push_back("constant row sums");
  else cls.push_back("non-constant row sums");
  cls.push_back(is_scrambling(a) ? "scrambling" : "not scrambling");
  cls.push_back(tree.exists ? "spanning directed tree (root " + std::to_string(*tree.root) + ")"
                            : "no spanning directed tree");
  if (is_irreducible(g)) cls.push_back("irreducible");

  if (profile.is_constant) {
    const auto linf = contractivity_linf(a, o.row_sum_tol);
    const auto l2 = contractivity_l2(a, o.row_sum_tol);
    r["c_linf"] = number(linf.c);
    r["c_l2"] = number(l2.c);
    r["norm_AK_2"] = number(ak_norm_2(a, o.row_sum_tol));
    r["set_nonexpansive_linf"] = linf.is_set_nonexpansive;
    r["set_contractive_linf"] = linf.is_set_contractive;
    r["set_nonexpansive_l2"] = l2.is_set_nonexpansive;
    r["set_contractive_l2"] = l2.is_set_contractive;
    cls.push_back(verdict_string(linf));
    cls.push_back(verdict_string(l2));
    if (o.weights) {
      const auto wb = contractivity_weighted_bound(a, io::load_vector_or_list(*o.weights), o.row_sum_tol);
      r["c_wl2_bound"] = number(wb.c);
      r["weights"] = io::numbers(wb.norm.weights());
      cls.push_back(verdict_string(wb));
    }
    r["note"] = nullptr;
  } else {
    r["c_linf"] = nullptr;
    r["c_l2"] = nullptr;
    r["norm_AK_2"] = nullptr;
    r["set_nonexpansive_linf"] = nullptr;
    r["set_contractive_linf"] = nullptr;
    r["set_nonexpansive_l2"] = nullptr;
    r["set_contractive_l2"] = nullptr;
    r["note"] =
        "row sums are not constant: the diagonal is not invariant, so set-contractivity "
        "toward it is undefined";
  }
  if (stochastic) {
    const bool pseudo = is_pseudocontractive_stochastic_linf(a, o.row_sum_tol);
    r["pseudocontractive_linf"] = pseudo;
    if (pseudo) cls.push_back("pseudocontractive (linf)");
  } else {
    r["pseudocontractive_linf"] = nullptr;
  }
  if (r["paracontractive_l2"].get<bool>()) cls.push_back("paracontracting (l2)");
  r["classification"] = cls;
  return r;
}

struct FileResult {
  std::string file;
  std::optional<json> report;
  std::string error;
  int exit_code = 0;
};

/// Analyzes every file; up to `jobs` files run concurrently. Results keep
/// input order.
inline std::vector<FileResult> analyze_files(const std::vector<std::string>& files, const Options& o) {
  std::vector<FileResult> out(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      out[i].file = files[i];
      try {
        out[i].report = analyze(io::load_matrix(files[i], o.zero_tol), o);
      } catch (const NumericalFailure& e) {
        out[i].error = e.what();
        out[i].exit_code = 3;
      } catch (const Error& e) {
        out[i].error = e.what();
        out[i].exit_code = 2;
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(o.jobs, static_cast<unsigned>(files.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

// ---- contractivity --------------------------------------------------------

inline json contractivity_cmd(const Matrix& a, const Options& o) {
  const auto norm = norm_from(o);
  ContractivityOptions copts;
  copts.row_sum_tol = o.row_sum_tol;
  copts.samples = o.samples;
  copts.seed = o.seed.value_or(0);
  const auto rep = contractivity(a, norm, copts);
  json r = io::to_json(rep);
  r["n"] = a.n();
  r["verdict"] = verdict_string(rep);
  if (norm.tag() == NormKind::Tag::L1) {
    r["note"] = "no closed form under l1; c is a sampled lower estimate";
    r["samples"] = o.samples;
  } else if (o.samples > 0) {
    r["empirical_lower_estimate"] =
        number(empirical_contractivity(a, norm, o.samples, copts.seed, std::max(1u, o.jobs), o.row_sum_tol));
    r["samples"] = o.samples;
  }
  if (norm.tag() == NormKind::Tag::Linf && a.n() <= 16 && a.n() >= 2)
    r["binary_vector_oracle"] = number(binary_vector_contractivity(a, norm));
  return r;
}

// ---- product / ergodicity -------------------------------------------------

/// Finite view of a sequence: its own length, or `horizon` items of an
/// unbounded generator.
inline MatrixSequence finite_view(const MatrixSequence& seq, std::optional<std::size_t> horizon) {
  if (seq.length()) {
    if (horizon && *horizon < *seq.length()) return MatrixSequence::finite(seq.take(*horizon));
    return seq;
  }
  if (!horizon) throw InvalidInput("unbounded generated sequence needs --horizon or a \"length\"");
  return MatrixSequence::finite(seq.take(*horizon));
}

inline json product_cmd(const MatrixSequence& full, const Options& o) {
  const auto norm = norm_from(o);
  const auto seq = finite_view(full, o.horizon);
  const std::size_t len = *seq.length();
  ContractivityOptions copts;
  copts.row_sum_tol = o.row_sum_tol;
  copts.samples = o.samples;
  copts.seed = o.seed.value_or(0);

  json r;
  r["n"] = seq.n();
  r["length"] = len;
  r["norm"] = io::to_json(norm);
  const Matrix p = product(seq, 0, len - 1);
  r["product"] = io::to_json(p.dense());
  const auto pc = product_contractivity_bound(seq, norm, copts);
  r["c_exact"] = number(pc.c_exact);
  r["c_bound"] = number(pc.c_bound);
  r["factor_c"] = io::numbers(pc.factor_c);
  r["method"] = to_string(pc.method);
  r["submultiplicative_holds"] = pc.c_exact <= pc.c_bound + 1e-10;
  const auto conv = check_convergence_condition(pc.factor_c, len);
  r["convergence"] = {{"horizon", len},
                      {"threshold", kProductToZeroThreshold},
                      {"running_products", io::numbers(conv.running_products)},
                      {"converges_to_zero_over_horizon", conv.converges_to_zero_over_horizon},
                      {"note", "finite-horizon surrogate for a limit; not a proof"}};

  const std::size_t n = seq.n();
  if (n >= 2 && len >= n - 1) {
    double eps = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const Matrix a = seq.at(k);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (a.is_nonzero(i, j)) eps = std::min(eps, std::abs(a(i, j)));
    }
    const auto rs = seq.at(0).row_sum_profile(o.row_sum_tol);
    if (std::isfinite(eps) && rs.is_constant) {
      const auto chk = scrambling_product_theorem_check(seq, eps, rs.r, o.row_sum_tol);
      r["scrambling_product"] = {{"epsilon", number(eps)},
                                 {"r", number(rs.r)},
                                 {"hypotheses_hold", chk.hypotheses_hold},
                                 {"violations", chk.violations},
                                 {"product_is_scrambling", chk.product_is_scrambling},
                                 {"mu_product", number(chk.mu_product)},
                                 {"mu_lower_bound", number(chk.mu_lower_bound)},
                                 {"mu_bound_holds", chk.mu_bound_holds},
                                 {"c_linf_product", number(chk.c_linf_product)},
                                 {"c_bound", number(chk.c_bound)}};
    }
  }
  return r;
}

inline json ergodicity_cmd(const MatrixSequence& seq, const Options& o) {
  const auto norm = norm_from(o);
  std::size_t horizon = 0;
  if (o.horizon) horizon = *o.horizon;
  else if (seq.length()) horizon = *seq.length();
  else throw InvalidInput("unbounded generated sequence needs --horizon or a \"length\"");
  const auto rep = weak_ergodicity_diagnostic(seq, horizon, o.block_len, norm, o.row_sum_tol);
  json r = io::to_json(rep);
  r["norm"] = io::to_json(norm);
  r["n"] = seq.n();
  return r;
}

// ---- decompose ------------------------------------------------------------

inline json decompose_cmd(const Matrix& a, const Vector& x, const Options& o) {
  const auto d = decompose_affine(a, x, o.row_sum_tol);
  const Vector ax = a * x;
  const Vector bx = d.b * x;
  double residual = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i)
    residual = std::max(residual, std::abs(bx[i] + d.xstar[i] - ax[i]));
  const auto linf = contractivity_linf(a, o.row_sum_tol);
  json r;
  r["n"] = a.n();
  r["b"] = io::to_json(d.b.dense());
  r["xstar_alpha"] = number(d.xstar_alpha);
  r["xstar"] = io::numbers(d.xstar);
  r["residual_inf"] = number(residual);
  r["b_stochastic"] = is_stochastic(d.b, 1e-9);
  r["b_scrambling"] = is_scrambling(d.b);
  r["a_set_contractive_linf"] = linf.is_set_contractive;
  r["x_on_diagonal"] = distance_to_diagonal(x, NormKind::linf()) == 0.0;
  return r;
}

// ---- reproduce-paper ------------------------------------------------------

inline json reproduce_cmd(bool& all_pass) {
  json rows = json::array();
  all_pass = true;
  for (const auto& c : fixtures::reference_checks()) {
    all_pass = all_pass && c.pass;
    json row{{"id", c.id},
             {"quantity", c.quantity},
             {"kind", fixtures::to_string(c.kind)},
             {"computed", number(c.computed)},
             {"pass", c.pass}};
    if (c.kind == fixtures::ReferenceCheck::Kind::Bool) {
      row["expected"] = c.expected != 0.0;
      row["computed"] = c.computed != 0.0;
    } else {
      row["expected"] = number(c.expected);
    }
    row["tol"] = c.kind == fixtures::ReferenceCheck::Kind::Approx ? number(c.tol) : json(nullptr);
    rows.push_back(row);
  }
  return json{{"checks", rows}, {"all_pass", all_pass}};
}

// ---- simulate -------------------------------------------------------------

struct SimConfig {
  std::optional<MatrixSequence> seq;
  std::vector<cml::MapDef> maps;
  Vector x0;
  std::size_t steps = 0;
  NormKind norm = NormKind::linf();
  double sync_tol = 1e-10;
  fs::path trace;
  std::optional<fs::path> csv;
  bool dump_states = false;
};

inline const std::vector<std::string>& sim_config_fields() {
  static const std::vector<std::string> fields{"matrix", "sequence", "map",   "maps",
                                               "x0",     "steps",    "norm",  "weights",
                                               "sync_tol", "trace",  "csv",   "dump_states"};
  return fields;
}

/// Parses a simulate config. Errors name the file, the field, and (for JSON
/// syntax errors) the line and column.
inline SimConfig parse_sim_config(const fs::path& path, const Options& o) {
  const std::string src = path.string();
  const json j = io::parse_json(io::read_file(path), src);
  if (!j.is_object()) throw io::ParseError(src + ": config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (std::find(sim_config_fields().begin(), sim_config_fields().end(), key) == sim_config_fields().end())
      throw io::ParseError(src + ": unknown field \"" + key + "\"");
  const fs::path dir = path.parent_path();
  auto field = [&](const std::string& k) { return src + ": field \"" + k + "\""; };

  SimConfig c;
  if (j.contains("matrix") == j.contains("sequence"))
    throw io::ParseError(src + ": exactly one of \"matrix\" or \"sequence\" is required");
  if (j.contains("matrix")) {
    c.seq = MatrixSequence::finite({io::matrix_ref_from_json(j.at("matrix"), dir, field("matrix"), o.zero_tol)});
  } else {
    const auto& s = j.at("sequence");
    if (s.is_string()) c.seq = io::load_sequence(io::detail::resolve(dir, s.get<std::string>()), o.zero_tol);
    else c.seq = io::sequence_from_json(s, dir, field("sequence"), o.zero_tol);
  }

  if (j.contains("map") == j.contains("maps"))
    throw io::ParseError(src + ": exactly one of \"map\" or \"maps\" is required");
  if (j.contains("map")) {
    c.maps.push_back(io::map_from_json(j.at("map"), field("map")));
  } else {
    const auto& ms = j.at("maps");
    if (!ms.is_array() || ms.empty()) throw io::ParseError(field("maps") + ": expected a nonempty array");
    for (std::size_t i = 0; i < ms.size(); ++i)
      c.maps.push_back(io::map_from_json(ms[i], field("maps") + "[" + std::to_string(i) + "]"));
  }

  if (!j.contains("x0")) throw io::ParseError(src + ": missing field \"x0\"");
  const auto& x0 = j.at("x0");
  if (x0.is_array()) {
    c.x0 = io::vector_from_json(x0, field("x0"));
  } else if (x0.is_string()) {
    c.x0 = io::load_vector(io::detail::resolve(dir, x0.get<std::string>()));
  } else if (x0.is_object() && x0.contains("random")) {
    const auto& rnd = x0.at("random");
    if (!rnd.is_object()) throw io::ParseError(field("x0") + ": \"random\" must be an object");
    const double lo = rnd.contains("lo") ? io::get_number(rnd.at("lo"), field("x0.random.lo")) : 0.0;
    const double hi = rnd.contains("hi") ? io::get_number(rnd.at("hi"), field("x0.random.hi")) : 1.0;
    if (!(lo < hi)) throw io::ParseError(field("x0.random") + ": need lo < hi");
    std::uint64_t seed = o.seed.value_or(0);
    if (rnd.contains("seed")) {
      if (!rnd.at("seed").is_number_unsigned())
        throw io::ParseError(field("x0.random.seed") + ": expected a nonnegative integer");
      if (!o.seed) seed = rnd.at("seed").get<std::uint64_t>();
    }
    auto gen = random::keyed_engine(seed, 0);
    c.x0.resize(c.seq->n());
    for (double& v : c.x0) v = random::uniform(gen, lo, hi);
  } else {
    throw io::ParseError(field("x0") + ": expected an array, a path, or {\"random\": {...}}");
  }

  if (o.steps) {
    c.steps = *o.steps;
  } else {
    if (!j.contains("steps")) throw io::ParseError(src + ": missing field \"steps\"");
    if (!j.at("steps").is_number_unsigned())
      throw io::ParseError(field("steps") + ": expected a nonnegative integer");
    c.steps = j.at("steps").get<std::size_t>();
  }

  std::string norm_name = "linf";
  if (j.contains("norm")) {
    if (!j.at("norm").is_string()) throw io::ParseError(field("norm") + ": expected a string");
    norm_name = j.at("norm").get<std::string>();
  }
  if (o.norm_override) norm_name = *o.norm_override;
  Vector weights;
  if (o.weights) weights = io::load_vector_or_list(*o.weights);
  else if (j.contains("weights")) weights = io::vector_from_json(j.at("weights"), field("weights"));
  try {
    c.norm = NormKind::parse(norm_name, weights);
  } catch (const InvalidInput& e) {
    throw io::ParseError(field("norm") + ": " + e.what());
  }

  if (o.sync_tol) c.sync_tol = *o.sync_tol;
  else if (j.contains("sync_tol")) c.sync_tol = io::get_number(j.at("sync_tol"), field("sync_tol"));
  if (!(c.sync_tol > 0.0)) throw io::ParseError(field("sync_tol") + ": must be positive");

  if (j.contains("trace")) {
    if (!j.at("trace").is_string()) throw io::ParseError(field("trace") + ": expected a path");
    c.trace = io::detail::resolve(dir, j.at("trace").get<std::string>());
  } else {
    c.trace = path;
    c.trace.replace_extension(".trace.jsonl");
  }
  if (j.contains("csv")) {
    if (!j.at("csv").is_string()) throw io::ParseError(field("csv") + ": expected a path");
    c.csv = io::detail::resolve(dir, j.at("csv").get<std::string>());
  }
  if (j.contains("dump_states")) {
    if (!j.at("dump_states").is_boolean()) throw io::ParseError(field("dump_states") + ": expected a boolean");
    c.dump_states = j.at("dump_states").get<bool>();
  }
  return c;
}

inline json simulate_summary(const SimConfig& c, const cml::SimTrace& t) {
  json r;
  r["n"] = c.x0.size();
  r["steps"] = t.steps;
  r["norm"] = io::to_json(c.norm);
  r["sync_tol"] = c.sync_tol;
  r["synchronized"] = t.synchronized_at.has_value();
  r["synchronized_at"] = t.synchronized_at ? json(*t.synchronized_at) : json(nullptr);
  r["message"] = t.synchronized_at ? "synchronized at step " + std::to_string(*t.synchronized_at)
                                   : std::string("not synchronized within horizon");
  r["initial_distance"] = number(t.distances.front());
  r["final_distance"] = number(t.distances.back());
  r["diverged"] = t.diverged;
  r["diverged_at"] = t.diverged_at ? json(*t.diverged_at) : json(nullptr);
  r["domain_exits"] = t.domain_exits.size();
  r["first_domain_exit"] = t.domain_exits.empty() ? json(nullptr) : json(t.domain_exits.front());
  const bool coefficients = std::none_of(t.c_values.begin(), t.c_values.end(),
                                         [](double v) { return std::isnan(v); });
  r["envelope_valid"] = coefficients && t.domain_exits.empty() && !t.diverged;
  r["envelope_holds"] = t.envelope_holds;
  r["envelope_sync_step"] = t.envelope_sync_step ? json(*t.envelope_sync_step) : json(nullptr);
  r["final_bound"] = number(t.bound.back());

  if (coefficients && t.steps > 0) {
    const auto sc = cml::check_sync_condition(t.c_values, t.rho_values, t.steps);
    r["sync_condition"] = {{"final_product", number(sc.running_product.back())},
                           {"criterion_holds_over_horizon", sc.criterion_holds_over_horizon}};
  } else {
    r["sync_condition"] = nullptr;
  }
  if (c.seq->period()) {
    double rho = 0.0;
    for (const auto& m : c.maps) rho = std::max(rho, m.rho);
    const std::vector<double> rhos{rho};
    const auto cc = cml::check_sync_corollary(*c.seq, rhos);
    r["corollary"] = {{"holds", cc.holds}, {"sup_value", number(cc.sup_value)}, {"rho", number(rho)}};
  } else {
    r["corollary"] = nullptr;
  }
  r["rho_is_estimate"] = std::any_of(c.maps.begin(), c.maps.end(),
                                     [](const cml::MapDef& m) { return m.rho_is_estimate; });
  r["trace"] = c.trace.string();
  r["csv"] = c.csv ? json(c.csv->string()) : json(nullptr);
  return r;
}

inline void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput(path.string() + ": cannot write file");
  out << content;
}

inline json simulate_cmd(const fs::path& config_path, const Options& o) {
  const auto c = parse_sim_config(config_path, o);
  cml::SimulationOptions sopts;
  sopts.sync_tol = c.sync_tol;
  sopts.row_sum_tol = o.row_sum_tol;
  sopts.keep_states = c.dump_states;
  const auto t = cml::simulate(*c.seq, c.maps, c.x0, c.steps, c.norm, sopts);
  write_file(c.trace, io::trace_jsonl(t, c.dump_states));
  if (c.csv) write_file(*c.csv, io::trace_csv(t));
  return simulate_summary(c, t);
}

// ---- rendering ------------------------------------------------------------

inline std::string render_json(const json& j) { return j.dump(2) + "\n"; }

/// Human-readable rendering: one "key: value" line per top-level field, or a
/// table for reproduction checks.
inline std::string render_pretty(const json& j) {
  std::string out;
  if (j.is_object() && j.contains("checks")) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-4s %-34s %-14s %-14s %-8s %s\n", "id", "quantity", "expected",
                  "computed", "tol", "result");
    out += buf;
    for (const auto& row : j.at("checks")) {
      std::snprintf(buf, sizeof buf, "%-4s %-34s %-14s %-14s %-8s %s\n",
                    row["id"].get<std::string>().c_str(), row["quantity"].get<std::string>().c_str(),
                    row["expected"].dump().c_str(), row["computed"].dump().c_str(),
                    row["tol"].dump().c_str(), row["pass"].get<bool>() ? "pass" : "FAIL");
      out += buf;
    }
    out += j.at("all_pass").get<bool>() ? "all checks pass\n" : "some checks FAILED\n";
    return out;
  }
  if (j.is_array()) {
    for (const auto& item : j) out += render_pretty(item) + "\n";
    return out;
  }
  for (const auto& [key, value] : j.items())
    out += key + ": " + (value.is_string() ? value.get<std::string>() : value.dump()) + "\n";
  return out;
}

}  // namespace contractlab::cli
