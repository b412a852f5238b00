#pragma once

// File formats and JSON serialization.
//
//   matrix    {"rows": [[...], ...]}  or CSV, one row per line
//   vector    JSON array of numbers   or single-column CSV
//   sequence  {"matrices": [path | {"rows": ...}, ...], "repeat": k}
//             {"generator": {"kind": "random_stochastic_spanning_tree",
//                            "n": n, "seed": s, "min_entry": eps, ...}}
//
// Numbers in reports are rounded to 12 significant digits.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "contractlab/cml.hpp"
#include "contractlab/contractivity.hpp"
#include "contractlab/error.hpp"
#include "contractlab/graphs.hpp"
#include "contractlab/matrix.hpp"
#include "contractlab/products.hpp"
#include "json.hpp"

namespace contractlab::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

/// Input file that could not be read or parsed; the message carries the
/// location ("path:line:col: ...") when known.
class ParseError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

inline double round_sig(double v, int digits = 12) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return std::strtod(buf, nullptr);
}

/// Rounded number, or null for NaN / infinity.
inline json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round_sig(v);
}

inline json number(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

inline json numbers(std::span<const double> v) {
  json arr = json::array();
  for (double x : v) arr.push_back(number(x));
  return arr;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace detail {

inline std::string location(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view token, const std::string& where) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty())
    throw ParseError(where + ": not a number: '" + std::string(token) + "'");
  if (!std::isfinite(v)) throw ParseError(where + ": non-finite value '" + std::string(token) + "'");
  return v;
}

inline bool looks_like_json(std::string_view text) {
  const auto t = trim(text);
  return !t.empty() && (t.front() == '{' || t.front() == '[');
}

}  // namespace detail

inline json parse_json(std::string_view text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ":" + detail::location(text, e.byte == 0 ? 0 : e.byte - 1) +
                     ": invalid JSON: " + e.what());
  }
}

inline double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(where + ": non-finite value");
  return v;
}

/// CSV rows; blank lines and lines starting with '#' are skipped.
inline std::vector<Vector> parse_csv_rows(std::string_view text, const std::string& source) {
  std::vector<Vector> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const auto line = detail::trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    Vector row;
    std::size_t col = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const auto field = line.substr(start, comma == std::string_view::npos ? line.size() - start
                                                                            : comma - start);
      ++col;
      row.push_back(detail::parse_double(
          field, source + ":" + std::to_string(line_no) + ": column " + std::to_string(col)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(source + ":" + std::to_string(line_no) + ": ragged row with " +
                       std::to_string(row.size()) + " values, expected " +
                       std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j, const std::string& source,
                               double zero_tol = kDefaultZeroTol) {
  if (!j.is_object() || !j.contains("rows"))
    throw ParseError(source + ": matrix JSON must be an object with a \"rows\" field");
  const auto& rows = j.at("rows");
  if (!rows.is_array() || rows.empty()) throw ParseError(source + ": \"rows\" must be a nonempty array");
  std::vector<Vector> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string where = source + ": rows[" + std::to_string(i) + "]";
    if (!rows[i].is_array()) throw ParseError(where + ": expected an array");
    Vector row;
    for (std::size_t k = 0; k < rows[i].size(); ++k)
      row.push_back(get_number(rows[i][k], where + "[" + std::to_string(k) + "]"));
    if (!out.empty() && row.size() != out.front().size())
      throw ParseError(where + ": ragged row with " + std::to_string(row.size()) +
                       " values, expected " + std::to_string(out.front().size()));
    out.push_back(std::move(row));
  }
  try {
    return Matrix::from_rows(out, zero_tol);
  } catch (const InvalidInput& e) {
    throw ParseError(source + ": " + e.what());
  }
}

inline Matrix parse_matrix(std::string_view text, const std::string& source,
                           double zero_tol = kDefaultZeroTol) {
  if (detail::looks_like_json(text)) return matrix_from_json(parse_json(text, source), source, zero_tol);
  const auto rows = parse_csv_rows(text, source);
  if (rows.empty()) throw ParseError(source + ": empty matrix");
  try {
    return Matrix::from_rows(rows, zero_tol);
  } catch (const InvalidInput& e) {
    throw ParseError(source + ": " + e.what());
  }
}

inline Matrix load_matrix(const fs::path& path, double zero_tol = kDefaultZeroTol) {
  return parse_matrix(read_file(path), path.string(), zero_tol);
}

inline Vector vector_from_json(const json& j, const std::string& source) {
  if (!j.is_array() || j.empty()) throw ParseError(source + ": vector must be a nonempty JSON array");
  Vector v;
  for (std::size_t i = 0; i < j.size(); ++i)
    v.push_back(get_number(j[i], source + "[" + std::to_string(i) + "]"));
  return v;
}

inline Vector parse_vector(std::string_view text, const std::string& source) {
  if (detail::looks_like_json(text)) return vector_from_json(parse_json(text, source), source);
  const auto rows = parse_csv_rows(text, source);
  if (rows.empty()) throw ParseError(source + ": empty vector");
  Vector v;
  for (const auto& r : rows) {
    if (r.size() != 1) throw ParseError(source + ": vector CSV must have a single column");
    v.push_back(r.front());
  }
  return v;
}

inline Vector load_vector(const fs::path& path) {
  return parse_vector(read_file(path), path.string());
}

/// "1,0.2265,1" -> {1, 0.2265, 1}.
inline Vector parse_number_list(std::string_view text, const std::string& source) {
  Vector v;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    v.push_back(detail::parse_double(
        text.substr(start, comma == std::string_view::npos ? text.size() - start : comma - start),
        source));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return v;
}

/// A path to a vector file, or an inline comma-separated list.
inline Vector load_vector_or_list(const std::string& arg) {
  if (fs::exists(arg)) return load_vector(arg);
  return parse_number_list(arg, "'" + arg + "'");
}

namespace detail {

inline fs::path resolve(const fs::path& base_dir, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
}

inline std::size_t get_count(const json& j, const std::string& where) {
  if (!j.is_number_integer() && !j.is_number_unsigned())
    throw ParseError(where + ": expected a nonnegative integer");
  const auto v = j.get<long long>();
  if (v < 0) throw ParseError(where + ": expected a nonnegative integer");
  return static_cast<std::size_t>(v);
}

}  // namespace detail

inline Matrix matrix_ref_from_json(const json& j, const fs::path& base_dir,
                                   const std::string& where, double zero_tol) {
  if (j.is_string()) return load_matrix(detail::resolve(base_dir, j.get<std::string>()), zero_tol);
  if (j.is_object()) return matrix_from_json(j, where, zero_tol);
  throw ParseError(where + ": expected a matrix path or an inline {\"rows\": ...} object");
}

inline MatrixSequence sequence_from_json(const json& j, const fs::path& base_dir,
                                         const std::string& source,
                                         double zero_tol = kDefaultZeroTol) {
  if (!j.is_object()) throw ParseError(source + ": sequence spec must be a JSON object");
  if (j.contains("generator")) {
    const auto& g = j.at("generator");
    const std::string where = source + ": generator";
    if (!g.is_object()) throw ParseError(where + ": expected an object");
    const std::string kind = g.value("kind", std::string("random_stochastic_spanning_tree"));
    if (kind != "random_stochastic_spanning_tree")
      throw ParseError(where + ": unknown kind '" + kind + "'");
    if (!g.contains("n")) throw ParseError(where + ": missing field \"n\"");
    GeneratorSpec spec;
    spec.n = detail::get_count(g.at("n"), where + ".n");
    if (g.contains("seed")) spec.seed = detail::get_count(g.at("seed"), where + ".seed");
    if (g.contains("min_entry")) spec.min_entry = get_number(g.at("min_entry"), where + ".min_entry");
    if (g.contains("extra_edge_probability"))
      spec.extra_edge_probability =
          get_number(g.at("extra_edge_probability"), where + ".extra_edge_probability");
    if (g.contains("length")) spec.length = detail::get_count(g.at("length"), where + ".length");
    if (g.contains("period")) spec.period = detail::get_count(g.at("period"), where + ".period");
    try {
      return MatrixSequence::generated(spec);
    } catch (const InvalidInput& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  if (!j.contains("matrices"))
    throw ParseError(source + ": sequence spec needs \"matrices\" or \"generator\"");
  const auto& list = j.at("matrices");
  if (!list.is_array() || list.empty())
    throw ParseError(source + ": \"matrices\" must be a nonempty array");
  std::vector<Matrix> base;
  for (std::size_t i = 0; i < list.size(); ++i)
    base.push_back(matrix_ref_from_json(list[i], base_dir,
                                        source + ": matrices[" + std::to_string(i) + "]", zero_tol));
  const std::size_t repeat = j.contains("repeat") ? detail::get_count(j.at("repeat"), source + ": repeat") : 1;
  if (repeat == 0) throw ParseError(source + ": repeat must be >= 1");
  std::vector<Matrix> items;
  for (std::size_t r = 0; r < repeat; ++r) items.insert(items.end(), base.begin(), base.end());
  try {
    return MatrixSequence::finite(std::move(items));
  } catch (const InvalidInput& e) {
    throw ParseError(source + ": " + e.what());
  }
}

inline MatrixSequence load_sequence(const fs::path& path, double zero_tol = kDefaultZeroTol) {
  const auto text = read_file(path);
  return sequence_from_json(parse_json(text, path.string()), path.parent_path(), path.string(),
                            zero_tol);
}

/// {"kind": "logistic", "a": 3.9} | {"kind": "tent", "s": 2} |
/// {"kind": "affine", "a": 0.5, "b": 1} | {"kind": "custom_table", "points": [[u, f], ...]}
inline cml::MapDef map_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ParseError(where + ": map must be an object with a string \"kind\"");
  const auto kind = j.at("kind").get<std::string>();
  auto field = [&](const char* name) {
    if (!j.contains(name)) throw ParseError(where + ": missing field \"" + name + "\"");
    return get_number(j.at(name), where + "." + name);
  };
  try {
    if (kind == "logistic") return cml::make_logistic(field("a"));
    if (kind == "tent") return cml::make_tent(field("s"));
    if (kind == "affine") return cml::make_affine(field("a"), field("b"));
    if (kind == "custom_table") {
      if (!j.contains("points") || !j.at("points").is_array())
        throw ParseError(where + ": missing array field \"points\"");
      std::vector<std::pair<double, double>> pts;
      const auto& p = j.at("points");
      for (std::size_t i = 0; i < p.size(); ++i) {
        const std::string pw = where + ".points[" + std::to_string(i) + "]";
        if (!p[i].is_array() || p[i].size() != 2) throw ParseError(pw + ": expected [u, f(u)]");
        pts.emplace_back(get_number(p[i][0], pw), get_number(p[i][1], pw));
      }
      return cml::make_custom_table(std::move(pts));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const InvalidInput& e) {
    throw ParseError(where + ": " + e.what());
  }
  throw ParseError(where + ": unknown map kind '" + kind + "'");
}

// ---- serialization --------------------------------------------------------

inline json to_json(const DenseMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(numbers(m.row(i)));
  return rows;
}

inline json to_json(const Matrix& m) { return json{{"rows", to_json(m.dense())}}; }

inline json to_json(const Digraph& g) {
  json edges = json::array();
  for (const auto& [i, j] : g.edges()) edges.push_back({i, j});
  return json{{"n", g.n()}, {"edges", edges}};
}

inline Digraph digraph_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("n") || !j.contains("edges") || !j.at("edges").is_array())
    throw ParseError(where + ": digraph must be {\"n\": n, \"edges\": [[i, j], ...]}");
  Digraph g(detail::get_count(j.at("n"), where + ".n"));
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw ParseError(where + ": edge must be [i, j]");
    try {
      g.add_edge(detail::get_count(e[0], where), detail::get_count(e[1], where));
    } catch (const ParseError&) {
      throw;
    } catch (const InvalidInput& ex) {
      throw ParseError(where + ": " + ex.what());
    }
  }
  return g;
}

inline json to_json(const NormKind& norm) {
  if (norm.tag() == NormKind::Tag::WeightedL2)
    return json{{"kind", norm.name()}, {"weights", numbers(norm.weights())}};
  return norm.name();
}

inline json to_json(const ContractivityReport& r) {
  return json{{"norm", to_json(r.norm)},
              {"c", number(r.c)},
              {"bound_only", r.is_bound_only},
              {"set_nonexpansive", r.is_set_nonexpansive},
              {"set_contractive", r.is_set_contractive},
              {"method", to_string(r.method)}};
}

inline json to_json(const RowSumProfile& p) {
  return json{{"sums", numbers(p.sums)}, {"is_constant", p.is_constant},
              {"r", p.is_constant ? number(p.r) : json(nullptr)}};
}

inline json to_json(const ErgodicityReport& r) {
  json anchors = json::array();
  for (const auto& a : r.anchors)
    anchors.push_back({{"anchor", a.anchor},
                       {"steps", a.deltas.size()},
                       {"final_delta", number(a.deltas.back())}});
  return json{{"horizon", r.horizon},
              {"block_len", r.block_len},
              {"delta_of_partial_products", numbers(r.delta_of_partial_products)},
              {"anchors", anchors},
              {"block_mu_c", numbers(r.block_mu_c)},
              {"block_mu_c_partial_sums", numbers(r.block_mu_c_partial_sums)},
              {"blocks_outside_h", r.blocks_outside_h},
              {"verdict", to_string(r.verdict)},
              {"subsequence", "i_j = j * block_len"},
              {"note", "finite-horizon diagnostic; not a proof of weak ergodicity"}};
}

/// One JSON-lines record per step: {"k": k, "d": d, "bound": b} (+ "x" when dumping states).
inline std::string trace_jsonl(const cml::SimTrace& t, bool dump_states) {
  std::string out;
  for (std::size_t k = 0; k < t.distances.size(); ++k) {
    json rec{{"k", k}, {"d", number(t.distances[k])}, {"bound", number(t.bound[k])}};
    if (dump_states && k < t.states.size()) rec["x"] = numbers(t.states[k]);
    out += rec.dump();
    out += '\n';
  }
  return out;
}

inline std::string trace_csv(const cml::SimTrace& t) {
  std::string out = "k,d,bound\n";
  char buf[128];
  for (std::size_t k = 0; k < t.distances.size(); ++k) {
    if (t.bound[k])
      std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g\n", k, t.distances[k], *t.bound[k]);
    else
      std::snprintf(buf, sizeof buf, "%zu,%.12g,\n", k, t.distances[k]);
    out += buf;
  }
  return out;
}

}  // namespace contractlab::io
