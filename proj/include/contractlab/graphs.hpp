#pragma once

// Interaction digraph of a matrix and the reachability predicates used by
// the graph-theoretic necessary condition for set-contractivity.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <queue>
#include <set>
#include <utility>
#include <vector>

#include "contractlab/error.hpp"
#include "contractlab/matrix.hpp"

namespace contractlab {

/// Simple digraph on vertices [0, n). Self-loops are stored but ignored by the
/// reachability predicates.
class Digraph {
 public:
  explicit Digraph(std::size_t n) : out_(n) {}

  std::size_t n() const noexcept { return out_.size(); }

  void add_edge(std::size_t from, std::size_t to) {
    if (from >= n() || to >= n())
      throw InvalidInput("edge (" + std::to_string(from) + "," + std::to_string(to) +
                         ") out of range for " + std::to_string(n()) + " vertices");
    out_[from].insert(to);
  }

  bool has_edge(std::size_t from, std::size_t to) const {
    return from < n() && out_[from].count(to) != 0;
  }

  const std::set<std::size_t>& successors(std::size_t v) const { return out_[v]; }

  /// All edges in lexicographic order.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t i = 0; i < n(); ++i)
      for (std::size_t j : out_[i]) e.emplace_back(i, j);
    return e;
  }

  /// Vertices reachable from `root` (including root itself).
  std::vector<bool> reachable_from(std::size_t root) const {
    std::vector<bool> seen(n(), false);
    std::queue<std::size_t> frontier;
    seen[root] = true;
    frontier.push(root);
    while (!frontier.empty()) {
      const auto v = frontier.front();
      frontier.pop();
      for (std::size_t w : out_[v])
        if (!seen[w]) {
          seen[w] = true;
          frontier.push(w);
        }
    }
    return seen;
  }

  Digraph without_self_loops() const {
    Digraph g(n());
    for (const auto& [i, j] : edges())
      if (i != j) g.add_edge(i, j);
    return g;
  }

 private:
  std::vector<std::set<std::size_t>> out_;
};

/// Graph of A^T: edge i -> j iff |A_ji| > zero_tol, i.e. the update of j reads i.
inline Digraph interaction_digraph(const Matrix& a) {
  Digraph g(a.n());
  for (std::size_t j = 0; j < a.n(); ++j)
    for (std::size_t i = 0; i < a.n(); ++i)
      if (a.is_nonzero(j, i)) g.add_edge(i, j);
  return g;
}

struct SpanningTreeResult {
  bool exists = false;
  /// Lowest-index root that reaches every vertex.
  std::optional<std::size_t> root;
};

/// Out-branching convention: some root reaches every vertex along directed paths.
inline SpanningTreeResult has_spanning_directed_tree(const Digraph& g) {
  for (std::size_t root = 0; root < g.n(); ++root) {
    const auto seen = g.reachable_from(root);
    if (std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) return {true, root};
  }
  return {};
}

/// Strong connectivity.
inline bool is_irreducible(const Digraph& g) {
  if (g.n() == 0) return true;
  auto all = [](const std::vector<bool>& v) {
    return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
  };
  if (!all(g.reachable_from(0))) return false;
  Digraph reversed(g.n());
  for (const auto& [i, j] : g.edges()) reversed.add_edge(j, i);
  return all(reversed.reachable_from(0));
}

}  // namespace contractlab
