#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "satforge/cnf.hpp"

namespace satforge {

/// Simple undirected graph on vertices 0..n-1, stored as an adjacency matrix.
struct SimpleGraph {
  int n = 0;
  std::vector<std::uint8_t> adj;  // n*n, symmetric, zero diagonal

  explicit SimpleGraph(int vertices = 0)
      : n(vertices), adj(static_cast<std::size_t>(vertices) * static_cast<std::size_t>(vertices), 0) {}

  bool has_edge(int u, int v) const { return adj[static_cast<std::size_t>(u * n + v)] != 0; }
  void add_edge(int u, int v);
  std::vector<std::pair<int, int>> edges() const;

  static SimpleGraph complete(int n);
  /// Erdos-Renyi G(n, p) drawn from the graph-sampling substream of `seed`.
  static SimpleGraph random(int n, double p_edge, std::uint64_t seed);
};

/// Uniform random k-SAT: m clauses of k distinct variables with fair signs.
CnfFormula gen_random_ksat(int n, int m, int k, std::uint64_t seed);

struct SrParams {
  /// Clause width is 1 + Bernoulli(p_bernoulli) + Geometric(p_geometric), capped at n.
  double p_bernoulli = 0.3;
  double p_geometric = 0.4;
  /// Decision budget for each satisfiability test during generation.
  std::uint64_t dpll_budget = 200000;
};

/// Paired instances: first is UNSAT, second is SAT, and they differ only in the
/// sign of one literal of the last clause. Throws DataError if a DPLL call
/// exhausts its budget.
std::pair<CnfFormula, CnfFormula> gen_sr_pair(int n, std::uint64_t seed, const SrParams& params = {});

/// k-clique encoding: variable x(slot i, vertex v) = i*n + v + 1.
CnfFormula encode_clique(const SimpleGraph& graph, int k);
CnfFormula gen_clique(int n_vertices, double p_edge, int k, std::uint64_t seed);

/// Vertex cover of size <= k: one variable per vertex, an edge clause per edge,
/// and the binomial at-most-k constraint (one negative clause per (k+1)-subset).
CnfFormula encode_vertex_cover(const SimpleGraph& graph, int k);
CnfFormula gen_vertex_cover(int n_vertices, double p_edge, int k, std::uint64_t seed);

}  // namespace satforge
