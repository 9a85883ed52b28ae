#include "satforge/generators.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "satforge/dpll.hpp"
#include "satforge/error.hpp"
#include "satforge/rng.hpp"

namespace satforge {

void SimpleGraph::add_edge(int u, int v) {
  if (u == v) return;
  adj[static_cast<std::size_t>(u * n + v)] = 1;
  adj[static_cast<std::size_t>(v * n + u)] = 1;
}

std::vector<std::pair<int, int>> SimpleGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (has_edge(u, v)) out.emplace_back(u, v);
  return out;
}

SimpleGraph SimpleGraph::complete(int n) {
  SimpleGraph g(n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) g.add_edge(u, v);
  return g;
}

SimpleGraph SimpleGraph::random(int n, double p_edge, std::uint64_t seed) {
  Rng rng(seed, Stream::kGraph);
  SimpleGraph g(n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.bernoulli(p_edge)) g.add_edge(u, v);
  return g;
}

namespace {

Clause random_clause(int n, int width, Rng& vars, Rng& signs) {
  Clause clause;
  clause.reserve(static_cast<std::size_t>(width));
  for (std::size_t v : vars.sample_distinct(static_cast<std::size_t>(n), static_cast<std::size_t>(width))) {
    const Literal var = static_cast<Literal>(v) + 1;
    clause.push_back(signs.bernoulli(0.5) ? var : -var);
  }
  return clause;
}

void check_graph_params(int n_vertices, double p_edge, int k) {
  if (n_vertices < 1 || k < 1 || k > n_vertices) throw std::invalid_argument("need 1 <= k <= n_vertices");
  if (!(p_edge >= 0.0 && p_edge <= 1.0)) throw std::invalid_argument("p_edge must be in [0, 1]");
}

}  // namespace

CnfFormula gen_random_ksat(int n, int m, int k, std::uint64_t seed) {
  if (n < 1 || m < 1 || k < 1) throw std::invalid_argument("gen_random_ksat: n, m, k must be positive");
  if (k > n) throw std::invalid_argument("gen_random_ksat: k exceeds n");
  Rng vars(seed, Stream::kGeneration);
  Rng signs(seed, Stream::kSigns);
  CnfFormula f;
  f.num_vars = n;
  f.family = "random-ksat";
  f.clauses.reserve(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) f.clauses.push_back(random_clause(n, k, vars, signs));
  return f;
}

std::pair<CnfFormula, CnfFormula> gen_sr_pair(int n, std::uint64_t seed, const SrParams& params) {
  if (n < 1) throw std::invalid_argument("gen_sr_pair: n must be positive");
  Rng vars(seed, Stream::kGeneration);
  Rng signs(seed, Stream::kSigns);
  CnfFormula f;
  f.num_vars = n;
  f.family = "sr";
  while (true) {
    const int width = std::min(n, 1 + (vars.bernoulli(params.p_bernoulli) ? 1 : 0) + vars.geometric(params.p_geometric));
    f.clauses.push_back(random_clause(n, width, vars, signs));
    const SolveResult r = dpll_solve(f, params.dpll_budget);
    if (r.status == SolveStatus::kBudgetExceeded) {
      throw DataError("gen_sr_pair: DPLL budget exhausted at " + std::to_string(f.clauses.size()) + " clauses");
    }
    if (r.status == SolveStatus::kUnsat) break;
  }
  // Every model of the prefix falsifies the whole last clause, so flipping any
  // one of its literals yields a satisfiable twin.
  CnfFormula sat = f;
  sat.clauses.back().front() = -sat.clauses.back().front();
  f.feasibility = Feasibility::kUnsat;
  sat.feasibility = Feasibility::kSat;
  return {std::move(f), std::move(sat)};
}

CnfFormula encode_clique(const SimpleGraph& graph, int k) {
  const int n = graph.n;
  if (k < 1 || k > n) throw std::invalid_argument("encode_clique: need 1 <= k <= n");
  auto x = [n](int slot, int v) { return static_cast<Literal>(slot * n + v + 1); };
  CnfFormula f;
  f.num_vars = n * k;
  f.family = "clique";
  for (int i = 0; i < k; ++i) {
    Clause some;
    for (int v = 0; v < n; ++v) some.push_back(x(i, v));
    f.clauses.push_back(std::move(some));
  }
  for (int v = 0; v < n; ++v)
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) f.clauses.push_back({-x(i, v), -x(j, v)});
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (graph.has_edge(u, v)) continue;
      for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
          f.clauses.push_back({-x(i, u), -x(j, v)});
          f.clauses.push_back({-x(i, v), -x(j, u)});
        }
      }
    }
  }
  return f;
}

CnfFormula gen_clique(int n_vertices, double p_edge, int k, std::uint64_t seed) {
  check_graph_params(n_vertices, p_edge, k);
  return encode_clique(SimpleGraph::random(n_vertices, p_edge, seed), k);
}

CnfFormula encode_vertex_cover(const SimpleGraph& graph, int k) {
  const int n = graph.n;
  if (k < 1 || k > n) throw std::invalid_argument("encode_vertex_cover: need 1 <= k <= n");
  CnfFormula f;
  f.num_vars = n;
  f.family = "vertex-cover";
  for (auto [u, v] : graph.edges()) f.clauses.push_back({u + 1, v + 1});
  if (k < n) {
    // Enumerate (k+1)-subsets in lexicographic order.
    std::vector<int> subset(static_cast<std::size_t>(k + 1));
    for (int i = 0; i <= k; ++i) subset[static_cast<std::size_t>(i)] = i;
    while (true) {
      Clause c;
      for (int v : subset) c.push_back(-(v + 1));
      f.clauses.push_back(std::move(c));
      int i = k;
      while (i >= 0 && subset[static_cast<std::size_t>(i)] == n - (k + 1) + i) --i;
      if (i < 0) break;
      ++subset[static_cast<std::size_t>(i)];
      for (int j = i + 1; j <= k; ++j) subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return f;
}

CnfFormula gen_vertex_cover(int n_vertices, double p_edge, int k, std::uint64_t seed) {
  check_graph_params(n_vertices, p_edge, k);
  return encode_vertex_cover(SimpleGraph::random(n_vertices, p_edge, seed), k);
}

}  // namespace satforge
