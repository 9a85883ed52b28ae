#include "satforge/mip.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include "satforge/error.hpp"

namespace satforge {

void MipInstance::validate() const {
  for (const MipVariable& v : variables) {
    if (v.lower > v.upper) throw DataError("variable with lower bound above upper bound");
  }
  const int n = static_cast<int>(variables.size());
  for (const LinearConstraint& c : constraints) {
    for (const LinearTerm& t : c.terms) {
      if (t.var < 0 || t.var >= n) throw DataError("constraint term references unknown variable");
      if (t.coef == 0.0) throw DataError("constraint term with zero coefficient");
    }
  }
}

MipInstance sat_to_mip(const CnfFormula& formula, EncodingDiagnostics* diagnostics) {
  formula.validate();
  MipInstance mip;
  mip.variables.assign(static_cast<std::size_t>(formula.num_vars), MipVariable{});
  EncodingDiagnostics diag;
  for (std::size_t j = 0; j < formula.clauses.size(); ++j) {
    // Per variable: bit 1 = positive occurrence, bit 2 = negative occurrence.
    std::map<int, int> occurrence;
    for (Literal lit : formula.clauses[j]) {
      int& bits = occurrence[std::abs(lit) - 1];
      const int bit = lit > 0 ? 1 : 2;
      if (bits & bit) ++diag.merged_duplicate_literals;
      bits |= bit;
    }
    LinearConstraint c;
    c.sense = Sense::kGreaterEqual;
    int negatives = 0;
    bool tautology = false;
    for (auto [var, bits] : occurrence) {
      if (bits == 3) {
        tautology = true;
        break;
      }
      if (bits == 1) {
        c.terms.push_back({var, 1.0});
      } else {
        c.terms.push_back({var, -1.0});
        ++negatives;
      }
    }
    // Both polarities of a variable satisfy the clause for every assignment.
    if (tautology) {
      ++diag.dropped_tautologies;
      continue;
    }
    c.rhs = 1.0 - negatives;
    mip.constraints.push_back(std::move(c));
    diag.clause_of_constraint.push_back(j);
  }
  if (diagnostics) *diagnostics = std::move(diag);
  return mip;
}

bool check_feasible(const MipInstance& instance, const Assignment& point) {
  if (point.values.size() != instance.variables.size()) {
    throw DataError("check_feasible: point has " + std::to_string(point.values.size()) + " entries, instance has " +
                    std::to_string(instance.variables.size()) + " variables");
  }
  for (const LinearConstraint& c : instance.constraints) {
    double lhs = 0.0;
    for (const LinearTerm& t : c.terms) {
      if (point.values[static_cast<std::size_t>(t.var)]) lhs += t.coef;
    }
    switch (c.sense) {
      case Sense::kLessEqual:
        if (lhs > c.rhs) return false;
        break;
      case Sense::kEqual:
        if (lhs != c.rhs) return false;
        break;
      case Sense::kGreaterEqual:
        if (lhs < c.rhs) return false;
        break;
    }
  }
  return true;
}

std::string write_mip_text(const MipInstance& instance) {
  std::ostringstream out;
  for (const LinearConstraint& c : instance.constraints) {
    for (const LinearTerm& t : c.terms) out << (t.coef >= 0 ? "+" : "") << t.coef << "*x" << t.var << ' ';
    out << (c.sense == Sense::kLessEqual ? "<=" : c.sense == Sense::kEqual ? "=" : ">=") << ' ' << c.rhs << '\n';
  }
  return out.str();
}

BipartiteGraph::BipartiteGraph(int n_constraints, int n_variables, std::vector<Edge> edges)
    : n_constraints_(n_constraints), n_variables_(n_variables), edges_(std::move(edges)) {
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return a.constraint != b.constraint ? a.constraint < b.constraint : a.variable < b.variable;
  });
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.constraint < 0 || e.constraint >= n_constraints || e.variable < 0 || e.variable >= n_variables) {
      throw DataError("edge endpoint out of range");
    }
    if (e.coef == 0.0) throw DataError("edge with zero coefficient");
    if (i > 0 && edges_[i - 1].constraint == e.constraint && edges_[i - 1].variable == e.variable) {
      throw DataError("parallel edge");
    }
  }
  c_offsets_.assign(static_cast<std::size_t>(n_constraints) + 1, 0);
  v_offsets_.assign(static_cast<std::size_t>(n_variables) + 1, 0);
  for (const Edge& e : edges_) {
    ++c_offsets_[static_cast<std::size_t>(e.constraint) + 1];
    ++v_offsets_[static_cast<std::size_t>(e.variable) + 1];
  }
  for (int c = 0; c < n_constraints; ++c) c_offsets_[c + 1] += c_offsets_[c];
  for (int v = 0; v < n_variables; ++v) v_offsets_[v + 1] += v_offsets_[v];
  c_neighbors_.resize(edges_.size());
  v_neighbors_.resize(edges_.size());
  std::vector<int> c_fill(c_offsets_.begin(), c_offsets_.end() - 1);
  std::vector<int> v_fill(v_offsets_.begin(), v_offsets_.end() - 1);
  // Edges are sorted by constraint then variable, so both fills come out ascending.
  for (const Edge& e : edges_) {
    c_neighbors_[static_cast<std::size_t>(c_fill[e.constraint]++)] = e.variable;
    v_neighbors_[static_cast<std::size_t>(v_fill[e.variable]++)] = e.constraint;
  }
}

std::vector<int> BipartiteGraph::variables_of(int c) const {
  return {c_neighbors_.begin() + c_offsets_[c], c_neighbors_.begin() + c_offsets_[c + 1]};
}

std::vector<int> BipartiteGraph::constraints_of(int v) const {
  return {v_neighbors_.begin() + v_offsets_[v], v_neighbors_.begin() + v_offsets_[v + 1]};
}

bool BipartiteGraph::has_edge(int c, int v) const {
  auto first = c_neighbors_.begin() + c_offsets_[c];
  auto last = c_neighbors_.begin() + c_offsets_[c + 1];
  return std::binary_search(first, last, v);
}

BipartiteGraph mip_to_graph(const MipInstance& instance) {
  instance.validate();
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < instance.constraints.size(); ++i) {
    for (const LinearTerm& t : instance.constraints[i].terms) {
      if (t.coef != 0.0) edges.push_back({static_cast<int>(i), t.var, t.coef});
    }
  }
  return BipartiteGraph(static_cast<int>(instance.constraints.size()), static_cast<int>(instance.variables.size()),
                        std::move(edges));
}

}  // namespace satforge
