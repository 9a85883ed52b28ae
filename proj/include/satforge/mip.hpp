#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "satforge/cnf.hpp"

namespace satforge {

enum class VarKind { kBinary, kInteger, kContinuous };
enum class Sense { kLessEqual, kEqual, kGreaterEqual };

struct MipVariable {
  VarKind kind = VarKind::kBinary;
  double lower = 0.0;
  double upper = 1.0;
  double objective = 0.0;
};

struct LinearTerm {
  int var = 0;  // 0-based variable index
  double coef = 0.0;
};

struct LinearConstraint {
  std::vector<LinearTerm> terms;
  Sense sense = Sense::kGreaterEqual;
  double rhs = 0.0;
};

/// min c^T x subject to the constraints; objective sense is always minimize.
struct MipInstance {
  std::vector<MipVariable> variables;
  std::vector<LinearConstraint> constraints;

  void validate() const;
};

struct EncodingDiagnostics {
  std::size_t dropped_tautologies = 0;
  std::size_t merged_duplicate_literals = 0;
  /// Original clause index of each emitted constraint.
  std::vector<std::size_t> clause_of_constraint;
};

/// Clause with positive set P and negative set N becomes
///   sum_{P} x_i - sum_{N} x_i >= 1 - |N|.
/// Duplicate literals are merged; clauses whose coefficients all cancel are
/// dropped and counted.
MipInstance sat_to_mip(const CnfFormula& formula, EncodingDiagnostics* diagnostics = nullptr);

/// True iff the 0/1 point satisfies every constraint. Throws DataError on a
/// length mismatch.
bool check_feasible(const MipInstance& instance, const Assignment& point);

/// Debug text form, one constraint per line: "+1*x0 -1*x1 >= 0".
std::string write_mip_text(const MipInstance& instance);

struct Edge {
  int constraint = 0;
  int variable = 0;
  double coef = 0.0;
};

/// Bipartite constraint/variable graph with CSR adjacency in both directions.
/// Edges are sorted by (constraint, variable); immutable after construction.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;
  BipartiteGraph(int n_constraints, int n_variables, std::vector<Edge> edges);

  int n_constraints() const { return n_constraints_; }
  int n_variables() const { return n_variables_; }
  int n_nodes() const { return n_constraints_ + n_variables_; }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Variable indices adjacent to constraint c, ascending.
  std::vector<int> variables_of(int c) const;
  /// Constraint indices adjacent to variable v, ascending.
  std::vector<int> constraints_of(int v) const;
  int constraint_degree(int c) const { return c_offsets_[c + 1] - c_offsets_[c]; }
  int variable_degree(int v) const { return v_offsets_[v + 1] - v_offsets_[v]; }
  bool has_edge(int c, int v) const;

  // Raw CSR views.
  const std::vector<int>& constraint_offsets() const { return c_offsets_; }
  const std::vector<int>& constraint_neighbors() const { return c_neighbors_; }
  const std::vector<int>& variable_offsets() const { return v_offsets_; }
  const std::vector<int>& variable_neighbors() const { return v_neighbors_; }

 private:
  int n_constraints_ = 0;
  int n_variables_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> c_offsets_{0}, c_neighbors_;
  std::vector<int> v_offsets_{0}, v_neighbors_;
};

BipartiteGraph mip_to_graph(const MipInstance& instance);

}  // namespace satforge
