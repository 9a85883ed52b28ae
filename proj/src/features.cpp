#include "satforge/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include "satforge/error.hpp"

namespace satforge {

std::string_view to_string(SchemaId id) { return id == SchemaId::kMip ? "MIP" : "SAT"; }

SchemaId parse_schema(std::string_view text) {
  if (text == "MIP" || text == "mip") return SchemaId::kMip;
  if (text == "SAT" || text == "sat") return SchemaId::kSat;
  throw DataError("unknown feature schema '" + std::string(text) + "'");
}

const FeatureSchema& FeatureSchema::get(SchemaId id) {
  static const FeatureSchema mip{SchemaId::kMip,
                                 {"sense_le", "sense_eq", "sense_ge", "rhs", "nnz", "mean_abs_coef"},
                                 {"is_binary", "is_integer", "is_continuous", "lb", "ub", "obj", "degree"}};
  static const FeatureSchema sat{SchemaId::kSat,
                                 {"width", "pos_count", "neg_count", "pos_neg_ratio"},
                                 {"degree", "pos_deg", "neg_deg", "pos_neg_ratio", "pos_deg_norm", "neg_deg_norm"}};
  return id == SchemaId::kMip ? mip : sat;
}

std::size_t padded_feature_width() {
  const FeatureSchema& a = FeatureSchema::get(SchemaId::kMip);
  const FeatureSchema& b = FeatureSchema::get(SchemaId::kSat);
  return std::max({a.constraint_width(), a.variable_width(), b.constraint_width(), b.variable_width()});
}

std::size_t model_input_width() { return padded_feature_width() + 1; }

namespace {

Matrix native_mask(std::size_t rows, std::size_t native) {
  Matrix m(rows, model_input_width());
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < native; ++j) m(i, j) = 1.0;
  return m;
}

// Merged literal signs per clause: +1 / -1 per distinct variable, or both.
struct ClauseCounts {
  int pos = 0;
  int neg = 0;
};

ClauseCounts count_clause(const Clause& clause, std::vector<std::pair<int, int>>* occurrences) {
  std::map<int, int> bits;
  for (Literal lit : clause) bits[std::abs(lit)] |= lit > 0 ? 1 : 2;
  ClauseCounts c;
  for (auto [var, b] : bits) {
    if (b & 1) {
      ++c.pos;
      if (occurrences) occurrences->emplace_back(var, 1);
    }
    if (b & 2) {
      ++c.neg;
      if (occurrences) occurrences->emplace_back(var, -1);
    }
  }
  return c;
}

Matrix pad(const Matrix& native, double indicator) {
  const std::size_t width = model_input_width();
  Matrix out(native.rows(), width);
  for (std::size_t i = 0; i < native.rows(); ++i) {
    for (std::size_t j = 0; j < native.cols(); ++j) out(i, j) = native(i, j);
    out(i, width - 1) = indicator;
  }
  return out;
}

}  // namespace

Matrix NodeFeatures::constraint_mask() const {
  return native_mask(constraints.rows(), FeatureSchema::get(schema).constraint_width());
}

Matrix NodeFeatures::variable_mask() const {
  return native_mask(variables.rows(), FeatureSchema::get(schema).variable_width());
}

Matrix sat_constraint_features(const CnfFormula& formula) {
  Matrix out(formula.clauses.size(), 4);
  for (std::size_t j = 0; j < formula.clauses.size(); ++j) {
    const ClauseCounts c = count_clause(formula.clauses[j], nullptr);
    out(j, 0) = c.pos + c.neg;
    out(j, 1) = c.pos;
    out(j, 2) = c.neg;
    out(j, 3) = static_cast<double>(c.pos) / std::max(c.neg, 1);
  }
  return out;
}

Matrix sat_variable_features(const CnfFormula& formula) {
  const std::size_t n = static_cast<std::size_t>(formula.num_vars);
  std::vector<int> pos(n, 0), neg(n, 0);
  std::vector<std::pair<int, int>> occ;
  for (const Clause& clause : formula.clauses) {
    occ.clear();
    count_clause(clause, &occ);
    for (auto [var, sign] : occ) (sign > 0 ? pos : neg)[static_cast<std::size_t>(var - 1)]++;
  }
  // x / mean computed as x * n / total: integer operands, one rounding.
  double total_pos = 0.0, total_neg = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total_pos += pos[i];
    total_neg += neg[i];
  }
  const double count = static_cast<double>(n);
  Matrix out(n, 6);
  for (std::size_t i = 0; i < n; ++i) {
    out(i, 0) = pos[i] + neg[i];
    out(i, 1) = pos[i];
    out(i, 2) = neg[i];
    out(i, 3) = static_cast<double>(pos[i]) / std::max(neg[i], 1);
    out(i, 4) = total_pos > 0.0 ? pos[i] * count / total_pos : 0.0;
    out(i, 5) = total_neg > 0.0 ? neg[i] * count / total_neg : 0.0;
  }
  return out;
}

Matrix mip_constraint_features(const MipInstance& instance) {
  Matrix out(instance.constraints.size(), 6);
  for (std::size_t i = 0; i < instance.constraints.size(); ++i) {
    const LinearConstraint& c = instance.constraints[i];
    out(i, static_cast<std::size_t>(c.sense)) = 1.0;
    out(i, 3) = c.rhs;
    out(i, 4) = static_cast<double>(c.terms.size());
    double abs_sum = 0.0;
    for (const LinearTerm& t : c.terms) abs_sum += std::abs(t.coef);
    out(i, 5) = c.terms.empty() ? 0.0 : abs_sum / static_cast<double>(c.terms.size());
  }
  return out;
}

Matrix mip_variable_features(const MipInstance& instance) {
  std::vector<int> degree(instance.variables.size(), 0);
  for (const LinearConstraint& c : instance.constraints)
    for (const LinearTerm& t : c.terms)
      if (t.coef != 0.0) ++degree[static_cast<std::size_t>(t.var)];
  Matrix out(instance.variables.size(), 7);
  for (std::size_t i = 0; i < instance.variables.size(); ++i) {
    const MipVariable& v = instance.variables[i];
    out(i, static_cast<std::size_t>(v.kind)) = 1.0;
    out(i, 3) = v.lower;
    out(i, 4) = v.upper;
    out(i, 5) = v.objective;
    out(i, 6) = degree[i];
  }
  return out;
}

Standardizer Standardizer::fit(std::span<const NodeFeatures> corpus) {
  if (corpus.empty()) throw DataError("Standardizer::fit: empty corpus");
  Standardizer s;
  s.schema = corpus.front().schema;
  const std::size_t width = padded_feature_width();
  auto fit_side = [&](auto side, std::vector<double>& mean, std::vector<double>& stddev) {
    mean.assign(width, 0.0);
    stddev.assign(width, 0.0);
    double count = 0.0;
    for (const NodeFeatures& nf : corpus) {
      const Matrix& m = nf.*side;
      for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < width; ++j) mean[j] += m(i, j);
      count += static_cast<double>(m.rows());
    }
    if (count == 0.0) return;
    for (double& v : mean) v /= count;
    for (const NodeFeatures& nf : corpus) {
      const Matrix& m = nf.*side;
      for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < width; ++j) {
          const double d = m(i, j) - mean[j];
          stddev[j] += d * d;
        }
    }
    for (double& v : stddev) v = std::sqrt(v / count);
  };
  for (const NodeFeatures& nf : corpus) {
    if (nf.schema != s.schema) throw DataError("Standardizer::fit: mixed feature schemas in corpus");
  }
  fit_side(&NodeFeatures::constraints, s.constraint_mean, s.constraint_std);
  fit_side(&NodeFeatures::variables, s.variable_mean, s.variable_std);
  return s;
}

NodeFeatures Standardizer::apply(const NodeFeatures& raw) const {
  if (raw.schema != schema) throw DataError("Standardizer::apply: schema mismatch");
  NodeFeatures out = raw;
  auto apply_side = [](Matrix& m, const std::vector<double>& mean, const std::vector<double>& stddev) {
    for (std::size_t j = 0; j < mean.size(); ++j) {
      if (!(stddev[j] >= 1e-12)) continue;
      for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) = (m(i, j) - mean[j]) / stddev[j];
    }
  };
  apply_side(out.constraints, constraint_mean, constraint_std);
  apply_side(out.variables, variable_mean, variable_std);
  return out;
}

NodeFeatures build_node_features(const FeatureSource& source, SchemaId schema, const Standardizer* standardizer) {
  NodeFeatures nf;
  nf.schema = schema;
  if (schema == SchemaId::kSat) {
    const CnfFormula* const* formula = std::get_if<const CnfFormula*>(&source);
    if (!formula || !*formula) throw DataError("SAT feature schema requires a CNF formula");
    EncodingDiagnostics diag;
    sat_to_mip(**formula, &diag);
    const Matrix all = sat_constraint_features(**formula);
    Matrix kept(diag.clause_of_constraint.size(), all.cols());
    for (std::size_t i = 0; i < diag.clause_of_constraint.size(); ++i) {
      for (std::size_t j = 0; j < all.cols(); ++j) kept(i, j) = all(diag.clause_of_constraint[i], j);
    }
    nf.constraints = pad(kept, 1.0);
    nf.variables = pad(sat_variable_features(**formula), 0.0);
  } else {
    const MipInstance* const* instance = std::get_if<const MipInstance*>(&source);
    if (!instance || !*instance) throw DataError("MIP feature schema requires a MIP instance");
    nf.constraints = pad(mip_constraint_features(**instance), 1.0);
    nf.variables = pad(mip_variable_features(**instance), 0.0);
  }
  if (standardizer && !standardizer->empty()) return standardizer->apply(nf);
  return nf;
}

std::string write_feature_records(const NodeFeatures& features) {
  std::ostringstream out;
  out.precision(17);
  auto dump = [&](const Matrix& m, const char* side) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      out << side << ' ' << i;
      for (double v : m.row(i)) out << ' ' << v;
      out << '\n';
    }
  };
  dump(features.constraints, "c");
  dump(features.variables, "v");
  return out.str();
}

}  // namespace satforge
