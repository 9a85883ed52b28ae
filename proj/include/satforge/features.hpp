#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "satforge/cnf.hpp"
#include "satforge/matrix.hpp"
#include "satforge/mip.hpp"

namespace satforge {

enum class SchemaId : std::uint32_t { kMip = 0, kSat = 1 };

std::string_view to_string(SchemaId id);
SchemaId parse_schema(std::string_view text);

struct FeatureSchema {
  SchemaId id = SchemaId::kSat;
  std::vector<std::string> constraint_features;
  std::vector<std::string> variable_features;

  std::size_t constraint_width() const { return constraint_features.size(); }
  std::size_t variable_width() const { return variable_features.size(); }

  static const FeatureSchema& get(SchemaId id);
};

/// Shared padded width across both schemas and both node sides (= 7).
std::size_t padded_feature_width();
/// Model input width: padded width plus the side-indicator column (= 8).
std::size_t model_input_width();

/// Feature rows for both node sides. Columns [0, native width) hold the
/// schema's features, the padding region is zero, and the last column is the
/// side indicator (1 for constraints, 0 for variables).
struct NodeFeatures {
  SchemaId schema = SchemaId::kSat;
  Matrix constraints;
  Matrix variables;

  /// 1 where a column is part of the side's native schema, 0 in the padding and
  /// indicator columns. Shape matches `constraints` / `variables`.
  Matrix constraint_mask() const;
  Matrix variable_mask() const;
};

// SAT schema, computed after merging duplicate literals within a clause.

/// Per clause: [width, pos_count, neg_count, pos_neg_ratio].
Matrix sat_constraint_features(const CnfFormula& formula);
/// Per variable: [degree, pos_deg, neg_deg, pos_neg_ratio, pos_deg_norm, neg_deg_norm].
Matrix sat_variable_features(const CnfFormula& formula);

// MIP schema.

/// Per constraint: [sense one-hot (<=, =, >=), rhs, nonzero count, mean |coef|].
Matrix mip_constraint_features(const MipInstance& instance);
/// Per variable: [type one-hot (binary, integer, continuous), lb, ub, objective, degree].
Matrix mip_variable_features(const MipInstance& instance);

/// Per-side, per-column z-score statistics fitted on a training corpus.
/// Columns whose standard deviation is below 1e-12 pass through unchanged.
struct Standardizer {
  SchemaId schema = SchemaId::kSat;
  std::vector<double> constraint_mean, constraint_std;
  std::vector<double> variable_mean, variable_std;

  static Standardizer fit(std::span<const NodeFeatures> corpus);
  NodeFeatures apply(const NodeFeatures& raw) const;
  bool empty() const { return constraint_mean.empty(); }
};

using FeatureSource = std::variant<const CnfFormula*, const MipInstance*>;

/// The SAT schema needs the CNF formula (constraint rows follow the
/// tautology-filtered clause order of sat_to_mip); the MIP schema needs the MIP
/// instance. Throws DataError on a mismatch. `standardizer` may be null.
NodeFeatures build_node_features(const FeatureSource& source, SchemaId schema,
                                 const Standardizer* standardizer = nullptr);

/// Line-delimited export: "side index v0 v1 ...", one row per node.
std::string write_feature_records(const NodeFeatures& features);

}  // namespace satforge
