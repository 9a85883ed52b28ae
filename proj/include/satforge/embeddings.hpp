#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "satforge/checkpoint.hpp"
#include "satforge/cnf.hpp"
#include "satforge/manifest.hpp"
#include "satforge/matrix.hpp"

namespace satforge {

enum class Variant { kForgeMip, kForgeMipSat, kForgeSat, kStaticSat };

std::string_view to_string(Variant v);
/// Accepts both tag form ("FORGE-SAT") and flag form ("forge-sat").
Variant parse_variant(std::string_view text);
/// Feature schema a variant embeds with (static-sat uses raw SAT features).
SchemaId variant_schema(Variant v);

struct InstanceEmbedding {
  std::string id;
  Variant variant = Variant::kForgeSat;
  std::vector<double> vector;
};

/// Normalized code histogram. Throws DataError on an empty list or a code
/// outside [0, k).
std::vector<double> instance_histogram(std::span<const int> codes, std::size_t k);

struct NodeEmbeddingSet {
  std::vector<int> clause_codes;
  Matrix clause_vectors;
  std::vector<int> variable_codes;
  Matrix variable_vectors;
};

/// Splits codes at `n_constraints` (graph node order) and looks up codewords.
NodeEmbeddingSet node_embeddings(std::span<const int> codes, std::size_t n_constraints, const Matrix& codebook);

/// Mean of the 4 clause features then mean of the 6 variable features, on raw
/// (unstandardized) values. Throws DataError for a formula without clauses.
std::vector<double> static_instance_embedding(const CnfFormula& formula);

/// Encodes a formula with the checkpoint's model under the given schema.
/// Returns the per-node codes (constraints first).
std::vector<int> encode_codes(const Checkpoint& ckpt, const CnfFormula& formula, SchemaId schema,
                              const Standardizer& standardizer);

struct EmbeddingRow {
  std::string id;
  std::string family;
  std::optional<Feasibility> feasibility;
  Variant variant = Variant::kForgeSat;
  std::vector<double> vector;
};

struct EmbeddingTable {
  std::vector<EmbeddingRow> rows;

  std::size_t dim() const { return rows.empty() ? 0 : rows.front().vector.size(); }
  /// Tab-separated: header "id family feasibility variant v0 .. v{D-1}", then
  /// one row per instance; values printed with 17 significant digits.
  std::string serialize() const;
  static EmbeddingTable parse(const std::string& text);
  void save(const std::string& path) const;
  static EmbeddingTable load(const std::string& path);
};

struct EmbedOptions {
  Variant variant = Variant::kForgeSat;
  /// Worker threads; results are assembled in manifest order.
  unsigned threads = 1;
};

struct EmbedOutcome {
  EmbeddingTable table;
  bool transfer = false;
  /// Statistics actually used for standardization (the checkpoint's, or ones
  /// fitted on this corpus when the schema differs from the checkpoint's).
  Standardizer standardizer;
};

/// Embeds every manifest entry. `ckpt` must be null for STATIC-SAT and
/// non-null otherwise. Throws DataError / CheckpointError.
EmbedOutcome embed_corpus(const CorpusManifest& manifest, const Checkpoint* ckpt, const EmbedOptions& options);

}  // namespace satforge
