#include "satforge/embeddings.hpp"

#include <cctype>
#include <sstream>

#include "satforge/digest.hpp"
#include "satforge/error.hpp"
#include "satforge/features.hpp"
#include "satforge/parallel.hpp"

namespace satforge {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kForgeMip: return "FORGE-MIP";
    case Variant::kForgeMipSat: return "FORGE-MIP-SAT";
    case Variant::kForgeSat: return "FORGE-SAT";
    case Variant::kStaticSat: return "STATIC-SAT";
  }
  return "?";
}

Variant parse_variant(std::string_view text) {
  std::string t(text);
  for (char& c : t) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (t == "FORGE-MIP") return Variant::kForgeMip;
  if (t == "FORGE-MIP-SAT") return Variant::kForgeMipSat;
  if (t == "FORGE-SAT") return Variant::kForgeSat;
  if (t == "STATIC-SAT") return Variant::kStaticSat;
  throw DataError("unknown variant '" + std::string(text) + "'");
}

SchemaId variant_schema(Variant v) { return v == Variant::kForgeMip ? SchemaId::kMip : SchemaId::kSat; }

std::vector<double> instance_histogram(std::span<const int> codes, std::size_t k) {
  if (codes.empty()) throw DataError("instance_histogram: empty code list");
  std::vector<std::size_t> counts(k, 0);
  for (int c : codes) {
    if (c < 0 || static_cast<std::size_t>(c) >= k) throw DataError("instance_histogram: code out of range");
    ++counts[static_cast<std::size_t>(c)];
  }
  std::vector<double> h(k);
  const double total = static_cast<double>(codes.size());
  for (std::size_t i = 0; i < k; ++i) h[i] = static_cast<double>(counts[i]) / total;
  return h;
}

NodeEmbeddingSet node_embeddings(std::span<const int> codes, std::size_t n_constraints, const Matrix& codebook) {
  if (n_constraints > codes.size()) throw DataError("node_embeddings: more constraints than codes");
  NodeEmbeddingSet out;
  const std::size_t d = codebook.cols();
  auto fill = [&](std::span<const int> part, std::vector<int>& ids, Matrix& vecs) {
    ids.assign(part.begin(), part.end());
    vecs = Matrix(part.size(), d);
    for (std::size_t i = 0; i < part.size(); ++i) {
      if (part[i] < 0 || static_cast<std::size_t>(part[i]) >= codebook.rows()) {
        throw DataError("node_embeddings: code out of range");
      }
      auto src = codebook.row(static_cast<std::size_t>(part[i]));
      std::copy(src.begin(), src.end(), vecs.row(i).begin());
    }
  };
  fill(codes.subspan(0, n_constraints), out.clause_codes, out.clause_vectors);
  fill(codes.subspan(n_constraints), out.variable_codes, out.variable_vectors);
  return out;
}

std::vector<double> static_instance_embedding(const CnfFormula& formula) {
  if (formula.clauses.empty()) throw DataError("static_instance_embedding: formula has no clauses");
  const Matrix cf = sat_constraint_features(formula);
  const Matrix vf = sat_variable_features(formula);
  std::vector<double> out(cf.cols() + vf.cols(), 0.0);
  for (std::size_t i = 0; i < cf.rows(); ++i)
    for (std::size_t j = 0; j < cf.cols(); ++j) out[j] += cf(i, j);
  for (std::size_t j = 0; j < cf.cols(); ++j) out[j] /= static_cast<double>(cf.rows());
  if (vf.rows() > 0) {
    for (std::size_t i = 0; i < vf.rows(); ++i)
      for (std::size_t j = 0; j < vf.cols(); ++j) out[cf.cols() + j] += vf(i, j);
    for (std::size_t j = 0; j < vf.cols(); ++j) out[cf.cols() + j] /= static_cast<double>(vf.rows());
  }
  return out;
}

namespace {

NodeFeatures raw_features(const CnfFormula& formula, SchemaId schema, MipInstance& mip_storage) {
  if (schema == SchemaId::kSat) return build_node_features(&formula, schema);
  mip_storage = sat_to_mip(formula);
  return build_node_features(&mip_storage, schema);
}

}  // namespace

std::vector<int> encode_codes(const Checkpoint& ckpt, const CnfFormula& formula, SchemaId schema,
                              const Standardizer& standardizer) {
  MipInstance mip_storage;
  const NodeFeatures raw = raw_features(formula, schema, mip_storage);
  const NodeFeatures features = standardizer.empty() ? raw : standardizer.apply(raw);
  const BipartiteGraph graph = mip_to_graph(sat_to_mip(formula));
  return quantize(ckpt.model.encode(graph, features), ckpt.model.codebook()).codes;
}

std::string EmbeddingTable::serialize() const {
  std::ostringstream out;
  out.precision(17);
  out << "id\tfamily\tfeasibility\tvariant";
  for (std::size_t j = 0; j < dim(); ++j) out << "\tv" << j;
  out << '\n';
  for (const EmbeddingRow& r : rows) {
    out << r.id << '\t' << r.family << '\t' << (r.feasibility ? to_string(*r.feasibility) : "unknown") << '\t'
        << to_string(r.variant);
    for (double v : r.vector) out << '\t' << v;
    out << '\n';
  }
  return out.str();
}

EmbeddingTable EmbeddingTable::parse(const std::string& text) {
  EmbeddingTable t;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("id\tfamily\tfeasibility\tvariant", 0) != 0) {
    throw DataError("embedding table: missing header");
  }
  std::size_t dim = 0;
  for (char c : line) dim += c == '\t' ? 1 : 0;
  dim -= 3;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, '\t')) fields.push_back(f);
    if (fields.size() != 4 + dim) throw DataError("embedding table line " + std::to_string(line_no) + ": wrong field count");
    EmbeddingRow r;
    r.id = fields[0];
    r.family = fields[1];
    r.feasibility = parse_feasibility(fields[2]);
    r.variant = parse_variant(fields[3]);
    for (std::size_t j = 0; j < dim; ++j) {
      try {
        r.vector.push_back(std::stod(fields[4 + j]));
      } catch (const std::exception&) {
        throw DataError("embedding table line " + std::to_string(line_no) + ": bad number");
      }
    }
    t.rows.push_back(std::move(r));
  }
  return t;
}

void EmbeddingTable::save(const std::string& path) const { write_file(path, serialize()); }

EmbeddingTable EmbeddingTable::load(const std::string& path) { return parse(read_file(path)); }

EmbedOutcome embed_corpus(const CorpusManifest& manifest, const Checkpoint* ckpt, const EmbedOptions& options) {
  const Variant variant = options.variant;
  if (variant == Variant::kStaticSat && ckpt) throw DataError("STATIC-SAT does not use a checkpoint");
  if (variant != Variant::kStaticSat && !ckpt) throw DataError(std::string(to_string(variant)) + " requires a checkpoint");

  std::vector<CnfFormula> formulas(manifest.entries.size());
  parallel_for(formulas.size(), options.threads,
               [&](std::size_t i) { formulas[i] = manifest.load_formula(manifest.entries[i]); });

  EmbedOutcome outcome;
  const SchemaId schema = variant_schema(variant);
  if (ckpt) {
    outcome.transfer = bind_schema(*ckpt, schema).transfer;
    if (!outcome.transfer) {
      outcome.standardizer = ckpt->standardizer;
    } else {
      // Frozen statistics describe the checkpoint's own schema; refit on this
      // corpus for the swapped-in features.
      std::vector<NodeFeatures> raw(formulas.size());
      parallel_for(formulas.size(), options.threads, [&](std::size_t i) {
        MipInstance storage;
        raw[i] = raw_features(formulas[i], schema, storage);
      });
      outcome.standardizer = Standardizer::fit(raw);
    }
  }

  outcome.table.rows.resize(formulas.size());
  parallel_for(formulas.size(), options.threads, [&](std::size_t i) {
    const ManifestEntry& e = manifest.entries[i];
    EmbeddingRow& row = outcome.table.rows[i];
    row.id = e.path;
    row.family = e.family;
    row.feasibility = e.feasibility;
    row.variant = variant;
    if (variant == Variant::kStaticSat) {
      row.vector = static_instance_embedding(formulas[i]);
    } else {
      const std::vector<int> codes = encode_codes(*ckpt, formulas[i], schema, outcome.standardizer);
      row.vector = instance_histogram(codes, ckpt->model.dims().codebook);
    }
  });
  return outcome;
}

}  // namespace satforge
