// Shared small instances for tests.
#pragma once

#include <vector>

#include "satforge/cnf.hpp"
#include "satforge/features.hpp"
#include "satforge/generators.hpp"
#include "satforge/mip.hpp"
#include "satforge/train.hpp"

namespace fixture {

inline satforge::CnfFormula five_clauses() {
  satforge::CnfFormula f;
  f.num_vars = 5;
  f.clauses = {{1, -2, 3}, {-1, 4}, {2, -3, -5}, {-4, 5}, {1, 3, -4}};
  return f;
}

inline satforge::GraphInstance graph_instance(const satforge::CnfFormula& f, const std::string& id = "x",
                                              satforge::SchemaId schema = satforge::SchemaId::kSat) {
  const satforge::MipInstance mip = satforge::sat_to_mip(f);
  satforge::GraphInstance g;
  g.id = id;
  g.graph = satforge::mip_to_graph(mip);
  g.features = schema == satforge::SchemaId::kSat ? satforge::build_node_features(&f, schema)
                                                  : satforge::build_node_features(&mip, schema);
  return g;
}

// Standardized corpus of `per_family` random 3-SAT, clique and vertex-cover
// instances each.
inline std::vector<satforge::GraphInstance> mixed_corpus(int per_family, std::uint64_t seed,
                                                         satforge::Standardizer* fitted = nullptr) {
  std::vector<satforge::GraphInstance> out;
  for (int i = 0; i < per_family; ++i) {
    const std::uint64_t s = seed * 1000 + static_cast<std::uint64_t>(i);
    out.push_back(graph_instance(satforge::gen_random_ksat(20, 85, 3, s), "ksat" + std::to_string(i)));
    out.push_back(graph_instance(satforge::gen_clique(8, 0.35, 3, s), "clique" + std::to_string(i)));
    out.push_back(graph_instance(satforge::gen_vertex_cover(8, 0.3, 4, s), "vc" + std::to_string(i)));
  }
  std::vector<satforge::NodeFeatures> raw;
  for (const auto& g : out) raw.push_back(g.features);
  const satforge::Standardizer st = satforge::Standardizer::fit(raw);
  for (auto& g : out) g.features = st.apply(g.features);
  if (fitted) *fitted = st;
  return out;
}

}  // namespace fixture
