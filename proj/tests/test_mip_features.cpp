#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "satforge/dpll.hpp"
#include "satforge/error.hpp"
#include "satforge/features.hpp"
#include "satforge/generators.hpp"
#include "satforge/mip.hpp"
#include "satforge/rng.hpp"

using namespace satforge;

namespace {

CnfFormula formula(int n, std::vector<Clause> clauses) {
  CnfFormula f;
  f.num_vars = n;
  f.clauses = std::move(clauses);
  return f;
}

std::vector<double> row(const Matrix& m, std::size_t r, std::size_t width) {
  auto s = m.row(r);
  return {s.begin(), s.begin() + static_cast<std::ptrdiff_t>(width)};
}

}  // namespace

TEST(SatToMip, ExampleClause) {
  const MipInstance m = sat_to_mip(formula(3, {{1, -2, 3}}));
  ASSERT_EQ(m.variables.size(), 3u);
  ASSERT_EQ(m.constraints.size(), 1u);
  const LinearConstraint& c = m.constraints[0];
  EXPECT_EQ(c.sense, Sense::kGreaterEqual);
  EXPECT_EQ(c.rhs, 0.0);
  ASSERT_EQ(c.terms.size(), 3u);
  EXPECT_EQ(c.terms[0].var, 0);
  EXPECT_EQ(c.terms[0].coef, 1.0);
  EXPECT_EQ(c.terms[1].var, 1);
  EXPECT_EQ(c.terms[1].coef, -1.0);
  EXPECT_EQ(c.terms[2].coef, 1.0);
  for (const MipVariable& v : m.variables) {
    EXPECT_EQ(v.kind, VarKind::kBinary);
    EXPECT_EQ(v.lower, 0.0);
    EXPECT_EQ(v.upper, 1.0);
  }
}

TEST(SatToMip, UnitNegativeClause) {
  const MipInstance m = sat_to_mip(formula(1, {{-1}}));
  ASSERT_EQ(m.constraints.size(), 1u);
  EXPECT_EQ(m.constraints[0].rhs, 0.0);
  EXPECT_EQ(m.constraints[0].terms[0].coef, -1.0);
}

TEST(SatToMip, TautologyAndDuplicates) {
  EncodingDiagnostics diag;
  const MipInstance m = sat_to_mip(formula(2, {{1, -1}, {2, 2, -1}}), &diag);
  EXPECT_EQ(diag.dropped_tautologies, 1u);
  EXPECT_EQ(diag.merged_duplicate_literals, 1u);
  ASSERT_EQ(m.constraints.size(), 1u);
  EXPECT_EQ(diag.clause_of_constraint, (std::vector<std::size_t>{1}));
  EXPECT_EQ(m.constraints[0].terms.size(), 2u);
  EXPECT_EQ(m.constraints[0].rhs, 0.0);
}

TEST(SatToMip, FeasibilityCheck) {
  const MipInstance m = sat_to_mip(formula(3, {{1, -2, 3}}));
  EXPECT_TRUE(check_feasible(m, Assignment{{true, true, false}}));
  EXPECT_FALSE(check_feasible(m, Assignment{{false, true, false}}));
  const MipInstance u = sat_to_mip(formula(1, {{-1}}));
  EXPECT_FALSE(check_feasible(u, Assignment{{true}}));
  EXPECT_THROW(check_feasible(u, Assignment{{true, false}}), DataError);
}

TEST(SatToMip, PointwiseEquivalence) {
  Rng rng(3, Stream::kGeneration);
  for (int t = 0; t < 100; ++t) {
    const CnfFormula f = gen_random_ksat(6, 12, 3, static_cast<std::uint64_t>(t));
    const MipInstance m = sat_to_mip(f);
    for (int mask = 0; mask < 64; ++mask) {
      Assignment a;
      for (int v = 0; v < 6; ++v) a.values.push_back((mask >> v) & 1);
      ASSERT_EQ(check_feasible(m, a), satisfies(f, a));
    }
  }
}

TEST(SatToMip, FeasibilityMatchesBruteForce) {
  for (std::uint64_t s = 0; s < 60; ++s) {
    const CnfFormula f = gen_random_ksat(8, 8 + static_cast<int>(s % 30), 2 + static_cast<int>(s % 2), s);
    EXPECT_EQ(oracle::mip_feasible_01(sat_to_mip(f)), oracle::truth_table_sat(f));
  }
}

TEST(Graph, ExampleInstance) {
  const BipartiteGraph g = mip_to_graph(sat_to_mip(formula(4, {{1, -2, 3}})));
  EXPECT_EQ(g.n_constraints(), 1);
  EXPECT_EQ(g.n_variables(), 4);
  ASSERT_EQ(g.edges().size(), 3u);
  EXPECT_EQ(g.edges()[0].coef, 1.0);
  EXPECT_EQ(g.edges()[1].coef, -1.0);
  EXPECT_EQ(g.edges()[2].coef, 1.0);
  EXPECT_EQ(g.variable_degree(3), 0);
  EXPECT_EQ(g.variables_of(0), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(g.constraints_of(1), (std::vector<int>{0}));
  EXPECT_TRUE(g.has_edge(0, 2));
  EXPECT_FALSE(g.has_edge(0, 3));
}

TEST(Graph, CsrConsistency) {
  const BipartiteGraph g = mip_to_graph(sat_to_mip(gen_random_ksat(15, 60, 3, 4)));
  int total = 0;
  for (int c = 0; c < g.n_constraints(); ++c) {
    for (int v : g.variables_of(c)) {
      const auto back = g.constraints_of(v);
      EXPECT_NE(std::find(back.begin(), back.end(), c), back.end());
    }
    total += g.constraint_degree(c);
  }
  EXPECT_EQ(total, static_cast<int>(g.edges().size()));
  EXPECT_THROW(BipartiteGraph(1, 2, {{0, 0, 1.0}, {0, 0, 1.0}}), std::exception);
  EXPECT_THROW(BipartiteGraph(1, 2, {{0, 5, 1.0}}), std::exception);
}

TEST(SatFeatures, ClauseExamples) {
  const Matrix c = sat_constraint_features(formula(3, {{1, -2, 3}, {-1, -2}, {1, 2}}));
  EXPECT_EQ(row(c, 0, 4), (std::vector<double>{3, 2, 1, 2.0}));
  EXPECT_EQ(row(c, 1, 4), (std::vector<double>{2, 0, 2, 0.0}));
  EXPECT_EQ(row(c, 2, 4), (std::vector<double>{2, 2, 0, 2.0}));
}

TEST(SatFeatures, VariableExamples) {
  const Matrix v = sat_variable_features(formula(2, {{1, 2}, {-1, 2}}));
  const auto x1 = row(v, 0, 6);
  EXPECT_EQ(x1[0], 2);
  EXPECT_EQ(x1[1], 1);
  EXPECT_EQ(x1[2], 1);
  EXPECT_EQ(x1[3], 1.0);
  EXPECT_DOUBLE_EQ(x1[4], 1.0 / 1.5);
  EXPECT_DOUBLE_EQ(x1[5], 2.0);
  const auto x2 = row(v, 1, 6);
  EXPECT_EQ(x2[0], 2);
  EXPECT_EQ(x2[1], 2);
  EXPECT_EQ(x2[2], 0);
  EXPECT_EQ(x2[3], 2.0);
  EXPECT_DOUBLE_EQ(x2[4], 2.0 / 1.5);
  EXPECT_EQ(x2[5], 0.0);
}

TEST(SatFeatures, AbsentVariableIsZero) {
  const Matrix v = sat_variable_features(formula(3, {{1, 2}, {-1, 2}}));
  EXPECT_EQ(row(v, 2, 6), (std::vector<double>(6, 0.0)));
  const Matrix none = sat_variable_features(formula(2, {}));
  EXPECT_TRUE(none.all_finite());
  EXPECT_EQ(row(none, 0, 6), (std::vector<double>(6, 0.0)));
}

TEST(MipFeatures, Examples) {
  const MipInstance m = sat_to_mip(formula(3, {{1, -2, 3}, {-1}, {1, 2}, {1, -3}}));
  const Matrix c = mip_constraint_features(m);
  EXPECT_EQ(row(c, 0, 6), (std::vector<double>{0, 0, 1, 0.0, 3, 1.0}));
  EXPECT_EQ(row(c, 1, 6), (std::vector<double>{0, 0, 1, 0.0, 1, 1.0}));
  const Matrix v = mip_variable_features(m);
  EXPECT_EQ(row(v, 0, 7), (std::vector<double>{1, 0, 0, 0.0, 1.0, 0.0, 4}));
  const MipInstance iso = sat_to_mip(formula(2, {{1}}));
  EXPECT_EQ(row(mip_variable_features(iso), 1, 7), (std::vector<double>{1, 0, 0, 0.0, 1.0, 0.0, 0}));
}

TEST(NodeFeatures, PaddingAndIndicator) {
  EXPECT_EQ(padded_feature_width(), 7u);
  EXPECT_EQ(model_input_width(), 8u);
  const CnfFormula f = gen_random_ksat(10, 30, 3, 1);
  const NodeFeatures nf = build_node_features(&f, SchemaId::kSat);
  ASSERT_EQ(nf.constraints.cols(), 8u);
  ASSERT_EQ(nf.variables.cols(), 8u);
  for (std::size_t r = 0; r < nf.constraints.rows(); ++r) {
    for (std::size_t j = 4; j < 7; ++j) EXPECT_EQ(nf.constraints(r, j), 0.0);
    EXPECT_EQ(nf.constraints(r, 7), 1.0);
  }
  for (std::size_t r = 0; r < nf.variables.rows(); ++r) {
    EXPECT_EQ(nf.variables(r, 6), 0.0);
    EXPECT_EQ(nf.variables(r, 7), 0.0);
  }
  const Matrix mc = nf.constraint_mask();
  EXPECT_EQ(mc(0, 3), 1.0);
  EXPECT_EQ(mc(0, 4), 0.0);
  EXPECT_EQ(mc(0, 7), 0.0);

  const MipInstance m = sat_to_mip(f);
  const NodeFeatures nm = build_node_features(&m, SchemaId::kMip);
  EXPECT_EQ(nm.constraints(0, 6), 0.0);
  EXPECT_EQ(nm.variables.rows(), 10u);
  EXPECT_THROW(build_node_features(&m, SchemaId::kSat), DataError);
  EXPECT_THROW(build_node_features(&f, SchemaId::kMip), DataError);
}

TEST(NodeFeatures, SatRowsFollowTautologyFilter) {
  const CnfFormula f = formula(2, {{1, -1}, {2, -1}});
  const NodeFeatures nf = build_node_features(&f, SchemaId::kSat);
  ASSERT_EQ(nf.constraints.rows(), 1u);
  EXPECT_EQ(nf.constraints(0, 0), 2.0);
  EXPECT_EQ(nf.constraints(0, 1), 1.0);
}

TEST(Standardizer, FitApply) {
  std::vector<NodeFeatures> corpus;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const CnfFormula f = gen_random_ksat(10, 20 + static_cast<int>(s) * 5, 3, s);
    corpus.push_back(build_node_features(&f, SchemaId::kSat));
  }
  const Standardizer st = Standardizer::fit(corpus);
  double sum = 0, sq = 0, n = 0;
  for (const NodeFeatures& nf : corpus) {
    const NodeFeatures z = st.apply(nf);
    EXPECT_EQ(z.constraints(0, 7), 1.0);  // constant indicator passes through
    EXPECT_EQ(z.constraints(0, 5), 0.0);
    for (std::size_t r = 0; r < z.variables.rows(); ++r) {
      sum += z.variables(r, 0);
      sq += z.variables(r, 0) * z.variables(r, 0);
      n += 1;
    }
  }
  EXPECT_NEAR(sum / n, 0.0, 1e-12);
  EXPECT_NEAR(sq / n, 1.0, 1e-9);
}

TEST(FeatureRecords, OneLinePerNode) {
  const CnfFormula f = formula(2, {{1, 2}});
  const std::string rec = write_feature_records(build_node_features(&f, SchemaId::kSat));
  EXPECT_EQ(std::count(rec.begin(), rec.end(), '\n'), 3);
}
