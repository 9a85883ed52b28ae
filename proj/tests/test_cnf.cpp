#include <gtest/gtest.h>

#include "oracles.hpp"
#include "satforge/cnf.hpp"
#include "satforge/dpll.hpp"
#include "satforge/error.hpp"
#include "satforge/generators.hpp"
#include "satforge/rng.hpp"

using namespace satforge;

namespace {

CnfFormula random_formula(Rng& rng, int max_vars, int max_clauses) {
  CnfFormula f;
  f.num_vars = static_cast<int>(rng.uniform_int(1, max_vars));
  const int m = static_cast<int>(rng.uniform_int(0, max_clauses));
  for (int i = 0; i < m; ++i) {
    Clause c;
    const int w = static_cast<int>(rng.uniform_int(1, 4));
    for (int j = 0; j < w; ++j) {
      const int v = static_cast<int>(rng.uniform_int(1, f.num_vars));
      c.push_back(rng.bernoulli(0.5) ? v : -v);
    }
    f.clauses.push_back(c);
  }
  return f;
}

}  // namespace

TEST(Dimacs, ParsesClauses) {
  const DimacsParse p = parse_dimacs("p cnf 2 2\n1 -2 0\n2 0\n");
  EXPECT_EQ(p.formula.num_vars, 2);
  ASSERT_EQ(p.formula.clauses.size(), 2u);
  EXPECT_EQ(p.formula.clauses[0], (Clause{1, -2}));
  EXPECT_EQ(p.formula.clauses[1], (Clause{2}));
  EXPECT_FALSE(p.clause_count_mismatch);
}

TEST(Dimacs, MissingTrailingNewline) {
  const DimacsParse p = parse_dimacs("p cnf 1 1\n1 0");
  EXPECT_EQ(p.formula.num_vars, 1);
  EXPECT_EQ(p.formula.clauses, (std::vector<Clause>{{1}}));
}

TEST(Dimacs, CommentsAndClauseSpanningLines) {
  const DimacsParse p = parse_dimacs("c hello\np cnf 3 2\n1 2\nc between\n3 0 -1 0\n");
  EXPECT_EQ(p.formula.clauses, (std::vector<Clause>{{1, 2, 3}, {-1}}));
}

TEST(Dimacs, Errors) {
  EXPECT_THROW(parse_dimacs("p cnf 1 1\n2 0\n"), DataError);
  EXPECT_THROW(parse_dimacs("1 0\n"), DataError);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\np cnf 2 1\n1 0\n"), DataError);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 2\n"), DataError);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 x 0\n"), DataError);
}

TEST(Dimacs, ClauseCountMismatchIsFlagged) {
  const DimacsParse p = parse_dimacs("p cnf 2 3\n1 0\n");
  EXPECT_TRUE(p.clause_count_mismatch);
  EXPECT_EQ(p.formula.clauses.size(), 1u);
}

TEST(Dimacs, Writes) {
  CnfFormula f;
  f.num_vars = 2;
  f.clauses = {{1, -2}};
  EXPECT_EQ(write_dimacs(f), "p cnf 2 1\n1 -2 0\n");
  EXPECT_EQ(write_dimacs(CnfFormula{}), "p cnf 0 0\n");
}

TEST(Dimacs, RoundTrip) {
  Rng rng(11, Stream::kGeneration);
  for (int t = 0; t < 100; ++t) {
    const CnfFormula f = random_formula(rng, 12, 20);
    const DimacsParse p = parse_dimacs(write_dimacs(f));
    EXPECT_EQ(p.formula.num_vars, f.num_vars);
    EXPECT_EQ(p.formula.clauses, f.clauses);
  }
}

TEST(Dpll, Basics) {
  CnfFormula contra;
  contra.num_vars = 1;
  contra.clauses = {{1}, {-1}};
  EXPECT_EQ(dpll_solve(contra, 100).status, SolveStatus::kUnsat);

  const SolveResult empty = dpll_solve(CnfFormula{}, 100);
  EXPECT_EQ(empty.status, SolveStatus::kSat);
  ASSERT_TRUE(empty.assignment);
  EXPECT_TRUE(empty.assignment->values.empty());

  CnfFormula with_empty;
  with_empty.num_vars = 1;
  with_empty.clauses = {{}};
  EXPECT_EQ(dpll_solve(with_empty, 100).status, SolveStatus::kUnsat);
  EXPECT_THROW(dpll_solve(contra, 0), std::invalid_argument);
}

TEST(Dpll, AgreesWithTruthTable) {
  Rng rng(5, Stream::kGeneration);
  for (int t = 0; t < 500; ++t) {
    const CnfFormula f = random_formula(rng, 10, 40);
    const SolveResult r = dpll_solve(f, 1000000);
    ASSERT_NE(r.status, SolveStatus::kBudgetExceeded);
    const bool sat = oracle::truth_table_sat(f);
    ASSERT_EQ(r.status == SolveStatus::kSat, sat) << write_dimacs(f);
    if (sat) {
      ASSERT_TRUE(r.assignment);
      EXPECT_TRUE(satisfies(f, *r.assignment));
    }
  }
}

TEST(Dpll, BudgetExhaustion) {
  // Pigeonhole 7 into 6 needs many decisions.
  CnfFormula f;
  const int holes = 6, pigeons = 7;
  f.num_vars = holes * pigeons;
  auto x = [&](int p, int h) { return p * holes + h + 1; };
  for (int p = 0; p < pigeons; ++p) {
    Clause c;
    for (int h = 0; h < holes; ++h) c.push_back(x(p, h));
    f.clauses.push_back(c);
  }
  for (int h = 0; h < holes; ++h)
    for (int a = 0; a < pigeons; ++a)
      for (int b = a + 1; b < pigeons; ++b) f.clauses.push_back({-x(a, h), -x(b, h)});
  EXPECT_EQ(dpll_solve(f, 5).status, SolveStatus::kBudgetExceeded);
}

TEST(Generators, RandomKsatDeterministic) {
  const CnfFormula a = gen_random_ksat(5, 3, 3, 7);
  const CnfFormula b = gen_random_ksat(5, 3, 3, 7);
  EXPECT_EQ(a.clauses, b.clauses);
  ASSERT_EQ(a.clauses.size(), 3u);
  for (const Clause& c : a.clauses) {
    ASSERT_EQ(c.size(), 3u);
    EXPECT_NE(std::abs(c[0]), std::abs(c[1]));
    EXPECT_NE(std::abs(c[0]), std::abs(c[2]));
    EXPECT_NE(std::abs(c[1]), std::abs(c[2]));
  }
  EXPECT_NE(gen_random_ksat(5, 3, 3, 8).clauses, a.clauses);
  EXPECT_THROW(gen_random_ksat(2, 3, 3, 1), std::invalid_argument);
}

TEST(Generators, RandomKsatNearThreshold) {
  int sat = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const SolveResult r = dpll_solve(gen_random_ksat(30, 129, 3, s), 10000000);
    ASSERT_NE(r.status, SolveStatus::kBudgetExceeded);
    sat += r.status == SolveStatus::kSat;
  }
  EXPECT_GE(sat, 20);
  EXPECT_LE(sat, 80);
}

TEST(Generators, SrPair) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto [unsat, sat] = gen_sr_pair(10, s);
    EXPECT_EQ(dpll_solve(unsat, 1000000).status, SolveStatus::kUnsat);
    EXPECT_EQ(dpll_solve(sat, 1000000).status, SolveStatus::kSat);
    ASSERT_EQ(unsat.clauses.size(), sat.clauses.size());
    for (std::size_t i = 0; i + 1 < sat.clauses.size(); ++i) EXPECT_EQ(unsat.clauses[i], sat.clauses[i]);
    EXPECT_EQ(unsat.clauses.back()[0], -sat.clauses.back()[0]);
  }
  auto [u1, s1] = gen_sr_pair(10, 3);
  auto [u2, s2] = gen_sr_pair(10, 3);
  EXPECT_EQ(u1.clauses, u2.clauses);
  EXPECT_EQ(s1.clauses, s2.clauses);
}

TEST(Generators, CliqueSmallCases) {
  EXPECT_EQ(dpll_solve(encode_clique(SimpleGraph::complete(4), 3), 100000).status, SolveStatus::kSat);
  EXPECT_EQ(dpll_solve(encode_clique(SimpleGraph(4), 2), 100000).status, SolveStatus::kUnsat);
}

TEST(Generators, CliqueMatchesBruteForce) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const SimpleGraph g = SimpleGraph::random(10, 0.5, s);
    const SolveResult r = dpll_solve(encode_clique(g, 4), 10000000);
    ASSERT_NE(r.status, SolveStatus::kBudgetExceeded);
    EXPECT_EQ(r.status == SolveStatus::kSat, oracle::has_clique(g, 4)) << "seed " << s;
  }
}

TEST(Generators, VertexCoverSmallCases) {
  SimpleGraph edge(2);
  edge.add_edge(0, 1);
  EXPECT_EQ(dpll_solve(encode_vertex_cover(edge, 1), 1000).status, SolveStatus::kSat);
  const SimpleGraph tri = SimpleGraph::complete(3);
  EXPECT_EQ(dpll_solve(encode_vertex_cover(tri, 1), 1000).status, SolveStatus::kUnsat);
  EXPECT_EQ(dpll_solve(encode_vertex_cover(tri, 2), 1000).status, SolveStatus::kSat);
}

TEST(Generators, VertexCoverMatchesBruteForce) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const SimpleGraph g = SimpleGraph::random(9, 0.35, s);
    const int k = 2 + static_cast<int>(s % 4);
    const CnfFormula f = encode_vertex_cover(g, k);
    EXPECT_EQ(oracle::truth_table_sat(f), oracle::has_vertex_cover(g, k)) << "seed " << s;
    EXPECT_EQ(dpll_solve(f, 1000000).status == SolveStatus::kSat, oracle::has_vertex_cover(g, k));
  }
}
