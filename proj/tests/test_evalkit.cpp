#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "satforge/error.hpp"
#include "satforge/evalkit.hpp"
#include "satforge/rng.hpp"

using namespace satforge;

TEST(Nmi, MatchesOracle) {
  Rng rng(1, Stream::kPermutation);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, 20));
    const int ca = static_cast<int>(rng.uniform_int(1, 6)), cb = static_cast<int>(rng.uniform_int(1, 6));
    std::vector<int> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(ca)));
      b[i] = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(cb)));
    }
    EXPECT_NEAR(nmi(a, b), oracle::nmi(a, b), 1e-9);
    const Purity p = purity(a, b);
    const oracle::PurityPair q = oracle::purity(a, b);
    EXPECT_NEAR(p.macro, q.macro, 1e-9);
    EXPECT_NEAR(p.weighted, q.weighted, 1e-9);
  }
}

TEST(Nmi, Definitional) {
  const std::vector<int> t{0, 0, 1, 1, 2, 2};
  const std::vector<int> relabeled{5, 5, 3, 3, 9, 9};
  EXPECT_NEAR(nmi(t, relabeled), 1.0, 1e-15);
  EXPECT_EQ(nmi(t, std::vector<int>(6, 0)), 0.0);
  EXPECT_EQ(nmi(std::vector<int>(3, 1), std::vector<int>(3, 4)), 1.0);
  const std::vector<int> ab{0, 0, 1, 1}, c{0, 0, 0, 1};
  EXPECT_NEAR(nmi(ab, c), oracle::nmi(ab, c), 1e-12);
  EXPECT_THROW(nmi(ab, t), DataError);
}

TEST(Purity, Definitional) {
  const std::vector<int> truth{0, 0, 1, 1, 1};
  const std::vector<int> clusters{0, 0, 0, 1, 1};
  const Purity p = purity(truth, clusters);
  EXPECT_NEAR(p.macro, 5.0 / 6.0, 1e-15);
  EXPECT_NEAR(p.weighted, 0.8, 1e-15);
  EXPECT_EQ(purity(truth, truth).macro, 1.0);
  std::vector<int> fourteen;
  for (int c = 0; c < 14; ++c)
    for (int r = 0; r < 3; ++r) fourteen.push_back(c);
  const Purity single = purity(fourteen, std::vector<int>(fourteen.size(), 0));
  EXPECT_NEAR(single.macro, 1.0 / 14.0, 1e-15);
  EXPECT_NEAR(single.weighted, 1.0 / 14.0, 1e-15);
}

TEST(KMeans, SeparablePairs) {
  const Matrix x(4, 1, {0.0, 0.2, 10.0, 10.4});
  KMeansOptions o;
  o.k = 2;
  const ClusterAssignment a = kmeans(x, o);
  EXPECT_EQ(a.labels[0], a.labels[1]);
  EXPECT_EQ(a.labels[2], a.labels[3]);
  EXPECT_NE(a.labels[0], a.labels[2]);
  EXPECT_NEAR(a.inertia, 0.02 + 0.08, 1e-12);
}

TEST(KMeans, KEqualsNAndDeterminism) {
  Rng rng(2, Stream::kClustering);
  Matrix x(12, 3);
  for (double& v : x.values()) v = rng.normal();
  KMeansOptions o;
  o.k = 12;
  EXPECT_EQ(kmeans(x, o).inertia, 0.0);
  o.k = 3;
  o.seed = 9;
  EXPECT_EQ(kmeans(x, o).labels, kmeans(x, o).labels);
  o.k = 13;
  EXPECT_THROW(kmeans(x, o), DataError);
  Matrix dup(4, 1, 1.0);
  o.k = 2;
  EXPECT_THROW(kmeans(dup, o), DataError);
}

TEST(PermutationNull, Extremes) {
  std::vector<int> t;
  for (int i = 0; i < 30; ++i) t.push_back(i % 3);
  const NullDistribution perfect = permutation_null(t, t, 500, 1);
  EXPECT_EQ(perfect.null_nmi.size(), 500u);
  EXPECT_EQ(perfect.percentile, 100.0);
  double mean_pct = 0;
  for (std::uint64_t s = 0; s < 40; ++s) {
    Rng rng(s, Stream::kGeneration);
    std::vector<int> random(t.size());
    for (int& v : random) v = static_cast<int>(rng.uniform_index(3));
    mean_pct += permutation_null(t, random, 200, s).percentile;
  }
  mean_pct /= 40;
  EXPECT_GT(mean_pct, 25.0);
  EXPECT_LT(mean_pct, 75.0);
}

TEST(Pca, LineAndIsotropic) {
  Matrix line(20, 3);
  for (std::size_t i = 0; i < 20; ++i) {
    line(i, 0) = static_cast<double>(i);
    line(i, 1) = 2.0 * static_cast<double>(i);
    line(i, 2) = -static_cast<double>(i);
  }
  const Projection p = pca_2d(line);
  EXPECT_NEAR(p.explained[0], 1.0, 1e-12);
  EXPECT_NEAR(p.explained[1], 0.0, 1e-12);
  Rng rng(3, Stream::kGeneration);
  Matrix iso(4000, 2);
  for (double& v : iso.values()) v = rng.normal();
  const Projection q = pca_2d(iso);
  EXPECT_NEAR(q.explained[0], 0.5, 0.05);
  EXPECT_NEAR(q.explained[1], 0.5, 0.05);
  EXPECT_EQ(q.coords.rows(), 4000u);
}

TEST(Stats, SampleStd) {
  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_NEAR(sample_std(v), std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_EQ(sample_std(std::vector<double>{2}), 0.0);
}

namespace {

EmbeddingTable blob_table(Variant v, double spread, std::uint64_t seed) {
  EmbeddingTable t;
  Rng rng(seed, Stream::kGeneration);
  const char* fams[] = {"a", "b", "c"};
  for (int i = 0; i < 36; ++i) {
    EmbeddingRow r;
    r.id = "i" + std::to_string(i);
    r.family = fams[i % 3];
    r.feasibility = (i / 3) % 2 ? Feasibility::kSat : Feasibility::kUnsat;
    r.variant = v;
    const int group = (i % 3) * 2 + (i / 3) % 2;
    for (int d = 0; d < 4; ++d) r.vector.push_back((d == group % 4 ? 5.0 : 0.0) + group * (d == 0) + spread * rng.normal());
    t.rows.push_back(r);
  }
  return t;
}

}  // namespace

TEST(Report, FourVariants) {
  std::vector<EmbeddingTable> tables{blob_table(Variant::kForgeMip, 0.1, 1), blob_table(Variant::kForgeMipSat, 0.5, 2),
                                     blob_table(Variant::kForgeSat, 1.0, 3), blob_table(Variant::kStaticSat, 3.0, 4)};
  ReportOptions o;
  o.null_trials = 100;
  const Report r = report(tables, o);
  ASSERT_EQ(r.variants.size(), 4u);
  EXPECT_EQ(r.groups.size(), 6u);
  EXPECT_EQ(r.variants[0].metrics.k, 6);
  EXPECT_GT(r.variants[0].metrics.nmi_mean, 0.9);
  EXPECT_GT(r.variants[0].metrics.null_percentile, 99.0);
  for (const auto& v : r.variants) EXPECT_NE(v.svg.find("<svg"), std::string::npos);
  const std::string table = r.metrics_table();
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 5);
  EXPECT_EQ(report(tables, o).metrics_table(), table);
}

TEST(Report, UnknownFeasibilityExcludedFromCompositeGroups) {
  EmbeddingTable t = blob_table(Variant::kStaticSat, 0.5, 1);
  t.rows[0].feasibility.reset();
  t.rows[1].feasibility.reset();
  ReportOptions o;
  std::vector<EmbeddingTable> tables{t};
  const Report r = report(tables, o);
  EXPECT_EQ(r.excluded_unknown, 2u);
  o.family_only = true;
  const Report fam = report(tables, o);
  EXPECT_EQ(fam.excluded_unknown, 0u);
  EXPECT_EQ(fam.groups.size(), 3u);
}

TEST(Report, MismatchedInstanceSetsRejected) {
  EmbeddingTable a = blob_table(Variant::kForgeSat, 0.5, 1);
  EmbeddingTable b = blob_table(Variant::kStaticSat, 0.5, 1);
  b.rows.pop_back();
  std::vector<EmbeddingTable> tables{a, b};
  EXPECT_THROW(report(tables, ReportOptions{}), DataError);
}
