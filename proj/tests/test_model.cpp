#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "satforge/error.hpp"
#include "satforge/model.hpp"
#include "satforge/optim.hpp"
#include "satforge/rng.hpp"
#include "satforge/train.hpp"

using namespace satforge;

namespace {

ModelDims small_dims() {
  ModelDims d;
  d.hidden = 6;
  d.latent = 4;
  d.codebook = 5;
  return d;
}

}  // namespace

TEST(Quantize, NearestWithLowestIndexTies) {
  const Matrix book(2, 2, {0, 0, 1, 1});
  QuantizeResult q = quantize(Matrix(1, 2, {0.1, 0.2}), book);
  EXPECT_EQ(q.codes, (std::vector<int>{0}));
  EXPECT_EQ(q.quantized, Matrix(1, 2, {0, 0}));
  q = quantize(Matrix(1, 2, {0.5, 0.5}), book);
  EXPECT_EQ(q.codes, (std::vector<int>{0}));
  q = quantize(Matrix(1, 2, {1, 1}), book);
  EXPECT_EQ(q.codes, (std::vector<int>{1}));
  EXPECT_EQ(q.commitment_loss, 0.0);
  EXPECT_THROW(quantize(Matrix(1, 3), book), ShapeError);
}

TEST(Quantize, LossIsMeanSquaredDistance) {
  const Matrix book(2, 2, {0, 0, 1, 1});
  const QuantizeResult q = quantize(Matrix(2, 2, {0.1, 0.2, 1, 2}), book);
  EXPECT_NEAR(q.codebook_loss, ((0.01 + 0.04) + 1.0) / 2.0, 1e-15);
  EXPECT_EQ(q.codebook_loss, q.commitment_loss);
}

TEST(Quantize, Idempotent) {
  Rng rng(1, Stream::kInit);
  Matrix book(6, 3), z(20, 3);
  for (double& v : book.values()) v = rng.normal();
  for (double& v : z.values()) v = rng.normal();
  const QuantizeResult q1 = quantize(z, book);
  const QuantizeResult q2 = quantize(q1.quantized, book);
  EXPECT_EQ(q1.codes, q2.codes);
  EXPECT_EQ(q2.commitment_loss, 0.0);
}

TEST(MeanAggregate, HandCheck) {
  const BipartiteGraph g(1, 2, {{0, 0, 1.0}, {0, 1, -1.0}});
  const Matrix h(2, 2, {1, 0, 0, 1});
  const Matrix agg = mean_aggregate(g.constraint_offsets(), g.constraint_neighbors(), h);
  EXPECT_EQ(agg, Matrix(1, 2, {0.5, 0.5}));
  const Matrix back = mean_aggregate_backward(g.constraint_offsets(), g.constraint_neighbors(), Matrix(1, 2, 1.0), 2);
  EXPECT_EQ(back, Matrix(2, 2, 0.5));
  const BipartiteGraph iso(1, 3, {{0, 0, 1.0}});
  const Matrix v = mean_aggregate(iso.variable_offsets(), iso.variable_neighbors(), Matrix(1, 2, 3.0));
  EXPECT_EQ(v(2, 0), 0.0);
}

TEST(Encoder, ZeroFeaturesGiveSymmetricLatents) {
  // Two disjoint identical clauses: every constraint is structurally alike, as is every variable.
  CnfFormula f;
  f.num_vars = 4;
  f.clauses = {{1, 2}, {3, 4}};
  GraphInstance g = fixture::graph_instance(f);
  g.features.constraints.fill(0.0);
  g.features.variables.fill(0.0);
  const VqGae model(small_dims(), 3);
  const Matrix z = model.encode(g.graph, g.features);
  ASSERT_EQ(z.rows(), 6u);
  for (std::size_t j = 0; j < z.cols(); ++j) {
    EXPECT_EQ(z(0, j), z(1, j));
    for (std::size_t r = 3; r < 6; ++r) EXPECT_EQ(z(2, j), z(r, j));
  }
}

TEST(Encoder, ConstraintPermutationEquivariance) {
  const CnfFormula f = fixture::five_clauses();
  CnfFormula swapped = f;
  std::swap(swapped.clauses[0], swapped.clauses[3]);
  const GraphInstance a = fixture::graph_instance(f);
  const GraphInstance b = fixture::graph_instance(swapped);
  const VqGae model(small_dims(), 4);
  const Matrix za = model.encode(a.graph, a.features);
  const Matrix zb = model.encode(b.graph, b.features);
  for (std::size_t j = 0; j < za.cols(); ++j) {
    EXPECT_NEAR(za(0, j), zb(3, j), 1e-12);
    EXPECT_NEAR(za(3, j), zb(0, j), 1e-12);
    for (std::size_t r = 5; r < za.rows(); ++r) EXPECT_NEAR(za(r, j), zb(r, j), 1e-12);
  }
}

TEST(Decoder, BilinearIdentity) {
  ModelDims d = small_dims();
  VqGae model(d, 1);
  model.param(VqGae::kEdgeBilinear).value = Matrix::identity(d.latent);
  Matrix q(2, d.latent, 0.0);
  q(0, 1) = 1.0;
  q(1, 1) = 1.0;
  const std::vector<NodePair> pairs{{0, 0}};
  EXPECT_EQ(model.decode_edges(q, 1, pairs), (std::vector<double>{1.0}));
}

TEST(Decoder, ZeroLogitsGiveLn2) {
  const GraphInstance g = fixture::graph_instance(fixture::five_clauses());
  VqGae model(small_dims(), 2);
  model.param(VqGae::kEdgeBilinear).value.fill(0.0);
  const VqGae::Forward fwd = model.forward(g.graph, g.features, {}, LossWeights{});
  EXPECT_NEAR(fwd.loss.edge, std::log(2.0), 1e-15);
}

TEST(Loss, DecompositionIdentity) {
  const GraphInstance g = fixture::graph_instance(fixture::five_clauses());
  const VqGae model(small_dims(), 5);
  Rng rng(5, Stream::kNegatives);
  const auto negs = sample_negative_edges(g.graph, g.graph.edges().size(), rng);
  const LossWeights w{0.3, 0.7};
  const LossBreakdown l = model.forward(g.graph, g.features, negs, w).loss;
  EXPECT_EQ(l.total, l.feature + w.lambda_edge * l.edge + l.codebook + w.beta * l.commitment);
  EXPECT_GE(l.feature, 0.0);
  EXPECT_GE(l.edge, 0.0);
  EXPECT_GE(l.codebook, 0.0);
}

TEST(Loss, PerfectReconstructionHasZeroFeatureLoss) {
  const GraphInstance g = fixture::graph_instance(fixture::five_clauses());
  ModelDims d = small_dims();
  VqGae model(d, 6);
  for (auto p : {VqGae::kHeadWc, VqGae::kHeadWv}) model.param(p).value.fill(0.0);
  // Constant targets are reproduced exactly by the head biases.
  NodeFeatures feats = g.features;
  feats.constraints.fill(0.0);
  feats.variables.fill(0.0);
  for (std::size_t r = 0; r < feats.constraints.rows(); ++r) feats.constraints(r, 7) = 1.0;
  const VqGae::Forward fwd = model.forward(g.graph, feats, {}, LossWeights{});
  EXPECT_EQ(fwd.loss.feature, 0.0);
}

TEST(NegativeSampling, AvoidsEdges) {
  const GraphInstance g = fixture::graph_instance(fixture::five_clauses());
  Rng rng(9, Stream::kNegatives);
  const auto negs = sample_negative_edges(g.graph, 200, rng);
  ASSERT_EQ(negs.size(), 200u);
  for (const NodePair& p : negs) EXPECT_FALSE(g.graph.has_edge(p.constraint, p.variable));
  const BipartiteGraph full(1, 1, {{0, 0, 1.0}});
  EXPECT_TRUE(sample_negative_edges(full, 5, rng).empty());
}

TEST(GradientCheck, SmallModelAllParameters) {
  GraphInstance g = fixture::graph_instance(fixture::five_clauses());
  const std::vector<NodeFeatures> raw{g.features};
  g.features = Standardizer::fit(raw).apply(g.features);
  TrainConfig config;
  config.hidden = 6;
  config.latent = 4;
  config.codebook_size = 5;
  config.epochs = 20;
  config.seed = 7;
  VqGae model = train({g}, config).model;
  Rng rng(7, Stream::kNegatives);
  const auto negs = sample_negative_edges(g.graph, g.graph.edges().size(), rng);
  const LossWeights w{0.25, 1.0};
  const VqGae::Forward fwd = model.forward(g.graph, g.features, negs, w);
  const FrozenQuantization frozen = model.freeze(fwd);
  for (Parameter& p : model.params()) p.zero_grad();
  model.backward(g.graph, g.features, model.forward(g.graph, g.features, negs, w, &frozen), w);
  auto loss = [&] { return model.forward(g.graph, g.features, negs, w, &frozen).loss.total; };
  std::vector<Parameter*> ps = model.param_ptrs();
  const GradCheckReport r = finite_diff_check(loss, ps);
  EXPECT_EQ(r.entries.size(), static_cast<std::size_t>(VqGae::kParamCount));
  for (const GradCheckEntry& e : r.entries) EXPECT_LT(e.max_rel_error, 1e-4) << e.param;
}
