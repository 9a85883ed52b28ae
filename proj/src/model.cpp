#include "satforge/model.hpp"

#include <cmath>
#include <limits>

#include "satforge/error.hpp"

namespace satforge {

LossBreakdown& LossBreakdown::operator+=(const LossBreakdown& o) {
  feature += o.feature;
  edge += o.edge;
  codebook += o.codebook;
  commitment += o.commitment;
  total += o.total;
  return *this;
}

std::vector<NodePair> sample_negative_edges(const BipartiteGraph& graph, std::size_t count, Rng& rng) {
  const std::size_t nc = static_cast<std::size_t>(graph.n_constraints());
  const std::size_t nv = static_cast<std::size_t>(graph.n_variables());
  std::vector<NodePair> out;
  if (nc * nv <= graph.edges().size()) return out;
  out.reserve(count);
  while (out.size() < count) {
    const int c = static_cast<int>(rng.uniform_index(nc));
    const int v = static_cast<int>(rng.uniform_index(nv));
    if (!graph.has_edge(c, v)) out.push_back({c, v});
  }
  return out;
}

Matrix mean_aggregate(const std::vector<int>& offsets, const std::vector<int>& neighbors, const Matrix& source) {
  const std::size_t rows = offsets.size() - 1;
  Matrix out(rows, source.cols());
  for (std::size_t i = 0; i < rows; ++i) {
    const int begin = offsets[i], end = offsets[i + 1];
    if (begin == end) continue;
    auto dst = out.row(i);
    for (int e = begin; e < end; ++e) {
      auto src = source.row(static_cast<std::size_t>(neighbors[static_cast<std::size_t>(e)]));
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
    }
    const double inv = 1.0 / (end - begin);
    for (double& v : dst) v *= inv;
  }
  return out;
}

Matrix mean_aggregate_backward(const std::vector<int>& offsets, const std::vector<int>& neighbors,
                               const Matrix& upstream, std::size_t source_rows) {
  Matrix out(source_rows, upstream.cols());
  const std::size_t rows = offsets.size() - 1;
  for (std::size_t i = 0; i < rows; ++i) {
    const int begin = offsets[i], end = offsets[i + 1];
    if (begin == end) continue;
    const double inv = 1.0 / (end - begin);
    auto g = upstream.row(i);
    for (int e = begin; e < end; ++e) {
      auto dst = out.row(static_cast<std::size_t>(neighbors[static_cast<std::size_t>(e)]));
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += g[j] * inv;
    }
  }
  return out;
}

QuantizeResult quantize(const Matrix& z, const Matrix& codebook) {
  if (z.cols() != codebook.cols()) throw ShapeError("quantize: latent and codebook widths differ");
  if (codebook.rows() == 0) throw ShapeError("quantize: empty codebook");
  QuantizeResult r;
  r.codes.resize(z.rows());
  r.quantized = Matrix(z.rows(), z.cols());
  double sq = 0.0;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    auto zi = z.row(i);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < codebook.rows(); ++k) {
      auto ek = codebook.row(k);
      double d = 0.0;
      for (std::size_t j = 0; j < zi.size(); ++j) {
        const double t = zi[j] - ek[j];
        d += t * t;
      }
      if (d < best) {
        best = d;
        best_k = k;
      }
    }
    r.codes[i] = static_cast<int>(best_k);
    auto qi = r.quantized.row(i);
    auto ek = codebook.row(best_k);
    std::copy(ek.begin(), ek.end(), qi.begin());
    sq += best;
  }
  // Forward values of both terms coincide; they differ in where gradients flow.
  const double mean = z.rows() == 0 ? 0.0 : sq / static_cast<double>(z.rows());
  r.codebook_loss = mean;
  r.commitment_loss = mean;
  return r;
}

namespace {

Matrix glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Matrix m(fan_in, fan_out);
  for (double& v : m.values()) v = (2.0 * rng.uniform() - 1.0) * a;
  return m;
}

Matrix slice_rows(const Matrix& m, std::size_t begin, std::size_t end) {
  Matrix out(end - begin, m.cols());
  for (std::size_t i = begin; i < end; ++i) {
    auto src = m.row(i);
    std::copy(src.begin(), src.end(), out.row(i - begin).begin());
  }
  return out;
}

Matrix stack_rows(const Matrix& top, const Matrix& bottom) {
  Matrix out(top.rows() + bottom.rows(), top.cols());
  std::copy(top.values().begin(), top.values().end(), out.values().begin());
  std::copy(bottom.values().begin(), bottom.values().end(), out.values().begin() + static_cast<std::ptrdiff_t>(top.size()));
  return out;
}

// x*Ws + bs + agg*Wn + bn
Matrix sage_pre(const Matrix& x, const Matrix& agg, const Parameter& ws, const Parameter& bs, const Parameter& wn,
                const Parameter& bn) {
  Matrix out = add_row(matmul(x, ws.value), bs.value);
  out += add_row(matmul(agg, wn.value), bn.value);
  return out;
}

// Accumulates parameter gradients of sage_pre and returns (dx, dagg).
std::pair<Matrix, Matrix> sage_backward(const Matrix& x, const Matrix& agg, const Matrix& upstream, Parameter& ws,
                                        Parameter& bs, Parameter& wn, Parameter& bn) {
  ws.grad += matmul_tn(x, upstream);
  bs.grad += sum_rows(upstream);
  wn.grad += matmul_tn(agg, upstream);
  bn.grad += sum_rows(upstream);
  return {matmul_nt(upstream, ws.value), matmul_nt(upstream, wn.value)};
}

}  // namespace

VqGae::VqGae(const ModelDims& dims, std::uint64_t seed) : dims_(dims) {
  if (dims.codebook < 2) throw std::invalid_argument("codebook size must be at least 2");
  Rng rng(seed, Stream::kInit);
  const std::size_t in = dims.input, h = dims.hidden, d = dims.latent, out = dims.feature_out;
  params_.resize(kParamCount);
  auto layer = [&](std::size_t base, const std::string& prefix, std::size_t fan_in, std::size_t fan_out) {
    for (const char* side : {"c", "v"}) {
      params_[base++] = Parameter(prefix + ".self.W" + side, glorot(fan_in, fan_out, rng));
      params_[base++] = Parameter(prefix + ".self.b" + side, Matrix(1, fan_out));
      params_[base++] = Parameter(prefix + ".neigh.W" + side, glorot(fan_in, fan_out, rng));
      params_[base++] = Parameter(prefix + ".neigh.b" + side, Matrix(1, fan_out));
    }
  };
  layer(kL1SelfWc, "enc1", in, h);
  layer(kL2SelfWc, "enc2", h, d);
  Matrix codes(dims.codebook, d);
  const double bound = 1.0 / static_cast<double>(dims.codebook);
  for (double& v : codes.values()) v = (2.0 * rng.uniform() - 1.0) * bound;
  params_[kCodebook] = Parameter("codebook", std::move(codes));
  params_[kTrunkW] = Parameter("dec.trunk.W", glorot(d, h, rng));
  params_[kTrunkB] = Parameter("dec.trunk.b", Matrix(1, h));
  params_[kHeadWc] = Parameter("dec.head.Wc", glorot(h, out, rng));
  params_[kHeadBc] = Parameter("dec.head.bc", Matrix(1, out));
  params_[kHeadWv] = Parameter("dec.head.Wv", glorot(h, out, rng));
  params_[kHeadBv] = Parameter("dec.head.bv", Matrix(1, out));
  params_[kEdgeBilinear] = Parameter("dec.edge.B", glorot(d, d, rng));
}

std::vector<Parameter*> VqGae::param_ptrs() {
  std::vector<Parameter*> out;
  for (Parameter& p : params_) out.push_back(&p);
  return out;
}

Matrix VqGae::encode(const BipartiteGraph& graph, const NodeFeatures& features, EncoderCache* cache) const {
  const Matrix& xc = features.constraints;
  const Matrix& xv = features.variables;
  if (xc.cols() != dims_.input || xv.cols() != dims_.input) {
    throw ShapeError("encode: feature width " + std::to_string(xc.cols()) + " does not match model input width " +
                     std::to_string(dims_.input));
  }
  if (xc.rows() != static_cast<std::size_t>(graph.n_constraints()) ||
      xv.rows() != static_cast<std::size_t>(graph.n_variables())) {
    throw ShapeError("encode: feature rows do not match graph node counts");
  }
  EncoderCache local;
  EncoderCache& c = cache ? *cache : local;
  const auto& co = graph.constraint_offsets();
  const auto& cn = graph.constraint_neighbors();
  const auto& vo = graph.variable_offsets();
  const auto& vn = graph.variable_neighbors();
  const auto& p = params_;

  c.agg1_c = mean_aggregate(co, cn, xv);
  c.agg1_v = mean_aggregate(vo, vn, xc);
  c.pre1_c = sage_pre(xc, c.agg1_c, p[kL1SelfWc], p[kL1SelfBc], p[kL1NeighWc], p[kL1NeighBc]);
  c.pre1_v = sage_pre(xv, c.agg1_v, p[kL1SelfWv], p[kL1SelfBv], p[kL1NeighWv], p[kL1NeighBv]);
  c.h1_c = relu(c.pre1_c);
  c.h1_v = relu(c.pre1_v);
  c.agg2_c = mean_aggregate(co, cn, c.h1_v);
  c.agg2_v = mean_aggregate(vo, vn, c.h1_c);
  Matrix zc = sage_pre(c.h1_c, c.agg2_c, p[kL2SelfWc], p[kL2SelfBc], p[kL2NeighWc], p[kL2NeighBc]);
  Matrix zv = sage_pre(c.h1_v, c.agg2_v, p[kL2SelfWv], p[kL2SelfBv], p[kL2NeighWv], p[kL2NeighBv]);
  c.z = stack_rows(zc, zv);
  return c.z;
}

std::pair<Matrix, Matrix> VqGae::decode_features(const Matrix& quantized, int n_constraints) const {
  const auto& p = params_;
  Matrix trunk = relu(add_row(matmul(quantized, p[kTrunkW].value), p[kTrunkB].value));
  const std::size_t nc = static_cast<std::size_t>(n_constraints);
  Matrix rc = add_row(matmul(slice_rows(trunk, 0, nc), p[kHeadWc].value), p[kHeadBc].value);
  Matrix rv = add_row(matmul(slice_rows(trunk, nc, trunk.rows()), p[kHeadWv].value), p[kHeadBv].value);
  return {std::move(rc), std::move(rv)};
}

std::vector<double> VqGae::decode_edges(const Matrix& quantized, int n_constraints,
                                        std::span<const NodePair> pairs) const {
  const Matrix& b = params_[kEdgeBilinear].value;
  std::vector<double> logits(pairs.size());
  const std::size_t d = b.rows();
  std::vector<double> bq(d);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto qc = quantized.row(static_cast<std::size_t>(pairs[i].constraint));
    auto qv = quantized.row(static_cast<std::size_t>(n_constraints + pairs[i].variable));
    double s = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
      auto br = b.row(r);
      double t = 0.0;
      for (std::size_t k = 0; k < d; ++k) t += br[k] * qv[k];
      s += qc[r] * t;
    }
    logits[i] = s;
  }
  return logits;
}

VqGae::Forward VqGae::forward(const BipartiteGraph& graph, const NodeFeatures& features,
                              std::span<const NodePair> negatives, const LossWeights& weights,
                              const FrozenQuantization* frozen) const {
  Forward f;
  const Matrix z = encode(graph, features, &f.enc);
  const Matrix& book = codebook();
  const std::size_t n = z.rows();
  const std::size_t d = z.cols();
  const double inv_count = n == 0 ? 0.0 : 1.0 / static_cast<double>(n);

  if (frozen) {
    if (frozen->codes.size() != n || !frozen->z.same_shape(z) || !frozen->selected.same_shape(z)) {
      throw ShapeError("forward: frozen quantization does not match the instance");
    }
    f.codes = frozen->codes;
    f.z_detached = frozen->z;
    f.selected_detached = frozen->selected;
  } else {
    QuantizeResult q = quantize(z, book);
    f.codes = std::move(q.codes);
    f.z_detached = z;
    f.selected_detached = q.quantized;
  }
  f.selected = Matrix(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    auto src = book.row(static_cast<std::size_t>(f.codes[i]));
    std::copy(src.begin(), src.end(), f.selected.row(i).begin());
  }
  // Straight-through value z + sg(e - z).
  if (frozen) {
    f.st_input = z;
    for (std::size_t k = 0; k < z.size(); ++k) f.st_input.values()[k] += frozen->selected.values()[k] - frozen->z.values()[k];
  } else {
    f.st_input = f.selected;
  }
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double a = f.z_detached.values()[k] - f.selected.values()[k];
    const double b = z.values()[k] - f.selected_detached.values()[k];
    f.loss.codebook += a * a;
    f.loss.commitment += b * b;
  }
  f.loss.codebook *= inv_count;
  f.loss.commitment *= inv_count;

  // Feature reconstruction over each side's native columns.
  const auto& p = params_;
  const std::size_t nc = static_cast<std::size_t>(graph.n_constraints());
  f.trunk_pre = add_row(matmul(f.st_input, p[kTrunkW].value), p[kTrunkB].value);
  f.trunk = relu(f.trunk_pre);
  f.recon_c = add_row(matmul(slice_rows(f.trunk, 0, nc), p[kHeadWc].value), p[kHeadBc].value);
  f.recon_v = add_row(matmul(slice_rows(f.trunk, nc, n), p[kHeadWv].value), p[kHeadBv].value);
  const Matrix mask_c = features.constraint_mask();
  const Matrix mask_v = features.variable_mask();
  double count = 0.0;
  for (double m : mask_c.values()) count += m;
  for (double m : mask_v.values()) count += m;
  f.grad_recon_c = Matrix(f.recon_c.rows(), f.recon_c.cols());
  f.grad_recon_v = Matrix(f.recon_v.rows(), f.recon_v.cols());
  auto feature_side = [&](const Matrix& recon, const Matrix& target, const Matrix& mask, Matrix& grad) {
    for (std::size_t i = 0; i < recon.rows(); ++i) {
      for (std::size_t j = 0; j < recon.cols(); ++j) {
        if (mask(i, j) == 0.0) continue;
        const double diff = recon(i, j) - target(i, j);
        f.loss.feature += diff * diff;
        grad(i, j) = 2.0 * diff / count;
      }
    }
  };
  if (count > 0.0) {
    feature_side(f.recon_c, features.constraints, mask_c, f.grad_recon_c);
    feature_side(f.recon_v, features.variables, mask_v, f.grad_recon_v);
    f.loss.feature /= count;
  }

  // Edge reconstruction: true edges labeled 1, then negatives labeled 0.
  f.pairs.reserve(graph.edges().size() + negatives.size());
  for (const Edge& e : graph.edges()) f.pairs.push_back({e.constraint, e.variable});
  f.pairs.insert(f.pairs.end(), negatives.begin(), negatives.end());
  std::vector<double> labels(f.pairs.size(), 0.0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(graph.edges().size()), 1.0);
  f.logits = decode_edges(f.st_input, graph.n_constraints(), f.pairs);
  VectorLoss bce = bce_logits_loss(f.logits, labels);
  f.loss.edge = bce.value;
  f.grad_logits = std::move(bce.grad);

  f.loss.total = f.loss.feature + weights.lambda_edge * f.loss.edge + f.loss.codebook + weights.beta * f.loss.commitment;
  return f;
}

void VqGae::backward(const BipartiteGraph& graph, const NodeFeatures& features, const Forward& f,
                     const LossWeights& weights) {
  auto& p = params_;
  const std::size_t nc = static_cast<std::size_t>(graph.n_constraints());
  const std::size_t nv = static_cast<std::size_t>(graph.n_variables());
  const std::size_t n = nc + nv;
  const std::size_t d = dims_.latent;
  const double inv_count = n == 0 ? 0.0 : 1.0 / static_cast<double>(n);

  // Feature heads and trunk.
  const Matrix trunk_c = slice_rows(f.trunk, 0, nc);
  const Matrix trunk_v = slice_rows(f.trunk, nc, n);
  p[kHeadWc].grad += matmul_tn(trunk_c, f.grad_recon_c);
  p[kHeadBc].grad += sum_rows(f.grad_recon_c);
  p[kHeadWv].grad += matmul_tn(trunk_v, f.grad_recon_v);
  p[kHeadBv].grad += sum_rows(f.grad_recon_v);
  const Matrix d_trunk = stack_rows(matmul_nt(f.grad_recon_c, p[kHeadWc].value), matmul_nt(f.grad_recon_v, p[kHeadWv].value));
  const Matrix d_trunk_pre = relu_backward(f.trunk_pre, d_trunk);
  p[kTrunkW].grad += matmul_tn(f.st_input, d_trunk_pre);
  p[kTrunkB].grad += sum_rows(d_trunk_pre);
  Matrix d_q = matmul_nt(d_trunk_pre, p[kTrunkW].value);

  // Bilinear edge scorer.
  const Matrix& b = p[kEdgeBilinear].value;
  Matrix& db = p[kEdgeBilinear].grad;
  std::vector<double> bqv(d), btqc(d);
  for (std::size_t i = 0; i < f.pairs.size(); ++i) {
    const double g = weights.lambda_edge * f.grad_logits[i];
    if (g == 0.0) continue;
    const std::size_t rc = static_cast<std::size_t>(f.pairs[i].constraint);
    const std::size_t rv = nc + static_cast<std::size_t>(f.pairs[i].variable);
    auto qc = f.st_input.row(rc);
    auto qv = f.st_input.row(rv);
    std::fill(bqv.begin(), bqv.end(), 0.0);
    std::fill(btqc.begin(), btqc.end(), 0.0);
    for (std::size_t r = 0; r < d; ++r) {
      auto br = b.row(r);
      auto dbr = db.row(r);
      for (std::size_t k = 0; k < d; ++k) {
        bqv[r] += br[k] * qv[k];
        btqc[k] += br[k] * qc[r];
        dbr[k] += g * qc[r] * qv[k];
      }
    }
    auto dqc = d_q.row(rc);
    auto dqv = d_q.row(rv);
    for (std::size_t k = 0; k < d; ++k) {
      dqc[k] += g * bqv[k];
      dqv[k] += g * btqc[k];
    }
  }

  // Straight-through: decoder gradient goes to Z unchanged; add commitment.
  Matrix d_z = std::move(d_q);
  const Matrix& z = f.enc.z;
  for (std::size_t k = 0; k < z.size(); ++k) {
    d_z.values()[k] += weights.beta * 2.0 * (z.values()[k] - f.selected_detached.values()[k]) * inv_count;
  }
  // Codebook term pulls each selected codeword towards its (detached) latent.
  Matrix& d_book = p[kCodebook].grad;
  for (std::size_t i = 0; i < n; ++i) {
    auto dst = d_book.row(static_cast<std::size_t>(f.codes[i]));
    auto e = f.selected.row(i);
    auto zd = f.z_detached.row(i);
    for (std::size_t k = 0; k < d; ++k) dst[k] += 2.0 * (e[k] - zd[k]) * inv_count;
  }

  // Encoder layer 2.
  const Matrix dzc = slice_rows(d_z, 0, nc);
  const Matrix dzv = slice_rows(d_z, nc, n);
  const auto& co = graph.constraint_offsets();
  const auto& cn = graph.constraint_neighbors();
  const auto& vo = graph.variable_offsets();
  const auto& vn = graph.variable_neighbors();
  const EncoderCache& c = f.enc;
  auto [dh1c, dagg2c] = sage_backward(c.h1_c, c.agg2_c, dzc, p[kL2SelfWc], p[kL2SelfBc], p[kL2NeighWc], p[kL2NeighBc]);
  auto [dh1v, dagg2v] = sage_backward(c.h1_v, c.agg2_v, dzv, p[kL2SelfWv], p[kL2SelfBv], p[kL2NeighWv], p[kL2NeighBv]);
  dh1v += mean_aggregate_backward(co, cn, dagg2c, nv);
  dh1c += mean_aggregate_backward(vo, vn, dagg2v, nc);

  // Encoder layer 1; input features need no gradient.
  const Matrix dpre1c = relu_backward(c.pre1_c, dh1c);
  const Matrix dpre1v = relu_backward(c.pre1_v, dh1v);
  sage_backward(features.constraints, c.agg1_c, dpre1c, p[kL1SelfWc], p[kL1SelfBc], p[kL1NeighWc], p[kL1NeighBc]);
  sage_backward(features.variables, c.agg1_v, dpre1v, p[kL1SelfWv], p[kL1SelfBv], p[kL1NeighWv], p[kL1NeighBv]);
}

FrozenQuantization VqGae::freeze(const Forward& fwd) const {
  return FrozenQuantization{fwd.codes, fwd.z_detached, fwd.selected_detached};
}

}  // namespace satforge
