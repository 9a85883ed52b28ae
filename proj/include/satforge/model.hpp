#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "satforge/features.hpp"
#include "satforge/matrix.hpp"
#include "satforge/mip.hpp"
#include "satforge/optim.hpp"
#include "satforge/rng.hpp"

namespace satforge {

struct ModelDims {
  std::size_t input = 8;         // padded feature width + side indicator
  std::size_t hidden = 64;
  std::size_t latent = 32;
  std::size_t codebook = 32;
  std::size_t feature_out = 7;   // padded feature width reconstructed by the heads

  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

struct LossWeights {
  double beta = 0.25;         // commitment
  double lambda_edge = 1.0;   // edge reconstruction
};

struct LossBreakdown {
  double feature = 0.0;
  double edge = 0.0;
  double codebook = 0.0;
  double commitment = 0.0;
  double total = 0.0;

  LossBreakdown& operator+=(const LossBreakdown& o);
};

/// Constraint/variable pair used by the edge decoder.
struct NodePair {
  int constraint = 0;
  int variable = 0;

  friend bool operator==(const NodePair&, const NodePair&) = default;
};

/// `count` (constraint, variable) pairs drawn uniformly, with replacement, from
/// the pairs that are not edges of `graph`. Returns fewer only when the graph
/// is complete.
std::vector<NodePair> sample_negative_edges(const BipartiteGraph& graph, std::size_t count, Rng& rng);

/// Mean over neighbors for each target node; zero for degree-0 nodes.
/// offsets/neighbors are the CSR lists of the target side.
Matrix mean_aggregate(const std::vector<int>& offsets, const std::vector<int>& neighbors, const Matrix& source);
/// Adjoint of mean_aggregate: gradient w.r.t. `source` (source_rows x cols).
Matrix mean_aggregate_backward(const std::vector<int>& offsets, const std::vector<int>& neighbors,
                               const Matrix& upstream, std::size_t source_rows);

struct QuantizeResult {
  std::vector<int> codes;
  Matrix quantized;        // codebook rows selected by codes
  double codebook_loss = 0.0;
  double commitment_loss = 0.0;
};

/// Nearest codeword per row (squared Euclidean, ties to the lowest index).
/// Both VQ losses are the mean over nodes of the squared distance to the selected codeword.
QuantizeResult quantize(const Matrix& z, const Matrix& codebook);

/// Stop-gradient values held fixed while finite-differencing the loss: the
/// code assignment, Z as seen by the codebook term, and the codewords as seen
/// by the commitment and straight-through terms.
struct FrozenQuantization {
  std::vector<int> codes;
  Matrix z;
  Matrix selected;
};

/// Bipartite GraphSAGE encoder + shared VQ codebook + feature/edge decoder.
/// Each encoder layer has separate self/neighbor transforms per node side.
class VqGae {
 public:
  enum Param : std::size_t {
    kL1SelfWc, kL1SelfBc, kL1NeighWc, kL1NeighBc,
    kL1SelfWv, kL1SelfBv, kL1NeighWv, kL1NeighBv,
    kL2SelfWc, kL2SelfBc, kL2NeighWc, kL2NeighBc,
    kL2SelfWv, kL2SelfBv, kL2NeighWv, kL2NeighBv,
    kCodebook,
    kTrunkW, kTrunkB,
    kHeadWc, kHeadBc, kHeadWv, kHeadBv,
    kEdgeBilinear,
    kParamCount
  };

  VqGae() = default;
  VqGae(const ModelDims& dims, std::uint64_t seed);

  const ModelDims& dims() const { return dims_; }
  std::vector<Parameter>& params() { return params_; }
  const std::vector<Parameter>& params() const { return params_; }
  std::vector<Parameter*> param_ptrs();
  Parameter& param(Param p) { return params_[p]; }
  const Parameter& param(Param p) const { return params_[p]; }
  const Matrix& codebook() const { return params_[kCodebook].value; }

  struct EncoderCache {
    Matrix agg1_c, agg1_v, pre1_c, pre1_v, h1_c, h1_v, agg2_c, agg2_v;
    Matrix z;  // constraints first, then variables
  };

  /// Latent matrix Z, (n_constraints + n_variables) x latent.
  Matrix encode(const BipartiteGraph& graph, const NodeFeatures& features, EncoderCache* cache = nullptr) const;

  struct Forward {
    LossBreakdown loss;
    std::vector<int> codes;
    EncoderCache enc;
    Matrix selected;            // codeword rows (live values)
    Matrix selected_detached;   // codewords as seen by the commitment term
    Matrix st_input;      // decoder input (straight-through value)
    Matrix z_detached;    // Z as seen by the codebook term
    Matrix trunk_pre, trunk;
    Matrix recon_c, recon_v;
    Matrix grad_recon_c, grad_recon_v;
    std::vector<NodePair> pairs;
    std::vector<double> logits;
    std::vector<double> grad_logits;
  };

  /// Full loss on one instance. `negatives` are non-edge pairs; true edges are
  /// taken from the graph. With `frozen`, the quantization stop-gradients use
  /// the frozen values instead of the current ones.
  Forward forward(const BipartiteGraph& graph, const NodeFeatures& features, std::span<const NodePair> negatives,
                  const LossWeights& weights, const FrozenQuantization* frozen = nullptr) const;

  /// Accumulates d(total)/d(param) into every parameter's grad.
  void backward(const BipartiteGraph& graph, const NodeFeatures& features, const Forward& fwd,
                const LossWeights& weights);

  /// Reconstructed padded features from quantized latents, split by side.
  std::pair<Matrix, Matrix> decode_features(const Matrix& quantized, int n_constraints) const;
  /// Bilinear edge logits q_c^T B q_v for the given pairs.
  std::vector<double> decode_edges(const Matrix& quantized, int n_constraints, std::span<const NodePair> pairs) const;

  FrozenQuantization freeze(const Forward& fwd) const;

 private:
  ModelDims dims_;
  std::vector<Parameter> params_;
};

}  // namespace satforge
