#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "satforge/features.hpp"
#include "satforge/mip.hpp"
#include "satforge/model.hpp"

namespace satforge {

struct TrainConfig {
  std::size_t hidden = 64;
  std::size_t latent = 32;
  std::size_t codebook_size = 32;
  double lr = 1e-3;
  double beta = 0.25;
  double lambda_edge = 1.0;
  int epochs = 200;
  double negative_ratio = 1.0;
  std::uint64_t seed = 0;
  /// Dead codewords are re-seeded every `reinit_period` epochs; 0 disables.
  int reinit_period = 1;

  /// Throws std::invalid_argument if any field is out of range.
  void validate() const;
  ModelDims dims() const;
  LossWeights weights() const { return {beta, lambda_edge}; }

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// One featurized training or inference instance.
struct GraphInstance {
  std::string id;
  BipartiteGraph graph;
  NodeFeatures features;
};

struct EpochLog {
  int epoch = 0;
  LossBreakdown loss;   // mean over instances
  std::size_t codes_used = 0;
  std::size_t codes_reset = 0;
};

/// Machine-parseable loss log: a header line, then one tab-separated line per
/// epoch (epoch, feature, edge, codebook, commitment, total, codes_used,
/// codes_reset).
std::string format_loss_log(const std::vector<EpochLog>& log);

struct TrainResult {
  VqGae model;
  std::vector<EpochLog> log;
};

/// Epoch loop: seeded shuffle, one full-graph Adam step per instance, then
/// dead-code re-seeding from this epoch's encoder outputs. Throws DataError on
/// a schema mismatch or a non-finite loss. `on_epoch` may be empty.
TrainResult train(const std::vector<GraphInstance>& corpus, const TrainConfig& config,
                  const std::function<void(const EpochLog&)>& on_epoch = {});

/// Number of distinct codes assigned when encoding `corpus` with `model`.
std::size_t codebook_usage(const VqGae& model, const std::vector<GraphInstance>& corpus);

}  // namespace satforge
