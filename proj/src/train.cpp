#include "satforge/train.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "satforge/error.hpp"
#include "satforge/rng.hpp"

namespace satforge {

void TrainConfig::validate() const {
  if (hidden == 0 || latent == 0) throw std::invalid_argument("hidden and latent dims must be positive");
  if (codebook_size < 2) throw std::invalid_argument("codebook size must be at least 2");
  if (!(lr > 0.0) || !(beta > 0.0) || !(lambda_edge > 0.0)) throw std::invalid_argument("lr, beta, lambda_edge must be positive");
  if (epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  if (!(negative_ratio > 0.0)) throw std::invalid_argument("negative ratio must be positive");
  if (reinit_period < 0) throw std::invalid_argument("reinit period must be >= 0");
}

ModelDims TrainConfig::dims() const {
  ModelDims d;
  d.input = model_input_width();
  d.hidden = hidden;
  d.latent = latent;
  d.codebook = codebook_size;
  d.feature_out = padded_feature_width();
  return d;
}

std::string format_loss_log(const std::vector<EpochLog>& log) {
  std::ostringstream out;
  out.precision(17);
  out << "epoch\tfeature\tedge\tcodebook\tcommitment\ttotal\tcodes_used\tcodes_reset\n";
  for (const EpochLog& e : log) {
    out << e.epoch << '\t' << e.loss.feature << '\t' << e.loss.edge << '\t' << e.loss.codebook << '\t'
        << e.loss.commitment << '\t' << e.loss.total << '\t' << e.codes_used << '\t' << e.codes_reset << '\n';
  }
  return out.str();
}

TrainResult train(const std::vector<GraphInstance>& corpus, const TrainConfig& config,
                  const std::function<void(const EpochLog&)>& on_epoch) {
  config.validate();
  if (corpus.empty()) throw DataError("train: empty corpus");
  const SchemaId schema = corpus.front().features.schema;
  for (const GraphInstance& inst : corpus) {
    if (inst.features.schema != schema) throw DataError("train: instance " + inst.id + " uses a different feature schema");
  }
  TrainResult result{VqGae(config.dims(), config.seed), {}};
  VqGae& model = result.model;
  AdamState adam;
  const AdamConfig adam_config{config.lr};
  const LossWeights weights = config.weights();
  std::vector<Parameter*> params = model.param_ptrs();
  const std::size_t k = config.codebook_size;
  std::uint64_t step = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::vector<std::size_t> order(corpus.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng shuffle_rng(config.seed, Stream::kShuffle, static_cast<std::uint64_t>(epoch));
    shuffle_rng.shuffle(std::span<std::size_t>(order));

    EpochLog entry;
    entry.epoch = epoch;
    std::vector<std::size_t> usage(k, 0);
    std::vector<double> pool;

    for (std::size_t idx : order) {
      const GraphInstance& inst = corpus[idx];
      Rng neg_rng(config.seed, Stream::kNegatives, step++);
      const auto n_neg = static_cast<std::size_t>(std::llround(config.negative_ratio * static_cast<double>(inst.graph.edges().size())));
      const std::vector<NodePair> negatives = sample_negative_edges(inst.graph, n_neg, neg_rng);
      const VqGae::Forward fwd = model.forward(inst.graph, inst.features, negatives, weights);
      if (!std::isfinite(fwd.loss.total)) {
        throw DataError("train: non-finite loss at epoch " + std::to_string(epoch) + " on instance " + inst.id);
      }
      model.backward(inst.graph, inst.features, fwd, weights);
      adam.step(params, adam_config);
      entry.loss += fwd.loss;
      for (int code : fwd.codes) ++usage[static_cast<std::size_t>(code)];
      pool.insert(pool.end(), fwd.enc.z.values().begin(), fwd.enc.z.values().end());
    }
    const double inv = 1.0 / static_cast<double>(corpus.size());
    entry.loss.feature *= inv;
    entry.loss.edge *= inv;
    entry.loss.codebook *= inv;
    entry.loss.commitment *= inv;
    entry.loss.total *= inv;
    for (std::size_t c : usage) entry.codes_used += c > 0 ? 1 : 0;

    const std::size_t pool_rows = pool.size() / config.latent;
    if (config.reinit_period > 0 && epoch % config.reinit_period == 0 && pool_rows > 0) {
      Rng reset_rng(config.seed, Stream::kCodeReset, static_cast<std::uint64_t>(epoch));
      Matrix& book = model.param(VqGae::kCodebook).value;
      for (std::size_t code = 0; code < k; ++code) {
        if (usage[code] > 0) continue;
        const std::size_t row = reset_rng.uniform_index(pool_rows);
        for (std::size_t j = 0; j < config.latent; ++j) book(code, j) = pool[row * config.latent + j];
        adam.reset_row(VqGae::kCodebook, code);
        ++entry.codes_reset;
      }
    }
    result.log.push_back(entry);
    if (on_epoch) on_epoch(entry);
  }
  return result;
}

std::size_t codebook_usage(const VqGae& model, const std::vector<GraphInstance>& corpus) {
  std::vector<bool> used(model.dims().codebook, false);
  for (const GraphInstance& inst : corpus) {
    const QuantizeResult q = quantize(model.encode(inst.graph, inst.features), model.codebook());
    for (int c : q.codes) used[static_cast<std::size_t>(c)] = true;
  }
  std::size_t n = 0;
  for (bool u : used) n += u ? 1 : 0;
  return n;
}

}  // namespace satforge
