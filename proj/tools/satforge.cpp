// satforge: generate SAT corpora, pretrain the VQ graph autoencoder, embed and
// evaluate clustering quality.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "satforge/error.hpp"
#include "satforge/pipeline.hpp"

using namespace satforge;

namespace {

void add_common(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--seed", c.seed, "Master seed");
  cmd->add_option("--out", c.out, "Output directory")->required();
}

void add_train_options(CLI::App* cmd, RunConfig& c) {
  TrainConfig& t = c.train;
  cmd->add_option("--epochs", t.epochs, "Training epochs");
  cmd->add_option("--hidden", t.hidden, "Encoder hidden width");
  cmd->add_option("--latent", t.latent, "Latent width");
  cmd->add_option("--codebook-size", t.codebook_size, "Number of codewords K");
  cmd->add_option("--lr", t.lr, "Adam learning rate");
  cmd->add_option("--beta", t.beta, "Commitment weight");
  cmd->add_option("--lambda-edge", t.lambda_edge, "Edge reconstruction weight");
  cmd->add_option("--negative-ratio", t.negative_ratio, "Negative edges per positive edge");
  cmd->add_option("--reinit-period", t.reinit_period, "Epochs between dead-code resets (0 = never)");
  cmd->add_option("--train-seed", t.seed, "Training seed (defaults to --seed)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"satforge: VQ graph autoencoder embeddings for SAT instances"};
  app.set_config("--config", "", "Key-value config file (TOML/INI); command-line flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  RunConfig c;
  std::string record_path;

  CLI::App* gen = app.add_subcommand("gen", "Generate a labeled CNF corpus and manifest");
  add_common(gen, c);
  gen->add_option("--families", c.families, "Comma list of family:count");
  gen->add_flag("--balanced", c.balanced, "Rejection-sample to equal SAT/UNSAT counts per family");
  gen->add_option("--dpll-budget", c.dpll_budget, "DPLL decision budget for labeling");

  CLI::App* label = app.add_subcommand("label", "Fill missing feasibility labels with DPLL");
  add_common(label, c);
  label->add_option("--corpus", c.corpus, "Manifest path")->required();
  label->add_option("--dpll-budget", c.dpll_budget, "DPLL decision budget");

  CLI::App* pretrain = app.add_subcommand("pretrain", "Train the autoencoder and write a checkpoint");
  add_common(pretrain, c);
  pretrain->add_option("--corpus", c.corpus, "Manifest path")->required();
  pretrain->add_option("--schema", c.schema, "Feature schema: sat or mip");
  add_train_options(pretrain, c);

  CLI::App* embed = app.add_subcommand("embed", "Embed a corpus with one variant");
  add_common(embed, c);
  embed->add_option("--corpus", c.corpus, "Manifest path")->required();
  embed->add_option("--variant", c.variant, "forge-mip, forge-mip-sat, forge-sat or static-sat");
  embed->add_option("--checkpoint", c.checkpoint, "Checkpoint path (not used by static-sat)");

  CLI::App* eval = app.add_subcommand("eval", "Cluster embedding tables and report NMI / purity");
  add_common(eval, c);
  eval->add_option("--table", c.tables, "Embedding table (repeatable)")->required();
  eval->add_option("--variant", c.expect_variants, "Variants that must be present (repeatable)");
  eval->add_option("--k", c.k, "Number of clusters (0 = number of ground-truth groups)");
  eval->add_option("--restarts", c.restarts, "k-means restarts");
  eval->add_option("--trials", c.trials, "Permutation-null trials");
  eval->add_option("--eval-seeds", c.eval_seeds, "Clustering seeds");
  eval->add_flag("--family-only", c.family_only, "Group by family only");

  CLI::App* reproduce = app.add_subcommand("reproduce", "Replay a run record and compare digests");
  reproduce->add_option("record", record_path, "run_record.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (pretrain->parsed() && pretrain->count("--train-seed") == 0) c.train.seed = c.seed;
  try {
    c.train.validate();
    if (c.restarts < 1 || c.trials < 0 || c.k < 0) throw std::invalid_argument("restarts, trials and k must be non-negative");
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  CommandResult result;
  try {
    if (gen->parsed()) result = cmd_gen(c);
    else if (label->parsed()) result = cmd_label(c);
    else if (pretrain->parsed()) result = cmd_pretrain(c);
    else if (embed->parsed()) result = cmd_embed(c);
    else if (eval->parsed()) result = cmd_eval(c);
    else result = cmd_reproduce(record_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  std::ostream& out = result.exit_code == kExitOk ? std::cout : std::cerr;
  for (const std::string& m : result.messages) out << m << (m.empty() || m.back() != '\n' ? "\n" : "");
  return result.exit_code;
}
