#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "satforge/embeddings.hpp"
#include "satforge/features.hpp"
#include "satforge/train.hpp"

namespace satforge {

inline constexpr const char* kToolVersion = "1.0.0";

/// Process exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitDivergence = 3 };

struct FamilyRequest {
  std::string family;  // random-ksat | sr | clique | vertex-cover
  int count = 0;
};

/// "random-ksat:40,clique:40" -> requests. Throws DataError.
std::vector<FamilyRequest> parse_family_spec(const std::string& spec);

struct RunConfig {
  std::uint64_t seed = 0;
  std::string corpus;      // manifest path (input)
  std::string out;         // output directory
  std::string checkpoint;  // checkpoint path (input for embed)
  std::string variant = "forge-sat";
  std::string schema = "sat";  // pretraining feature schema

  // gen
  std::string families = "random-ksat:40,clique:40,vertex-cover:40";
  bool balanced = false;
  std::uint64_t dpll_budget = 1000000;

  TrainConfig train;

  // eval
  std::vector<std::string> tables;
  std::vector<std::string> expect_variants;
  int k = 0;
  int restarts = 10;
  std::vector<std::uint64_t> eval_seeds{0, 1, 2};
  int trials = 1000;
  bool family_only = false;

  /// Throws DataError when variant and checkpoint disagree.
  void check_variant_consistency() const;
};

/// Snapshot of one subcommand execution, stored as JSON next to its outputs.
struct RunRecord {
  std::string command;
  std::string tool_version = kToolVersion;
  RunConfig config;
  std::map<std::string, std::string> inputs;   // label -> sha256
  std::map<std::string, std::string> outputs;  // file name in out dir -> sha256
  std::string corpus_digest;
  std::string checkpoint_digest;
  bool transfer = false;
  std::string status = "running";
  std::string started;
  std::string finished;
  std::vector<std::string> notes;

  std::string to_json() const;
  static RunRecord from_json(const std::string& text);
};

inline constexpr const char* kRunRecordName = "run_record.json";

/// Digest over the manifest text and every referenced instance file.
std::string corpus_digest(const std::string& manifest_path);

/// Worker threads from SATFORGE_THREADS (default: hardware concurrency).
unsigned worker_threads();

struct CommandResult {
  int exit_code = kExitOk;
  RunRecord record;
  std::vector<std::string> messages;
};

CommandResult cmd_gen(const RunConfig& config);
/// Fills missing feasibility labels with DPLL and writes a relabeled manifest.
CommandResult cmd_label(const RunConfig& config);
CommandResult cmd_pretrain(const RunConfig& config);
CommandResult cmd_embed(const RunConfig& config);
CommandResult cmd_eval(const RunConfig& config);

/// Re-executes the run described by `record_path` into a scratch directory and
/// compares input and output digests with the record. Exit code 3 on any
/// divergence.
CommandResult cmd_reproduce(const std::string& record_path);

/// Loads a manifest and featurizes every instance under `schema` (raw, not
/// standardized).
std::vector<GraphInstance> load_graph_corpus(const std::string& manifest_path, SchemaId schema, unsigned threads);

}  // namespace satforge
