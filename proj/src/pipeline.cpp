#include "satforge/pipeline.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <sstream>
#include <thread>

#include "satforge/checkpoint.hpp"
#include "satforge/digest.hpp"
#include "satforge/dpll.hpp"
#include "satforge/error.hpp"
#include "satforge/evalkit.hpp"
#include "satforge/generators.hpp"
#include "satforge/manifest.hpp"
#include "satforge/parallel.hpp"
#include "satforge/rng.hpp"

namespace satforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string now_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::string absolute(const std::string& path) {
  if (path.empty()) return path;
  return fs::weakly_canonical(fs::absolute(path)).string();
}

json config_to_json(const RunConfig& c) {
  const TrainConfig& t = c.train;
  return json{{"seed", c.seed},
              {"corpus", c.corpus},
              {"out", c.out},
              {"checkpoint", c.checkpoint},
              {"variant", c.variant},
              {"schema", c.schema},
              {"families", c.families},
              {"balanced", c.balanced},
              {"dpll_budget", c.dpll_budget},
              {"train",
               {{"hidden", t.hidden},
                {"latent", t.latent},
                {"codebook_size", t.codebook_size},
                {"lr", t.lr},
                {"beta", t.beta},
                {"lambda_edge", t.lambda_edge},
                {"epochs", t.epochs},
                {"negative_ratio", t.negative_ratio},
                {"seed", t.seed},
                {"reinit_period", t.reinit_period}}},
              {"tables", c.tables},
              {"expect_variants", c.expect_variants},
              {"k", c.k},
              {"restarts", c.restarts},
              {"eval_seeds", c.eval_seeds},
              {"trials", c.trials},
              {"family_only", c.family_only}};
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.corpus = j.at("corpus").get<std::string>();
  c.out = j.at("out").get<std::string>();
  c.checkpoint = j.at("checkpoint").get<std::string>();
  c.variant = j.at("variant").get<std::string>();
  c.schema = j.at("schema").get<std::string>();
  c.families = j.at("families").get<std::string>();
  c.balanced = j.at("balanced").get<bool>();
  c.dpll_budget = j.at("dpll_budget").get<std::uint64_t>();
  const json& t = j.at("train");
  c.train.hidden = t.at("hidden").get<std::size_t>();
  c.train.latent = t.at("latent").get<std::size_t>();
  c.train.codebook_size = t.at("codebook_size").get<std::size_t>();
  c.train.lr = t.at("lr").get<double>();
  c.train.beta = t.at("beta").get<double>();
  c.train.lambda_edge = t.at("lambda_edge").get<double>();
  c.train.epochs = t.at("epochs").get<int>();
  c.train.negative_ratio = t.at("negative_ratio").get<double>();
  c.train.seed = t.at("seed").get<std::uint64_t>();
  c.train.reinit_period = t.at("reinit_period").get<int>();
  c.tables = j.at("tables").get<std::vector<std::string>>();
  c.expect_variants = j.at("expect_variants").get<std::vector<std::string>>();
  c.k = j.at("k").get<int>();
  c.restarts = j.at("restarts").get<int>();
  c.eval_seeds = j.at("eval_seeds").get<std::vector<std::uint64_t>>();
  c.trials = j.at("trials").get<int>();
  c.family_only = j.at("family_only").get<bool>();
  return c;
}

// Tracks a run's output files so they can be digested or removed on failure.
class RunContext {
 public:
  RunContext(std::string command, const RunConfig& config) {
    record_.command = std::move(command);
    record_.config = config;
    record_.config.out = absolute(config.out);
    record_.config.corpus = absolute(config.corpus);
    record_.config.checkpoint = absolute(config.checkpoint);
    for (std::string& t : record_.config.tables) t = absolute(t);
    record_.started = now_utc();
    if (record_.config.out.empty()) throw DataError("--out is required");
    fs::create_directories(record_.config.out);
    write_record();
  }

  RunRecord& record() { return record_; }
  const RunConfig& config() const { return record_.config; }
  std::string path(const std::string& name) const { return (fs::path(record_.config.out) / name).string(); }

  void add_output(const std::string& name) { outputs_.push_back(name); }

  void finish() {
    for (const std::string& name : outputs_) record_.outputs[name] = sha256_file(path(name));
    record_.status = "ok";
    record_.finished = now_utc();
    write_record();
  }

  void fail(const std::string& message) {
    for (const std::string& name : outputs_) {
      std::error_code ec;
      fs::remove(path(name), ec);
    }
    record_.status = "failed";
    record_.notes.push_back(message);
    record_.finished = now_utc();
    write_record();
  }

 private:
  void write_record() const { write_file(path(kRunRecordName), record_.to_json()); }

  RunRecord record_;
  std::vector<std::string> outputs_;
};

template <typename Body>
CommandResult run_command(const std::string& name, const RunConfig& config, Body&& body) {
  RunContext ctx(name, config);
  CommandResult result;
  try {
    body(ctx, result);
    ctx.finish();
  } catch (const std::exception& e) {
    ctx.fail(e.what());
    result.record = ctx.record();
    result.exit_code = kExitData;
    result.messages.push_back(std::string("error: ") + e.what());
    return result;
  }
  result.record = ctx.record();
  return result;
}

// Desk-scale parameters per family.
constexpr int kKsatVars = 20;
constexpr int kKsatClauses = 85;  // ratio 4.25
constexpr int kSrVars = 10;
constexpr int kCliqueVertices = 8;
constexpr double kCliqueEdgeP = 0.35;
constexpr int kCliqueSize = 3;
constexpr int kCoverVertices = 8;
constexpr double kCoverEdgeP = 0.3;
constexpr int kCoverSize = 4;

int family_id(const std::string& family) {
  if (family == "random-ksat") return 0;
  if (family == "sr") return 1;
  if (family == "clique") return 2;
  if (family == "vertex-cover") return 3;
  throw DataError("unknown family '" + family + "' (expected random-ksat, sr, clique, vertex-cover)");
}

CnfFormula generate_one(const std::string& family, std::uint64_t seed) {
  switch (family_id(family)) {
    case 0: return gen_random_ksat(kKsatVars, kKsatClauses, 3, seed);
    case 2: return gen_clique(kCliqueVertices, kCliqueEdgeP, kCliqueSize, seed);
    case 3: return gen_vertex_cover(kCoverVertices, kCoverEdgeP, kCoverSize, seed);
    default: throw DataError("family '" + family + "' is generated in pairs");
  }
}

std::optional<Feasibility> label_of(const CnfFormula& f, std::uint64_t budget) {
  const SolveResult r = dpll_solve(f, budget);
  if (r.status == SolveStatus::kSat) return Feasibility::kSat;
  if (r.status == SolveStatus::kUnsat) return Feasibility::kUnsat;
  return std::nullopt;
}

std::string instance_name(const std::string& family, std::size_t index) {
  std::ostringstream out;
  out << family << '/' << family << '-' << std::setw(4) << std::setfill('0') << index << ".cnf";
  return out.str();
}

}  // namespace

std::vector<FamilyRequest> parse_family_spec(const std::string& spec) {
  std::vector<FamilyRequest> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw DataError("family spec item '" + item + "' must be name:count");
    FamilyRequest r;
    r.family = item.substr(0, colon);
    if (r.family == "vcover") r.family = "vertex-cover";
    family_id(r.family);
    try {
      r.count = std::stoi(item.substr(colon + 1));
    } catch (const std::exception&) {
      throw DataError("bad count in family spec item '" + item + "'");
    }
    if (r.count < 1) throw DataError("family count must be positive in '" + item + "'");
    out.push_back(r);
  }
  if (out.empty()) throw DataError("empty family spec");
  return out;
}

void RunConfig::check_variant_consistency() const {
  const Variant v = parse_variant(variant);
  if (v == Variant::kStaticSat && !checkpoint.empty()) throw DataError("static-sat does not take a checkpoint");
  if (v != Variant::kStaticSat && checkpoint.empty()) throw DataError(variant + " requires --checkpoint");
}

std::string RunRecord::to_json() const {
  json j{{"command", command},
         {"tool_version", tool_version},
         {"config", config_to_json(config)},
         {"inputs", inputs},
         {"outputs", outputs},
         {"corpus_digest", corpus_digest},
         {"checkpoint_digest", checkpoint_digest},
         {"transfer", transfer},
         {"status", status},
         {"started", started},
         {"finished", finished},
         {"notes", notes}};
  return j.dump(2) + "\n";
}

RunRecord RunRecord::from_json(const std::string& text) {
  RunRecord r;
  try {
    const json j = json::parse(text);
    r.command = j.at("command").get<std::string>();
    r.tool_version = j.at("tool_version").get<std::string>();
    r.config = config_from_json(j.at("config"));
    r.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    r.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    r.corpus_digest = j.at("corpus_digest").get<std::string>();
    r.checkpoint_digest = j.at("checkpoint_digest").get<std::string>();
    r.transfer = j.at("transfer").get<bool>();
    r.status = j.at("status").get<std::string>();
    r.started = j.at("started").get<std::string>();
    r.finished = j.at("finished").get<std::string>();
    r.notes = j.at("notes").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed run record: ") + e.what());
  }
  return r;
}

std::string corpus_digest(const std::string& manifest_path) {
  const std::string text = read_file(manifest_path);
  const CorpusManifest m = CorpusManifest::parse(text, fs::path(manifest_path).parent_path().string());
  std::string acc = sha256_hex(text) + "\n";
  for (const ManifestEntry& e : m.entries) acc += e.path + "\t" + sha256_file(m.resolve(e)) + "\n";
  return sha256_hex(acc);
}

unsigned worker_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SATFORGE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
  }
  return n;
}

std::vector<GraphInstance> load_graph_corpus(const std::string& manifest_path, SchemaId schema, unsigned threads) {
  const CorpusManifest m = CorpusManifest::load(manifest_path);
  if (m.entries.empty()) throw DataError("manifest " + manifest_path + " has no entries");
  std::vector<GraphInstance> out(m.entries.size());
  parallel_for(out.size(), threads, [&](std::size_t i) {
    const CnfFormula f = m.load_formula(m.entries[i]);
    const MipInstance mip = sat_to_mip(f);
    out[i].id = m.entries[i].path;
    out[i].graph = mip_to_graph(mip);
    out[i].features = schema == SchemaId::kSat ? build_node_features(&f, schema) : build_node_features(&mip, schema);
  });
  return out;
}

CommandResult cmd_gen(const RunConfig& config) {
  return run_command("gen", config, [](RunContext& ctx, CommandResult& result) {
    const RunConfig& c = ctx.config();
    const std::vector<FamilyRequest> requests = parse_family_spec(c.families);
    CorpusManifest manifest;
    std::ostringstream summary;
    summary << "family\tSAT\tUNSAT\tunknown\n";
    for (const FamilyRequest& req : requests) {
      const int fid = family_id(req.family);
      fs::create_directories(fs::path(c.out) / req.family);
      Rng seeder(c.seed, Stream::kGeneration, 1000 + static_cast<std::uint64_t>(fid));
      std::vector<std::pair<CnfFormula, std::uint64_t>> accepted;
      if (fid == 1) {
        SrParams params;
        params.dpll_budget = c.dpll_budget;
        while (static_cast<int>(accepted.size()) < req.count) {
          const std::uint64_t seed = seeder.next();
          auto [unsat, sat] = gen_sr_pair(kSrVars, seed, params);
          accepted.emplace_back(std::move(unsat), seed);
          if (static_cast<int>(accepted.size()) < req.count) accepted.emplace_back(std::move(sat), seed);
        }
      } else {
        const int want_sat = req.count / 2;
        const int want_unsat = req.count - want_sat;
        int n_sat = 0, n_unsat = 0;
        const int max_attempts = 200 * req.count;
        for (int attempt = 0; static_cast<int>(accepted.size()) < req.count; ++attempt) {
          if (attempt >= max_attempts) {
            throw DataError("could not reach a balanced label split for family " + req.family);
          }
          const std::uint64_t seed = seeder.next();
          CnfFormula f = generate_one(req.family, seed);
          f.feasibility = label_of(f, c.dpll_budget);
          if (c.balanced) {
            if (!f.feasibility) continue;
            int& have = *f.feasibility == Feasibility::kSat ? n_sat : n_unsat;
            const int want = *f.feasibility == Feasibility::kSat ? want_sat : want_unsat;
            if (have >= want) continue;
            ++have;
          }
          accepted.emplace_back(std::move(f), seed);
        }
      }
      int sat = 0, unsat = 0, unknown = 0;
      for (std::size_t i = 0; i < accepted.size(); ++i) {
        const auto& [f, seed] = accepted[i];
        const std::string name = instance_name(req.family, i);
        write_dimacs_file(f, ctx.path(name));
        ctx.add_output(name);
        manifest.entries.push_back({name, req.family, f.feasibility, seed});
        if (!f.feasibility) ++unknown;
        else if (*f.feasibility == Feasibility::kSat) ++sat;
        else ++unsat;
      }
      summary << req.family << '\t' << sat << '\t' << unsat << '\t' << unknown << '\n';
      result.messages.push_back(req.family + ": " + std::to_string(sat) + " SAT, " + std::to_string(unsat) +
                                " UNSAT, " + std::to_string(unknown) + " unknown");
    }
    manifest.save(ctx.path("manifest.tsv"));
    ctx.add_output("manifest.tsv");
    write_file(ctx.path("summary.tsv"), summary.str());
    ctx.add_output("summary.tsv");
  });
}

CommandResult cmd_label(const RunConfig& config) {
  return run_command("label", config, [](RunContext& ctx, CommandResult& result) {
    const RunConfig& c = ctx.config();
    ctx.record().corpus_digest = corpus_digest(c.corpus);
    ctx.record().inputs["corpus"] = ctx.record().corpus_digest;
    CorpusManifest m = CorpusManifest::load(c.corpus);
    std::size_t filled = 0, unknown = 0;
    std::vector<std::optional<Feasibility>> labels(m.entries.size());
    parallel_for(m.entries.size(), worker_threads(), [&](std::size_t i) {
      labels[i] = m.entries[i].feasibility;
      if (!labels[i]) labels[i] = label_of(m.load_formula(m.entries[i]), c.dpll_budget);
    });
    CorpusManifest out;
    for (std::size_t i = 0; i < m.entries.size(); ++i) {
      ManifestEntry e = m.entries[i];
      if (!e.feasibility && labels[i]) ++filled;
      if (!labels[i]) ++unknown;
      e.feasibility = labels[i];
      e.path = absolute(m.resolve(e));
      out.entries.push_back(std::move(e));
    }
    out.save(ctx.path("manifest.tsv"));
    ctx.add_output("manifest.tsv");
    result.messages.push_back("labeled " + std::to_string(filled) + " instances; " + std::to_string(unknown) +
                              " remain unknown (DPLL budget)");
  });
}

CommandResult cmd_pretrain(const RunConfig& config) {
  return run_command("pretrain", config, [](RunContext& ctx, CommandResult& result) {
    const RunConfig& c = ctx.config();
    if (c.corpus.empty()) throw DataError("--corpus is required");
    const SchemaId schema = parse_schema(c.schema);
    ctx.record().corpus_digest = corpus_digest(c.corpus);
    ctx.record().inputs["corpus"] = ctx.record().corpus_digest;

    std::vector<GraphInstance> corpus = load_graph_corpus(c.corpus, schema, worker_threads());
    std::vector<NodeFeatures> raw;
    raw.reserve(corpus.size());
    for (const GraphInstance& g : corpus) raw.push_back(g.features);
    const Standardizer standardizer = Standardizer::fit(raw);
    for (GraphInstance& g : corpus) g.features = standardizer.apply(g.features);

    TrainResult trained = train(corpus, c.train);
    Checkpoint ckpt;
    ckpt.schema = schema;
    ckpt.standardizer = standardizer;
    ckpt.config = c.train;
    ckpt.model = std::move(trained.model);
    ckpt.corpus_digest = ctx.record().corpus_digest;
    ctx.add_output("checkpoint.bin");
    save_checkpoint(ckpt, ctx.path("checkpoint.bin"));
    ctx.add_output("loss_log.tsv");
    write_file(ctx.path("loss_log.tsv"), format_loss_log(trained.log));
    ctx.record().checkpoint_digest = sha256_file(ctx.path("checkpoint.bin"));
    const EpochLog& first = trained.log.front();
    const EpochLog& last = trained.log.back();
    result.messages.push_back("epoch 1 total " + std::to_string(first.loss.total) + ", epoch " +
                              std::to_string(last.epoch) + " total " + std::to_string(last.loss.total) + ", " +
                              std::to_string(last.codes_used) + " codes in use");
  });
}

CommandResult cmd_embed(const RunConfig& config) {
  return run_command("embed", config, [](RunContext& ctx, CommandResult& result) {
    const RunConfig& c = ctx.config();
    if (c.corpus.empty()) throw DataError("--corpus is required");
    c.check_variant_consistency();
    ctx.record().corpus_digest = corpus_digest(c.corpus);
    ctx.record().inputs["corpus"] = ctx.record().corpus_digest;
    std::optional<Checkpoint> ckpt;
    if (!c.checkpoint.empty()) {
      ckpt = load_checkpoint(c.checkpoint);
      ctx.record().checkpoint_digest = sha256_file(c.checkpoint);
      ctx.record().inputs["checkpoint"] = ctx.record().checkpoint_digest;
    }
    const CorpusManifest manifest = CorpusManifest::load(c.corpus);
    EmbedOptions opts;
    opts.variant = parse_variant(c.variant);
    opts.threads = worker_threads();
    const EmbedOutcome outcome = embed_corpus(manifest, ckpt ? &*ckpt : nullptr, opts);
    ctx.record().transfer = outcome.transfer;
    if (outcome.transfer) {
      ctx.record().notes.push_back("transfer: checkpoint trained on " + std::string(to_string(ckpt->schema)) +
                                   " features, embedding with " +
                                   std::string(to_string(variant_schema(opts.variant))) +
                                   " features; standardization refitted on this corpus");
    }
    ctx.add_output("embeddings.tsv");
    outcome.table.save(ctx.path("embeddings.tsv"));
    result.messages.push_back(std::to_string(outcome.table.rows.size()) + " x " + std::to_string(outcome.table.dim()) +
                              " " + std::string(to_string(opts.variant)) + " embeddings" +
                              (outcome.transfer ? " (schema transfer)" : ""));
  });
}

CommandResult cmd_eval(const RunConfig& config) {
  return run_command("eval", config, [](RunContext& ctx, CommandResult& result) {
    const RunConfig& c = ctx.config();
    if (c.tables.empty()) throw DataError("at least one --table is required");
    std::vector<EmbeddingTable> tables;
    for (std::size_t i = 0; i < c.tables.size(); ++i) {
      ctx.record().inputs["table:" + std::to_string(i)] = sha256_file(c.tables[i]);
      tables.push_back(EmbeddingTable::load(c.tables[i]));
      if (tables.back().rows.empty()) throw DataError("embedding table " + c.tables[i] + " is empty");
    }
    for (const std::string& want : c.expect_variants) {
      const Variant v = parse_variant(want);
      bool found = false;
      for (const EmbeddingTable& t : tables) found = found || t.rows.front().variant == v;
      if (!found) throw DataError("requested variant " + std::string(to_string(v)) + " has no embedding table");
    }
    ReportOptions opts;
    opts.k = c.k;
    opts.seeds = c.eval_seeds;
    opts.restarts = c.restarts;
    opts.null_trials = c.trials;
    opts.family_only = c.family_only;
    const Report rep = report(tables, opts);
    ctx.add_output("metrics.tsv");
    write_file(ctx.path("metrics.tsv"), rep.metrics_table());
    for (const VariantReport& v : rep.variants) {
      const std::string name = "scatter_" + v.metrics.variant + ".svg";
      ctx.add_output(name);
      write_file(ctx.path(name), v.svg);
    }
    if (rep.excluded_unknown > 0) {
      const std::string note = std::to_string(rep.excluded_unknown) +
                               " instances with unknown feasibility excluded from (family, feasibility) grouping";
      ctx.record().notes.push_back(note);
      result.messages.push_back(note);
    }
    result.messages.push_back(rep.metrics_table());
  });
}

CommandResult cmd_reproduce(const std::string& record_path) {
  CommandResult result;
  const RunRecord original = RunRecord::from_json(read_file(record_path));
  result.record = original;
  if (original.status != "ok") {
    result.exit_code = kExitDivergence;
    result.messages.push_back("record status is '" + original.status + "', not a completed run");
    return result;
  }
  std::vector<std::string> divergences;
  auto check_input = [&](const std::string& label, const std::string& current) {
    auto it = original.inputs.find(label);
    if (it != original.inputs.end() && it->second != current) {
      divergences.push_back("input " + label + " digest changed: recorded " + it->second + ", now " + current);
    }
  };
  const RunConfig& rc = original.config;
  try {
    if (original.inputs.count("corpus")) check_input("corpus", corpus_digest(rc.corpus));
    if (original.inputs.count("checkpoint")) check_input("checkpoint", sha256_file(rc.checkpoint));
    for (std::size_t i = 0; i < rc.tables.size(); ++i) check_input("table:" + std::to_string(i), sha256_file(rc.tables[i]));
  } catch (const std::exception& e) {
    divergences.push_back(std::string("input unavailable: ") + e.what());
  }

  const fs::path scratch = fs::temp_directory_path() /
                           ("satforge-reproduce-" + sha256_hex(record_path + now_utc()).substr(0, 12));
  RunConfig rerun = rc;
  rerun.out = scratch.string();
  CommandResult replay;
  if (original.command == "gen") replay = cmd_gen(rerun);
  else if (original.command == "label") replay = cmd_label(rerun);
  else if (original.command == "pretrain") replay = cmd_pretrain(rerun);
  else if (original.command == "embed") replay = cmd_embed(rerun);
  else if (original.command == "eval") replay = cmd_eval(rerun);
  else throw DataError("cannot reproduce unknown command '" + original.command + "'");

  if (replay.exit_code != kExitOk) {
    divergences.push_back("rerun failed: " + (replay.messages.empty() ? std::string("?") : replay.messages.back()));
  } else {
    for (const auto& [name, digest] : original.outputs) {
      auto it = replay.record.outputs.find(name);
      if (it == replay.record.outputs.end()) divergences.push_back("output " + name + " missing from rerun");
      else if (it->second != digest) divergences.push_back("output " + name + " digest differs");
    }
    for (const auto& [name, _] : replay.record.outputs) {
      if (!original.outputs.count(name)) divergences.push_back("rerun produced extra output " + name);
    }
    if (replay.record.transfer != original.transfer) divergences.push_back("transfer flag differs");
  }
  std::error_code ec;
  fs::remove_all(scratch, ec);

  result.messages = divergences;
  if (divergences.empty()) {
    result.messages.push_back("reproduced " + original.command + ": " + std::to_string(original.outputs.size()) +
                              " outputs match, 0 divergences");
  } else {
    result.exit_code = kExitDivergence;
    result.messages.push_back(std::to_string(divergences.size()) + " divergence(s)");
  }
  return result;
}

}  // namespace satforge
