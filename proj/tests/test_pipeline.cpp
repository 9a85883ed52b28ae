#include <gtest/gtest.h>

#include <filesystem>

#include "satforge/digest.hpp"
#include "satforge/error.hpp"
#include "satforge/manifest.hpp"
#include "satforge/pipeline.hpp"

using namespace satforge;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("satforge-pipeline-" + name);
  fs::remove_all(p);
  return p;
}

RunConfig small_gen(const fs::path& out) {
  RunConfig c;
  c.seed = 5;
  c.out = out.string();
  c.families = "random-ksat:6,clique:6,vcover:6";
  c.balanced = true;
  return c;
}

}  // namespace

TEST(FamilySpec, Parse) {
  const auto r = parse_family_spec("random-ksat:40,clique:3,vcover:2,sr:4");
  ASSERT_EQ(r.size(), 4u);
  EXPECT_EQ(r[2].family, "vertex-cover");
  EXPECT_EQ(r[3].count, 4);
  EXPECT_THROW(parse_family_spec("dominating-set:3"), DataError);
  EXPECT_THROW(parse_family_spec("clique"), DataError);
  EXPECT_THROW(parse_family_spec("clique:0"), DataError);
  EXPECT_THROW(parse_family_spec(""), DataError);
}

TEST(RunRecord, JsonRoundTrip) {
  RunRecord r;
  r.command = "embed";
  r.config.seed = 17;
  r.config.tables = {"a", "b"};
  r.config.train.lr = 0.0123;
  r.inputs["corpus"] = "d1";
  r.outputs["embeddings.tsv"] = "d2";
  r.transfer = true;
  r.notes = {"n"};
  const std::string j = r.to_json();
  EXPECT_EQ(RunRecord::from_json(j).to_json(), j);
  EXPECT_THROW(RunRecord::from_json("{}"), DataError);
}

TEST(VariantConsistency, CheckpointRequirements) {
  RunConfig c;
  c.variant = "static-sat";
  EXPECT_NO_THROW(c.check_variant_consistency());
  c.checkpoint = "x";
  EXPECT_THROW(c.check_variant_consistency(), DataError);
  c.variant = "forge-mip";
  EXPECT_NO_THROW(c.check_variant_consistency());
  c.checkpoint.clear();
  EXPECT_THROW(c.check_variant_consistency(), DataError);
}

TEST(Gen, BalancedAndByteIdentical) {
  const fs::path a = scratch("gen-a"), b = scratch("gen-b");
  const CommandResult ra = cmd_gen(small_gen(a));
  ASSERT_EQ(ra.exit_code, kExitOk);
  const CommandResult rb = cmd_gen(small_gen(b));
  EXPECT_EQ(ra.record.outputs, rb.record.outputs);
  EXPECT_EQ(ra.record.outputs.size(), 18u + 2u);
  const CorpusManifest m = CorpusManifest::load((a / "manifest.tsv").string());
  ASSERT_EQ(m.entries.size(), 18u);
  int sat = 0;
  for (const auto& e : m.entries) {
    ASSERT_TRUE(e.feasibility);
    sat += *e.feasibility == Feasibility::kSat;
  }
  EXPECT_EQ(sat, 9);
  EXPECT_TRUE(fs::exists(a / kRunRecordName));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Gen, SrPairs) {
  const fs::path out = scratch("gen-sr");
  RunConfig c;
  c.out = out.string();
  c.families = "sr:4";
  ASSERT_EQ(cmd_gen(c).exit_code, kExitOk);
  const CorpusManifest m = CorpusManifest::load((out / "manifest.tsv").string());
  ASSERT_EQ(m.entries.size(), 4u);
  EXPECT_EQ(*m.entries[0].feasibility, Feasibility::kUnsat);
  EXPECT_EQ(*m.entries[1].feasibility, Feasibility::kSat);
  fs::remove_all(out);
}

TEST(Label, FillsUnknowns) {
  const fs::path dir = scratch("label");
  ASSERT_EQ(cmd_gen(small_gen(dir / "corpus")).exit_code, kExitOk);
  CorpusManifest m = CorpusManifest::load((dir / "corpus" / "manifest.tsv").string());
  for (auto& e : m.entries) e.feasibility.reset();
  m.save((dir / "corpus" / "unlabeled.tsv").string());
  RunConfig c;
  c.corpus = (dir / "corpus" / "unlabeled.tsv").string();
  c.out = (dir / "labeled").string();
  const CommandResult r = cmd_label(c);
  ASSERT_EQ(r.exit_code, kExitOk);
  const CorpusManifest l = CorpusManifest::load((dir / "labeled" / "manifest.tsv").string());
  const CorpusManifest orig = CorpusManifest::load((dir / "corpus" / "manifest.tsv").string());
  for (std::size_t i = 0; i < l.entries.size(); ++i) EXPECT_EQ(l.entries[i].feasibility, orig.entries[i].feasibility);
  fs::remove_all(dir);
}

TEST(Pipeline, PretrainEmbedEvalReproduce) {
  const fs::path dir = scratch("e2e");
  ASSERT_EQ(cmd_gen(small_gen(dir / "corpus")).exit_code, kExitOk);
  const std::string manifest = (dir / "corpus" / "manifest.tsv").string();

  RunConfig pre;
  pre.corpus = manifest;
  pre.out = (dir / "ckpt").string();
  pre.train.epochs = 3;
  pre.train.hidden = 16;
  pre.train.latent = 8;
  pre.train.codebook_size = 8;
  const CommandResult rp = cmd_pretrain(pre);
  ASSERT_EQ(rp.exit_code, kExitOk) << rp.messages.back();
  EXPECT_FALSE(rp.record.checkpoint_digest.empty());
  const std::string log = read_file((dir / "ckpt" / "loss_log.tsv").string());
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 4);

  RunConfig emb;
  emb.corpus = manifest;
  emb.checkpoint = (dir / "ckpt" / "checkpoint.bin").string();
  emb.variant = "forge-sat";
  emb.out = (dir / "forge").string();
  ASSERT_EQ(cmd_embed(emb).exit_code, kExitOk);
  emb.checkpoint.clear();
  emb.variant = "static-sat";
  emb.out = (dir / "static").string();
  ASSERT_EQ(cmd_embed(emb).exit_code, kExitOk);

  RunConfig ev;
  ev.tables = {(dir / "forge" / "embeddings.tsv").string(), (dir / "static" / "embeddings.tsv").string()};
  ev.expect_variants = {"forge-sat", "static-sat"};
  ev.trials = 50;
  ev.out = (dir / "eval").string();
  const CommandResult re = cmd_eval(ev);
  ASSERT_EQ(re.exit_code, kExitOk);
  EXPECT_TRUE(fs::exists(dir / "eval" / "scatter_FORGE-SAT.svg"));
  EXPECT_TRUE(fs::exists(dir / "eval" / "scatter_STATIC-SAT.svg"));

  for (const char* sub : {"corpus", "ckpt", "forge", "eval"}) {
    const CommandResult rr = cmd_reproduce((dir / sub / kRunRecordName).string());
    EXPECT_EQ(rr.exit_code, kExitOk) << sub << ": " << rr.messages.front();
  }

  ev.expect_variants = {"forge-mip"};
  ev.out = (dir / "eval-missing").string();
  EXPECT_EQ(cmd_eval(ev).exit_code, kExitData);

  // Editing the corpus must surface as a divergence.
  std::string first = read_file((dir / "corpus" / "random-ksat" / "random-ksat-0000.cnf").string());
  write_file((dir / "corpus" / "random-ksat" / "random-ksat-0000.cnf").string(), first + "c edited\n");
  const CommandResult diverged = cmd_reproduce((dir / "forge" / kRunRecordName).string());
  EXPECT_EQ(diverged.exit_code, kExitDivergence);
  bool mentions_corpus = false;
  for (const auto& m : diverged.messages) mentions_corpus = mentions_corpus || m.find("corpus") != std::string::npos;
  EXPECT_TRUE(mentions_corpus);
  fs::remove_all(dir);
}

TEST(Pipeline, FailedRunLeavesNoPartialOutputs) {
  const fs::path dir = scratch("fail");
  fs::create_directories(dir);
  write_file((dir / "bad.cnf").string(), "p cnf 1 1\n5 0\n");
  write_file((dir / "manifest.tsv").string(), "bad.cnf\tx\tSAT\t-\n");
  RunConfig c;
  c.corpus = (dir / "manifest.tsv").string();
  c.variant = "static-sat";
  c.out = (dir / "out").string();
  const CommandResult r = cmd_embed(c);
  EXPECT_EQ(r.exit_code, kExitData);
  EXPECT_FALSE(fs::exists(dir / "out" / "embeddings.tsv"));
  EXPECT_EQ(RunRecord::from_json(read_file((dir / "out" / kRunRecordName).string())).status, "failed");
  fs::remove_all(dir);
}
