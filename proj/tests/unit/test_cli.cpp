#include <gtest/gtest.h>

#include <sstream>

#include "test_support.hpp"
#include "toy_experiment.hpp"
#include "vocablab/cli.hpp"
#include "vocablab/error.hpp"
#include "vocablab/vocab.hpp"

namespace vocablab {
namespace {

using testing::TempDir;

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "vocab-lab");
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

TEST(Cli, HelpAndVersion) {
  EXPECT_EQ(run({"--version"}).code, 0);
  EXPECT_NE(run({"--version"}).out.find("bpe model format 1"), std::string::npos);
  const auto help = run({"overlap", "--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("--sizes"), std::string::npos);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
  const auto bad = run({"overlap", "--sizes", "1", "2", "3", "--bogus"});
  EXPECT_EQ(bad.code, cli::kExitUsage);
  EXPECT_FALSE(bad.err.empty());
  EXPECT_EQ(run({"overlap", "--sizes", "1", "2"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"--workers", "0", "overlap", "--sizes", "1", "1", "1"}).code, cli::kExitUsage);
}

TEST(Cli, PaperArithmetic) {
  const auto sv = run({"overlap", "--sizes", "31421", "31383", "58918"});
  EXPECT_EQ(sv.code, 0);
  EXPECT_NE(sv.out.find("|O|=3886 (6.6%)"), std::string::npos) << sv.out;
  const auto tri = run({"overlap3", "--counts", "3886", "2515", "2072"});
  EXPECT_NE(tri.out.find("unique_ab=1814 unique_ac=443 share_ab=53% share_ac=82%"), std::string::npos) << tri.out;
  EXPECT_EQ(run({"comp-size", "--sizes", "58918", "31421"}).out, "27497\n");
  EXPECT_EQ(run({"comp-size", "--sizes", "60577", "31421"}).out, "29156\n");
  EXPECT_EQ(run({"comp-size", "--sizes", "31421", "31421"}).code, 3 + static_cast<int>(ErrorKind::kConfig));
}

TEST(Cli, ModuleCommandsCompose) {
  TempDir dir;
  std::mt19937_64 rng(1);
  testing::write_lines(dir / "de.txt", testing::random_corpus(rng, 100, "abcdefghiklmnorstuäöü"));
  testing::write_lines(dir / "sv.txt", testing::random_corpus(rng, 100, "abdefghijklmnoprstuvåäö"));
  const auto p = [&](const std::string& name) { return (dir / name).string(); };

  for (const std::string lang : {"de", "sv"}) {
    ASSERT_EQ(run({"train-bpe", "--input", p(lang + ".txt"), "--vocab-size", "320", "--model", p(lang + ".model")}).code, 0);
    ASSERT_EQ(run({"encode", "--model", p(lang + ".model"), "--input", p(lang + ".txt"), "--output", p(lang + ".tok")}).code, 0);
    ASSERT_EQ(run({"decode", "--model", p(lang + ".model"), "--input", p(lang + ".tok"), "--output", p(lang + ".dec")}).code, 0);
    EXPECT_EQ(io::read_file(dir / (lang + ".dec")), io::read_file(dir / (lang + ".txt")));
  }
  ASSERT_EQ(run({"prefix", "--input", p("sv.tok"), "--lang", "sv", "--output", p("sv.pre.tok")}).code, 0);
  ASSERT_EQ(run({"prefix", "--input", p("sv.pre.tok"), "--prefix", "SV_", "--strip", "--output", p("sv.back.tok")}).code, 0);
  EXPECT_EQ(io::read_file(dir / "sv.back.tok"), io::read_file(dir / "sv.tok"));

  ASSERT_EQ(run({"extract-vocab", "--input", p("de.tok"), "--output", p("de.vocab")}).code, 0);
  ASSERT_EQ(run({"extract-vocab", "--input", p("sv.pre.tok"), "--output", p("sv.vocab")}).code, 0);
  ASSERT_EQ(run({"extract-vocab", "--input", p("de.tok"), "--input", p("sv.pre.tok"), "--output", p("joint.vocab"),
                 "--compat", p("joint.yml")}).code, 0);
  EXPECT_EQ(vocab::read(dir / "joint.yml").size(), vocab::read(dir / "joint.vocab").size());
  const auto ov = run({"overlap", "--vocab-a", p("de.vocab"), "--vocab-b", p("sv.vocab"), "--vocab-joint",
                       p("joint.vocab"), "--report", p("ov.json"), "--tsv", p("ov.tsv")});
  ASSERT_EQ(ov.code, 0) << ov.err;
  EXPECT_EQ(testing::load_json(dir / "ov.json").at("overlap_count"), 2);
  EXPECT_EQ(io::read_lines(dir / "ov.tsv").size(), 2u);

  // Existing outputs are never replaced without --overwrite.
  const auto again = run({"train-bpe", "--input", p("de.txt"), "--vocab-size", "320", "--model", p("de.model")});
  EXPECT_EQ(again.code, 3 + static_cast<int>(ErrorKind::kIo));
  EXPECT_EQ(run({"--overwrite", "train-bpe", "--input", p("de.txt"), "--vocab-size", "320", "--model", p("de.model")}).code, 0);
}

TEST(Cli, ScoreReportAndMine) {
  TempDir dir;
  std::vector<std::string> hyps, refs;
  for (const auto& line : io::read_lines(testing::data_dir() / "metrics" / "table4.tsv")) {
    const auto tab = line.find('\t');
    hyps.push_back(line.substr(0, tab));
    refs.push_back(line.substr(tab + 1));
  }
  testing::write_lines(dir / "hyp.txt", hyps);
  testing::write_lines(dir / "ref.txt", refs);
  const auto p = [&](const std::string& name) { return (dir / name).string(); };
  const auto s = run({"score", "--hyp", p("hyp.txt"), "--ref", p("ref.txt"), "--model", "desv", "--report", p("a.json"),
                      "--per-sentence", p("sent.txt")});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_NE(s.out.find("BLEU 40.26"), std::string::npos) << s.out;
  EXPECT_NE(s.out.find("chrF 59.04"), std::string::npos) << s.out;
  EXPECT_EQ(io::read_lines(dir / "sent.txt").size(), hyps.size());
  ASSERT_EQ(run({"score", "--hyp", p("hyp.txt"), "--ref", p("ref.txt"), "--model", "desv", "--report", p("b.json")}).code, 0);
  const auto rep = run({"report", "--scores", p("a.json"), p("b.json"), "--out", p("table.tsv"), "--plot", p("plot.tsv"),
                        "--svg", p("chart.svg")});
  ASSERT_EQ(rep.code, 0) << rep.err;
  EXPECT_NE(io::read_file(dir / "table.tsv").find("desv\t40.3^{±0.00}"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir / "chart.svg"));

  const auto mdir = testing::data_dir() / "miner";
  const auto mine = run({"mine", "--src", (mdir / "src.txt").string(), "--ref", (mdir / "ref.txt").string(), "--hyp-a",
                         (mdir / "hyp_a.txt").string(), "--hyp-b", (mdir / "hyp_b.txt").string(), "--out", p("mined.tsv")});
  ASSERT_EQ(mine.code, 0) << mine.err;
  EXPECT_EQ(io::read_lines(dir / "mined.tsv").size(), 449u);
  EXPECT_TRUE(std::filesystem::exists(dir / "mined.tsv.txt"));
  const auto ragged = run({"mine", "--src", (mdir / "src.txt").string(), "--ref", p("ref.txt"), "--hyp-a",
                           (mdir / "hyp_a.txt").string(), "--hyp-b", (mdir / "hyp_b.txt").string(), "--out", p("x.tsv")});
  EXPECT_EQ(ragged.code, 3 + static_cast<int>(ErrorKind::kAlignment));
}

TEST(Cli, CheckParallel) {
  TempDir dir;
  testing::write_lines(dir / "a.txt", {"x", "y"});
  testing::write_lines(dir / "b.txt", {"x"});
  EXPECT_EQ(run({"check-parallel", "--src", (dir / "a.txt").string(), "--trg", (dir / "a.txt").string()}).code, 0);
  EXPECT_EQ(run({"check-parallel", "--src", (dir / "a.txt").string(), "--trg", (dir / "b.txt").string()}).code,
            cli::kExitCheckFailed);
}

TEST(Cli, RunManifest) {
  TempDir dir;
  const auto m = testing::toy_experiment(dir.path(), 3, "de", {"sv"}, true, 100);
  auto j = pipeline::manifest_to_json(m, dir.path());
  j["output"] = "out";
  io::write_file(dir / "m.json", j.dump(2), true);
  const auto r = run({"run", "--manifest", (dir / "m.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "manifest.resolved.json"));
  EXPECT_EQ(testing::load_json(dir / "out" / "reports" / "overlap_sv.json").at("overlap_count"), 2);
  // Second run without --overwrite fails in a pipeline stage.
  const auto again = run({"run", "--manifest", (dir / "m.json").string()});
  EXPECT_GE(again.code, 20);
  EXPECT_LE(again.code, 28);

  j["mix"]["train_lines"]["sv"] = 100000;
  j["output"] = "out2";
  io::write_file(dir / "bad.json", j.dump(2), true);
  EXPECT_EQ(run({"run", "--manifest", (dir / "bad.json").string()}).code, pipeline::stage_exit_code("mix"));
}

}  // namespace
}  // namespace vocablab
