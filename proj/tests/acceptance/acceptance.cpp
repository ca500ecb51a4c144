// Acceptance suite: one PASS/FAIL line per criterion, exit 0 only if all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "toy_experiment.hpp"
#include "vocablab/bpe.hpp"
#include "vocablab/metrics.hpp"
#include "vocablab/miner.hpp"
#include "vocablab/overlap.hpp"
#include "vocablab/pipeline.hpp"
#include "vocablab/vocab.hpp"

namespace {

using namespace vocablab;
using testing::data_dir;
using testing::TempDir;

// Tolerances.
constexpr double kTable2Seconds = 1.0;
constexpr double kMetricTolerance = 0.1;
constexpr std::size_t kDisjointRuns = 50;
constexpr std::size_t kInclusionExclusionPairs = 100;
constexpr std::size_t kFuzzLines = 10000;
constexpr double kMinerThreshold = 50.0;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome table2_arithmetic() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto sv = overlap::compute_from_sizes(31421, 31383, 58918);
  const auto fi = overlap::compute_from_sizes(31421, 31671, 60577);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(sv.overlap_count == 3886, "de+sv overlap " + std::to_string(sv.overlap_count));
  o.require(overlap::format_percentage(sv.overlap_pct) == "6.6%", "de+sv pct " + overlap::format_percentage(sv.overlap_pct));
  o.require(fi.overlap_count == 2515, "de+fi overlap " + std::to_string(fi.overlap_count));
  o.require(overlap::format_percentage(fi.overlap_pct) == "4.2%", "de+fi pct " + overlap::format_percentage(fi.overlap_pct));
  o.require(secs < kTable2Seconds, "took " + fmt("%.3f s", secs));
  if (o.pass) o.detail = "3886 (6.6%), 2515 (4.2%) in " + fmt("%.6f s", secs);
  return o;
}

Outcome overlap_of_overlaps() {
  Outcome o;
  const auto r = overlap::compute_triple_from_counts(3886, 2515, 2072);
  o.require(r.unique_ab == 1814, "unique_ab " + std::to_string(r.unique_ab));
  o.require(r.unique_ac == 443, "unique_ac " + std::to_string(r.unique_ac));
  o.require(overlap::format_share(r.share_ac) == "82%", "share_ac " + overlap::format_share(r.share_ac));
  o.require(overlap::format_share(r.share_ab) == "53%", "share_ab " + overlap::format_share(r.share_ab));
  if (o.pass) o.detail = "unique 1814 / 443, shares 82% / 53%";
  return o;
}

std::vector<std::string> intersection(const vocab::Vocabulary& a, const vocab::Vocabulary& b) {
  std::vector<std::string> out;
  for (const auto& e : a.entries())
    if (b.contains(e.token)) out.push_back(e.token);
  std::sort(out.begin(), out.end());
  return out;
}

Outcome disjointness() {
  Outcome o;
  const std::vector<std::string> expected{"</s>", "<unk>"};
  const std::vector<std::pair<std::string, std::string>> pairs{{"de", "sv"}, {"de", "fi"}, {"sv", "fi"}, {"fi", "de"}};
  std::mt19937_64 rng(2024);
  for (std::size_t i = 0; i < kDisjointRuns && o.pass; ++i) {
    TempDir dir("vocablab-accept");
    const auto& [src, aux] = pairs[i % pairs.size()];
    const auto m = testing::toy_experiment(dir.path(), 1000 + i, src, {aux}, true, 40 + rng() % 100);
    const auto result = pipeline::run_experiment(m);
    const auto a = vocab::read(result.root / "vocab" / (src + ".vocab"));
    const auto b = vocab::read(result.root / "vocab" / (aux + ".vocab"));
    const auto report = overlap::report_from_json(testing::load_json(result.root / "reports" / ("overlap_" + aux + ".json")));
    const auto joint = vocab::read(result.root / "vocab" / "src.vocab");
    o.require(intersection(a, b) == expected, "run " + std::to_string(i) + ": extracted vocabularies share more than specials");
    o.require(report.overlap_count == 2, "run " + std::to_string(i) + ": report overlap " + std::to_string(report.overlap_count));
    o.require(joint.size() == a.size() + b.size() - 2, "run " + std::to_string(i) + ": joint size");
  }
  if (o.pass) o.detail = std::to_string(kDisjointRuns) + " runs, overlap always {</s>, <unk>}";
  return o;
}

Outcome inclusion_exclusion() {
  Outcome o;
  std::mt19937_64 rng(77);
  const std::vector<std::string> langs{"de", "sv", "fi", "en"};
  for (std::size_t i = 0; i < kInclusionExclusionPairs && o.pass; ++i) {
    const auto la = langs[rng() % langs.size()], lb = langs[rng() % langs.size()];
    const auto ca = testing::random_corpus(rng, 20 + rng() % 80, testing::toy_letters().at(la), 10 + rng() % 60);
    const auto cb = testing::random_corpus(rng, 20 + rng() % 80, testing::toy_letters().at(lb), 10 + rng() % 60);
    const auto ma = bpe::train(ca, {320, true, bpe::Normalization::kNone, 1});
    const auto mb = bpe::train(cb, {320, true, bpe::Normalization::kNone, 1});
    const auto ta = bpe::encode_corpus(ma, ca, la), tb = bpe::encode_corpus(mb, cb, lb);
    const auto va = vocab::extract(ta), vb = vocab::extract(tb);
    const std::vector<bpe::TokenizedCorpus> both{ta, tb};
    const auto joint = vocab::extract(both);
    const std::size_t common = intersection(va, vb).size();
    o.require(joint.size() + common == va.size() + vb.size(),
              "pair " + std::to_string(i) + ": |joint|=" + std::to_string(joint.size()) + " |A|=" +
                  std::to_string(va.size()) + " |B|=" + std::to_string(vb.size()) + " |O|=" + std::to_string(common));
  }
  if (o.pass) o.detail = std::to_string(kInclusionExclusionPairs) + " pairs, identity exact";
  return o;
}

Outcome complementary_sizing() {
  Outcome o;
  o.require(overlap::complementary_size(58918, 31421) == 27497, "sv target");
  o.require(overlap::complementary_size(60577, 31421) == 29156, "fi target");
  std::string runs;
  for (std::uint64_t seed : {1, 2, 3}) {
    TempDir dir("vocablab-accept");
    auto m = testing::toy_experiment(dir.path(), 500 + seed, "de", {seed == 2 ? "fi" : "sv"}, false, 150);
    // Toy vocabularies are smaller than the 260 pieces byte fallback reserves.
    m.byte_fallback = false;
    for (auto& [lang, size] : m.vocab_size) size = 400;
    const auto r = pipeline::comp_size_experiment(m);
    o.require(r.target == r.joint_size - r.base_size, "toy target formula");
    o.require(r.extracted <= r.target,
              "toy extracted " + std::to_string(r.extracted) + " > target " + std::to_string(r.target));
    runs += " " + std::to_string(r.extracted) + "<=" + std::to_string(r.target);
  }
  if (o.pass) o.detail = "27497, 29156; toy extracted/target:" + runs;
  return o;
}

Outcome bpe_round_trip() {
  Outcome o;
  std::mt19937_64 rng(99);
  std::vector<std::string> training;
  for (int i = 0; i < 500; ++i) training.push_back(testing::fuzz_line(rng));
  const auto model = bpe::train(training, {450, true, bpe::Normalization::kNone, 1});
  std::size_t ok = 0;
  for (std::size_t i = 0; i < kFuzzLines; ++i) {
    const auto line = testing::fuzz_line(rng);
    if (model.decode(model.encode(line)) == line)
      ++ok;
    else
      o.require(false, "line " + std::to_string(i) + " did not round-trip");
  }
  if (o.pass) o.detail = std::to_string(ok) + "/" + std::to_string(kFuzzLines) + " lossless";
  return o;
}

Outcome bpe_oracle() {
  Outcome o;
  std::size_t corpora = 0, merges = 0;
  for (const auto& entry : std::filesystem::directory_iterator(data_dir() / "bpe_golden")) {
    if (entry.path().extension() != ".merges") continue;
    const auto stem = entry.path().stem().string();
    const auto params_line = io::read_lines(data_dir() / "bpe_golden" / (stem + ".params")).at(0);
    const auto params = io::split(params_line, '\t');
    const auto corpus = io::read_lines(data_dir() / "bpe_golden" / (stem + ".txt"));
    o.require(corpus.size() <= 1000, stem + " exceeds 1000 lines");
    const auto model = bpe::train(corpus, {std::stoul(std::string(params[0])), params[1] == "1",
                                           bpe::Normalization::kNone, 1});
    const auto golden = io::read_lines(entry.path());
    o.require(model.merges().size() == golden.size(), stem + ": merge count " + std::to_string(model.merges().size()) +
                                                          " vs " + std::to_string(golden.size()));
    for (std::size_t i = 0; i < std::min(golden.size(), model.merges().size()); ++i) {
      const auto& m = model.merges()[i];
      const auto line = std::to_string(i) + "\t" + m.left + "\t" + m.right + "\t" + std::to_string(m.frequency);
      o.require(line == golden[i], stem + ": rank " + std::to_string(i) + " differs");
    }
    ++corpora;
    merges += golden.size();
  }
  o.require(corpora > 0, "no golden corpora found");
  if (o.pass) o.detail = std::to_string(corpora) + " corpora, " + std::to_string(merges) + " merges identical";
  return o;
}

bool signature_matches(const std::string& ours, const std::string& reference) {
  const auto mine = io::split(ours, '|');
  for (const auto& field : io::split(reference, '|'))
    if (!field.starts_with("version:") && std::find(mine.begin(), mine.end(), field) == mine.end()) return false;
  return true;
}

Outcome metric_oracle() {
  Outcome o;
  std::string detail;
  for (const std::string suite : {"main200", "noisy200", "table4"}) {
    std::vector<metrics::EvalPair> pairs;
    for (const auto& line : io::read_lines(data_dir() / "metrics" / (suite + ".tsv"))) {
      const auto tab = line.find('\t');
      pairs.push_back({line.substr(0, tab), line.substr(tab + 1)});
    }
    const auto expected = testing::load_json(data_dir() / "metrics" / (suite + ".expected.json"));
    const double bleu = metrics::bleu(pairs), chrf = metrics::chrf(pairs).corpus;
    const double db = std::abs(bleu - expected.at("bleu").get<double>());
    const double dc = std::abs(chrf - expected.at("chrf").get<double>());
    o.require(db <= kMetricTolerance, suite + ": BLEU off by " + fmt("%.4f", db));
    o.require(dc <= kMetricTolerance, suite + ": chrF off by " + fmt("%.4f", dc));
    o.require(signature_matches(metrics::BleuParams{}.signature(), expected.at("bleu_signature")), suite + ": BLEU signature");
    o.require(signature_matches(metrics::ChrfParams{}.signature(), expected.at("chrf_signature")), suite + ": chrF signature");
    for (auto& p : pairs) p.hypothesis = p.reference;
    o.require(metrics::bleu(pairs) == 100.0, suite + ": bleu(x,x) != 100");
    o.require(metrics::chrf(pairs).corpus == 100.0, suite + ": chrf(x,x) != 100");
    if (suite == "main200") detail = "main200 |dBLEU|=" + fmt("%.2g", db) + " |dchrF|=" + fmt("%.2g", dc);
  }
  if (o.pass) o.detail = detail + "; signatures match; x,x = 100";
  return o;
}

Outcome miner_completeness() {
  Outcome o;
  const auto dir = data_dir() / "miner";
  const auto src = io::read_lines(dir / "src.txt"), ref = io::read_lines(dir / "ref.txt");
  const auto a = io::read_lines(dir / "hyp_a.txt"), b = io::read_lines(dir / "hyp_b.txt");
  const auto deltas = testing::load_json(dir / "expected.json").at("deltas").get<std::vector<double>>();
  o.require(src.size() == 1000 && deltas.size() == 1000, "fixture is not 1000 lines");
  std::set<std::size_t> expected;
  for (std::size_t i = 0; i < deltas.size(); ++i)
    if (deltas[i] >= kMinerThreshold) expected.insert(i + 1);
  miner::MineOptions opt;
  opt.threshold = kMinerThreshold;
  const auto records = miner::mine_divergence(src, ref, a, b, opt);
  std::set<std::size_t> got;
  for (const auto& r : records) got.insert(r.index);
  o.require(got == expected, "mined " + std::to_string(got.size()) + " lines, oracle " + std::to_string(expected.size()));
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& p = records[i - 1];
    const auto& q = records[i];
    o.require(p.delta > q.delta || (p.delta == q.delta && p.index < q.index), "ordering broken at " + std::to_string(i));
  }
  opt.workers = 8;
  o.require(miner::mine_divergence(src, ref, a, b, opt) == records, "8 workers changed the result");
  if (o.pass) o.detail = std::to_string(records.size()) + " lines, identical to the oracle set";
  return o;
}

Outcome determinism() {
  Outcome o;
  TempDir dir("vocablab-accept");
  std::size_t files = 0;
  for (bool disjoint : {true, false}) {
    auto m = testing::toy_experiment(dir / (disjoint ? "d" : "j"), 4242, "de", {"sv", "fi"}, disjoint, 150);
    std::vector<std::vector<std::pair<std::string, std::string>>> trees;
    for (std::size_t workers : {1, 1, 2, 8}) {
      m.workers = workers;
      m.output = dir / ((disjoint ? "d_out" : "j_out") + std::to_string(trees.size()));
      pipeline::run_experiment(m);
      trees.push_back(testing::snapshot(m.output));
    }
    for (std::size_t i = 1; i < trees.size(); ++i)
      o.require(trees[i] == trees[0], std::string(disjoint ? "disjoint" : "joint") + " run " + std::to_string(i) + " differs");
    files += trees[0].size();
  }
  if (o.pass) o.detail = "rerun + workers 1/2/8 byte-identical (" + std::to_string(files) + " files)";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Table 2 overlap arithmetic", table2_arithmetic},
      {"overlap of overlaps", overlap_of_overlaps},
      {"disjoint runs overlap only in specials", disjointness},
      {"inclusion-exclusion on random pairs", inclusion_exclusion},
      {"complementary sizing", complementary_sizing},
      {"BPE fuzzed round trip", bpe_round_trip},
      {"BPE matches brute-force oracle", bpe_oracle},
      {"metrics match reference scorer", metric_oracle},
      {"miner completeness", miner_completeness},
      {"end-to-end determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
