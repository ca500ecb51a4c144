#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "test_support.hpp"
#include "vocablab/error.hpp"
#include "vocablab/metrics.hpp"

namespace vocablab {
namespace {

using testing::data_dir;
using testing::load_json;

constexpr double kOracleTolerance = 1e-6;

std::vector<metrics::EvalPair> load_suite(const std::string& name) {
  std::vector<metrics::EvalPair> pairs;
  for (const auto& line : io::read_lines(data_dir() / "metrics" / (name + ".tsv"))) {
    const auto tab = line.find('\t');
    pairs.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  return pairs;
}

// Every key:value of the reference scorer's signature, version aside, must
// appear in ours.
void expect_signature_match(const std::string& ours, const std::string& reference) {
  const auto mine = io::split(ours, '|');
  for (const auto& field : io::split(reference, '|')) {
    if (field.starts_with("version:")) continue;
    EXPECT_NE(std::find(mine.begin(), mine.end(), field), mine.end()) << field << " missing from " << ours;
  }
}

class MetricSuite : public ::testing::TestWithParam<std::string> {};

TEST_P(MetricSuite, MatchesReferenceScorer) {
  const auto pairs = load_suite(GetParam());
  const auto expected = load_json(data_dir() / "metrics" / (GetParam() + ".expected.json"));
  EXPECT_NEAR(metrics::bleu(pairs), expected.at("bleu").get<double>(), kOracleTolerance);
  const auto chrf = metrics::chrf(pairs);
  EXPECT_NEAR(chrf.corpus, expected.at("chrf").get<double>(), kOracleTolerance);
  const auto sent = expected.at("sentence_chrf").get<std::vector<double>>();
  ASSERT_EQ(chrf.per_sentence.size(), sent.size());
  for (std::size_t i = 0; i < sent.size(); ++i) EXPECT_NEAR(chrf.per_sentence[i], sent[i], kOracleTolerance) << i;
  expect_signature_match(metrics::BleuParams{}.signature(), expected.at("bleu_signature"));
  expect_signature_match(metrics::ChrfParams{}.signature(), expected.at("chrf_signature"));
}

TEST_P(MetricSuite, ShardedChrfAndPermutationInvariance) {
  auto pairs = load_suite(GetParam());
  const double bleu = metrics::bleu(pairs);
  const auto chrf = metrics::chrf(pairs);
  for (std::size_t w : {2, 4, 8}) {
    const auto sharded = metrics::chrf(pairs, {}, w);
    EXPECT_EQ(sharded.corpus, chrf.corpus);
    EXPECT_EQ(sharded.per_sentence, chrf.per_sentence);
  }
  std::mt19937_64 rng(1);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  EXPECT_NEAR(metrics::bleu(pairs), bleu, 1e-9);
  EXPECT_NEAR(metrics::chrf(pairs).corpus, chrf.corpus, 1e-9);
}

TEST_P(MetricSuite, SelfScoresAreExactlyHundred) {
  auto pairs = load_suite(GetParam());
  for (auto& p : pairs) p.hypothesis = p.reference;
  EXPECT_EQ(metrics::bleu(pairs), 100.0);
  const auto chrf = metrics::chrf(pairs);
  EXPECT_EQ(chrf.corpus, 100.0);
  for (double s : chrf.per_sentence) EXPECT_EQ(s, 100.0);
}

INSTANTIATE_TEST_SUITE_P(Frozen, MetricSuite, ::testing::Values("main200", "noisy200", "table4"));

TEST(Metrics, Table4SentenceScores) {
  // The paper keeps the quote characters in both lines.
  const std::string ref = "\"Let me surprise you.\"";
  EXPECT_EQ(metrics::sentence_chrf(ref, ref), 100.0);
  EXPECT_NEAR(metrics::sentence_chrf("'I am surprised at you.'", ref), 43.1, 0.05);
  EXPECT_NEAR(metrics::sentence_chrf("I should like to make a point.", "Give me a kiss."), 12.9, 0.05);
}

TEST(Metrics, EdgeCases) {
  const std::vector<metrics::EvalPair> none{{"a b c d", "e f g h"}};
  EXPECT_EQ(metrics::bleu(none), 0.0);
  EXPECT_EQ(metrics::sentence_chrf("", "abc"), 0.0);
  EXPECT_EQ(metrics::sentence_chrf("abc", ""), 0.0);
  const std::vector<metrics::EvalPair> empty_hyp{{"", "a reference"}};
  EXPECT_EQ(metrics::bleu(empty_hyp), 0.0);
  EXPECT_THROW(metrics::bleu(std::span<const metrics::EvalPair>{}), Error);
  EXPECT_THROW(metrics::chrf(std::span<const metrics::EvalPair>{}), Error);
  const std::vector<metrics::EvalPair> short_self{{"hi", "hi"}};
  EXPECT_EQ(metrics::bleu(short_self), 100.0);
  EXPECT_THROW(metrics::make_pairs({"a"}, {"a", "b"}), Error);
}

TEST(Metrics, Tokenize13a) {
  EXPECT_EQ(metrics::tokenize_13a("Hello, world!"), "Hello , world !");
  EXPECT_EQ(metrics::tokenize_13a("It costs 3,000.50 dollars."), "It costs 3,000.50 dollars .");
  EXPECT_EQ(metrics::tokenize_13a("a-b 5-6"), "a-b 5 - 6");
  EXPECT_EQ(metrics::tokenize_13a("x &amp; y"), "x & y");
}

TEST(Metrics, CorruptionRarelyHelps) {
  std::mt19937_64 rng(4);
  const auto pairs = load_suite("main200");
  int increased = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    auto corrupted = pairs;
    auto& h = corrupted[rng() % corrupted.size()].hypothesis;
    if (h.empty()) continue;
    h[rng() % h.size()] = static_cast<char>('A' + rng() % 26);
    increased += metrics::chrf(corrupted).corpus > metrics::chrf(pairs).corpus + 1e-12;
  }
  EXPECT_LT(increased, trials / 10);
}

TEST(MetricsAggregate, HandArithmetic) {
  std::vector<metrics::ScoreReport> runs(2);
  runs[0].corpus_bleu = 24;
  runs[1].corpus_bleu = 25;
  for (auto& r : runs) r.signature = "s";
  const auto agg = metrics::aggregate_runs(runs);
  EXPECT_DOUBLE_EQ(*agg.mean_bleu, 24.5);
  EXPECT_DOUBLE_EQ(*agg.sd_bleu, 0.5);
  EXPECT_FALSE(agg.mean_chrf.has_value());

  std::vector<metrics::ScoreReport> same(6);
  for (auto& r : same) r.corpus_chrf = 55.5;
  EXPECT_EQ(*metrics::aggregate_runs(same).sd_chrf, 0.0);
}

TEST(MetricsAggregate, SixRunsMatchIndependentCalculation) {
  const auto j = load_json(data_dir() / "aggregate_six.json");
  const auto scores = j.at("scores").get<std::vector<double>>();
  EXPECT_NEAR(metrics::mean(scores), j.at("mean").get<double>(), 1e-9);
  EXPECT_NEAR(metrics::population_sd(scores), j.at("pstdev").get<double>(), 1e-9);
  EXPECT_EQ(metrics::format_mean_sd(metrics::mean(scores), metrics::population_sd(scores)), "30.2^{±0.39}");
  EXPECT_EQ(metrics::format_mean_sd(30.3, 0.36), "30.3^{±0.36}");
}

TEST(MetricsAggregate, MixedSignaturesAreRejected) {
  std::vector<metrics::ScoreReport> runs(2);
  runs[0].signature = "a";
  runs[1].signature = "b";
  try {
    metrics::aggregate_runs(runs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kComparability);
  }
  EXPECT_THROW(metrics::aggregate_runs(std::span<const metrics::ScoreReport>{}), Error);
}

TEST(MetricsReport, JsonRoundTripAndTables) {
  const auto pairs = load_suite("table4");
  auto r = metrics::score(pairs, metrics::MetricSet::kBoth, "desv");
  EXPECT_EQ(r.pairs, pairs.size());
  EXPECT_EQ(r.sentence_chrf.size(), pairs.size());
  const auto back = metrics::score_report_from_json(metrics::to_json(r));
  EXPECT_EQ(back.corpus_bleu, r.corpus_bleu);
  EXPECT_EQ(back.sentence_chrf, r.sentence_chrf);
  EXPECT_EQ(back.signature, r.signature);

  const auto bleu_only = metrics::score(pairs, metrics::MetricSet::kBleu, "x");
  EXPECT_FALSE(bleu_only.corpus_chrf.has_value());

  std::vector<metrics::ScoreReport> reports{r, r};
  reports[1].model = "defi";
  const auto rows = metrics::aggregate_by_model(reports);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].model, "desv");
  const auto table = metrics::results_table_tsv(rows);
  EXPECT_NE(table.find("desv\t40.3^{±0.00}\t59.0^{±0.00}\t1"), std::string::npos) << table;
  EXPECT_NE(metrics::plot_tsv(rows).find("bleu\tdefi\t"), std::string::npos);
  const auto svg = metrics::bar_chart_svg(rows, "chrf");
  EXPECT_TRUE(svg.starts_with("<svg") || svg.starts_with("<?xml"));
  EXPECT_EQ(metrics::parse_metric_set("both"), metrics::MetricSet::kBoth);
  EXPECT_THROW(metrics::parse_metric_set("ter"), Error);
}

}  // namespace
}  // namespace vocablab
