#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace vocablab::metrics {

struct EvalPair {
  std::string hypothesis;
  std::string reference;
};

std::vector<EvalPair> make_pairs(std::vector<std::string> hyps, std::vector<std::string> refs);

enum class BleuTokenizer { k13a, kNone };
enum class BleuSmoothing { kNone, kFloor, kAddK, kExp };

struct BleuParams {
  int max_order = 4;
  BleuTokenizer tokenizer = BleuTokenizer::k13a;
  BleuSmoothing smoothing = BleuSmoothing::kExp;
  // Used by floor (default 0.1) and add-k (default 1).
  std::optional<double> smooth_value;
  bool effective_order = false;

  std::string signature() const;
};

struct ChrfParams {
  int char_order = 6;
  double beta = 2.0;
  bool include_whitespace = false;
  // false: average precision/recall over orders with matches possible
  // (the reference scorer's default); true: per-order F averaged with an
  // epsilon floor.
  bool eps_smoothing = false;

  std::string signature() const;
};

// mteval-v13a style tokenization: punctuation split off, "." and ","
// separated except between digits, "-" after a digit separated.
std::string tokenize_13a(std::string_view line);

// Sufficient statistics, summable across pairs.
struct BleuStats {
  std::vector<double> correct;
  std::vector<double> total;
  double hyp_len = 0;
  double ref_len = 0;
};

BleuStats bleu_stats(const EvalPair& pair, const BleuParams& params);
double bleu_from_stats(BleuStats stats, const BleuParams& params);

// Corpus BLEU in [0, 100]. Throws kInput on an empty list.
double bleu(std::span<const EvalPair> pairs, const BleuParams& params = {});

// [hyp, ref, match] per order.
using ChrfStats = std::vector<double>;

ChrfStats chrf_stats(const EvalPair& pair, const ChrfParams& params);
double chrf_from_stats(const ChrfStats& stats, const ChrfParams& params);
double sentence_chrf(std::string_view hypothesis, std::string_view reference, const ChrfParams& params = {});

struct ChrfResult {
  double corpus = 0.0;
  std::vector<double> per_sentence;
};

// Corpus chrF from statistics aggregated over all pairs, plus per-pair
// scores. Throws kInput on an empty list.
ChrfResult chrf(std::span<const EvalPair> pairs, const ChrfParams& params = {}, std::size_t workers = 1);

enum class MetricSet { kBleu, kChrf, kBoth };
MetricSet parse_metric_set(std::string_view s);

struct ScoreReport {
  std::string model;
  std::size_t pairs = 0;
  std::optional<double> corpus_bleu;
  std::optional<double> corpus_chrf;
  std::vector<double> sentence_chrf;
  std::string signature;
};

ScoreReport score(std::span<const EvalPair> pairs, MetricSet metrics, std::string model = {},
                  const BleuParams& bleu_params = {}, const ChrfParams& chrf_params = {}, std::size_t workers = 1);

nlohmann::json to_json(const ScoreReport& r);
ScoreReport score_report_from_json(const nlohmann::json& j);

struct RunAggregate {
  std::string model;
  std::size_t runs = 0;
  std::optional<double> mean_bleu;
  std::optional<double> sd_bleu;
  std::optional<double> mean_chrf;
  std::optional<double> sd_chrf;
  std::string signature;
  // Standard deviations divide by n.
  static constexpr std::string_view kStdDevFormula = "population";
};

// Mean and population standard deviation over runs with identical
// signatures; throws kComparability otherwise.
RunAggregate aggregate_runs(std::span<const ScoreReport> reports);

double mean(std::span<const double> xs);
double population_sd(std::span<const double> xs);

// "30.3^{±0.36}"
std::string format_mean_sd(double mean, double sd);

// Groups reports by model (first-appearance order) and aggregates each group.
std::vector<RunAggregate> aggregate_by_model(std::span<const ScoreReport> reports);

// model<TAB>BLEU<TAB>ChrF<TAB>runs with mean^{±sd} cells.
std::string results_table_tsv(std::span<const RunAggregate> rows);
// metric<TAB>model<TAB>mean<TAB>sd, one row per metric and model.
std::string plot_tsv(std::span<const RunAggregate> rows);
// Bar chart of one metric ("bleu" or "chrf") with sd whiskers.
std::string bar_chart_svg(std::span<const RunAggregate> rows, std::string_view metric);

}  // namespace vocablab::metrics
