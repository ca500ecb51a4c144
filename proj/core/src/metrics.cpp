#include "vocablab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include <json.hpp>

#include "vocablab/error.hpp"
#include "vocablab/parallel.hpp"
#include "vocablab/utf8.hpp"

namespace vocablab::metrics {

namespace {

bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

// First regex of the 13a post-tokenizer: isolate these ASCII symbols.
bool is_isolated_symbol(char32_t c) {
  return (c >= 0x7B && c <= 0x7E) || (c >= 0x5B && c <= 0x60) || (c >= 0x20 && c <= 0x26) ||
         (c >= 0x28 && c <= 0x2B) || (c >= 0x3A && c <= 0x40) || c == 0x2F;
}

void replace_all(std::u32string& s, std::u32string_view from, std::u32string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::u32string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

// Non-overlapping left-to-right rewrite of two-character matches, the way a
// regex substitution scans.
template <typename Match, typename Emit>
std::u32string rewrite_pairs(const std::u32string& s, Match&& match, Emit&& emit) {
  std::u32string out;
  out.reserve(s.size() + s.size() / 4);
  std::size_t i = 0;
  while (i < s.size()) {
    if (i + 1 < s.size() && match(s[i], s[i + 1])) {
      emit(out, s[i], s[i + 1]);
      i += 2;
    } else {
      out.push_back(s[i]);
      ++i;
    }
  }
  return out;
}

std::vector<std::u32string> split_ws(std::u32string_view s) {
  std::vector<std::u32string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && utf8::is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !utf8::is_space(s[j])) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::u32string tokenize_13a_u32(std::string_view line) {
  std::u32string s = utf8::decode_lossy(line);
  replace_all(s, U"<skipped>", U"");
  replace_all(s, U"-\n", U"");
  replace_all(s, U"\n", U" ");
  if (s.find(U'&') != std::u32string::npos) {
    replace_all(s, U"&quot;", U"\"");
    replace_all(s, U"&amp;", U"&");
    replace_all(s, U"&lt;", U"<");
    replace_all(s, U"&gt;", U">");
  }
  std::u32string padded;
  padded.reserve(s.size() * 2 + 2);
  padded.push_back(U' ');
  for (char32_t c : s) {
    if (is_isolated_symbol(c)) {
      padded.push_back(U' ');
      padded.push_back(c);
      padded.push_back(U' ');
    } else {
      padded.push_back(c);
    }
  }
  padded.push_back(U' ');

  auto period_or_comma = [](char32_t c) { return c == U'.' || c == U','; };
  padded = rewrite_pairs(
      padded, [&](char32_t a, char32_t b) { return !is_digit(a) && period_or_comma(b); },
      [](std::u32string& o, char32_t a, char32_t b) { o += {a, U' ', b, U' '}; });
  padded = rewrite_pairs(
      padded, [&](char32_t a, char32_t b) { return period_or_comma(a) && !is_digit(b); },
      [](std::u32string& o, char32_t a, char32_t b) { o += {U' ', a, U' ', b}; });
  padded = rewrite_pairs(
      padded, [](char32_t a, char32_t b) { return is_digit(a) && b == U'-'; },
      [](std::u32string& o, char32_t a, char32_t b) { o += {a, U' ', b, U' '}; });

  std::u32string joined;
  for (const auto& w : split_ws(padded)) {
    if (!joined.empty()) joined.push_back(U' ');
    joined += w;
  }
  return joined;
}

using NgramCounts = std::unordered_map<std::u32string, double>;

std::vector<NgramCounts> word_ngrams(const std::vector<std::u32string>& tokens, int max_order) {
  std::vector<NgramCounts> out(static_cast<std::size_t>(max_order));
  for (int n = 1; n <= max_order; ++n) {
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
      std::u32string key;
      for (int k = 0; k < n; ++k) {
        if (k) key.push_back(U' ');
        key += tokens[i + static_cast<std::size_t>(k)];
      }
      out[static_cast<std::size_t>(n - 1)][key] += 1;
    }
  }
  return out;
}

// Character n-gram counts as views into `text`; keep the object in place
// while the views are in use.
struct CharNgrams {
  std::u32string text;
  std::vector<std::unordered_map<std::u32string_view, double>> counts;
};

void char_ngrams(std::string_view line, int max_order, bool include_whitespace, CharNgrams& out) {
  out.text = utf8::decode_lossy(line);
  if (!include_whitespace) std::erase_if(out.text, [](char32_t c) { return utf8::is_space(c); });
  const std::u32string_view s = out.text;
  out.counts.assign(static_cast<std::size_t>(max_order), {});
  for (int n = 1; n <= max_order; ++n) {
    auto& m = out.counts[static_cast<std::size_t>(n - 1)];
    m.reserve(s.size());
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= s.size(); ++i) m[s.substr(i, static_cast<std::size_t>(n))] += 1;
  }
}

std::string fmt_double(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string beta_name(double beta) {
  if (beta == std::floor(beta)) return std::to_string(static_cast<long long>(beta));
  return fmt_double("%g", beta);
}

void require_nonempty(std::span<const EvalPair> pairs, std::string_view metric) {
  if (pairs.empty()) throw Error(ErrorKind::kInput, std::string(metric) + ": no sentence pairs to score");
}

std::string html_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::vector<EvalPair> make_pairs(std::vector<std::string> hyps, std::vector<std::string> refs) {
  if (hyps.size() != refs.size())
    throw Error(ErrorKind::kAlignment, "hypothesis file has " + std::to_string(hyps.size()) +
                                           " lines, reference file has " + std::to_string(refs.size()));
  std::vector<EvalPair> pairs;
  pairs.reserve(hyps.size());
  for (std::size_t i = 0; i < hyps.size(); ++i) pairs.push_back({std::move(hyps[i]), std::move(refs[i])});
  return pairs;
}

std::string BleuParams::signature() const {
  std::string smooth;
  switch (smoothing) {
    case BleuSmoothing::kNone: smooth = "none"; break;
    case BleuSmoothing::kFloor: smooth = "floor[" + fmt_double("%g", smooth_value.value_or(0.1)) + "]"; break;
    case BleuSmoothing::kAddK: smooth = "add-k[" + fmt_double("%g", smooth_value.value_or(1.0)) + "]"; break;
    case BleuSmoothing::kExp: smooth = "exp"; break;
  }
  return "BLEU|nrefs:1|case:mixed|eff:" + std::string(effective_order ? "yes" : "no") +
         "|tok:" + (tokenizer == BleuTokenizer::k13a ? "13a" : "none") + "|smooth:" + smooth +
         "|order:" + std::to_string(max_order);
}

std::string ChrfParams::signature() const {
  return "chrF" + beta_name(beta) + "|nrefs:1|case:mixed|eff:" + (eps_smoothing ? "no" : "yes") +
         "|nc:" + std::to_string(char_order) + "|nw:0|space:" + (include_whitespace ? "yes" : "no");
}

std::string tokenize_13a(std::string_view line) { return utf8::encode(tokenize_13a_u32(line)); }

BleuStats bleu_stats(const EvalPair& pair, const BleuParams& params) {
  auto prepare = [&](std::string_view s) {
    return params.tokenizer == BleuTokenizer::k13a ? split_ws(tokenize_13a_u32(s)) : split_ws(utf8::decode_lossy(s));
  };
  const auto hyp = prepare(pair.hypothesis);
  const auto ref = prepare(pair.reference);
  const auto hyp_ngrams = word_ngrams(hyp, params.max_order);
  const auto ref_ngrams = word_ngrams(ref, params.max_order);

  BleuStats st;
  st.correct.assign(static_cast<std::size_t>(params.max_order), 0.0);
  st.total.assign(static_cast<std::size_t>(params.max_order), 0.0);
  st.hyp_len = static_cast<double>(hyp.size());
  st.ref_len = static_cast<double>(ref.size());
  for (std::size_t n = 0; n < hyp_ngrams.size(); ++n) {
    for (const auto& [ng, count] : hyp_ngrams[n]) {
      st.total[n] += count;
      auto it = ref_ngrams[n].find(ng);
      if (it != ref_ngrams[n].end()) st.correct[n] += std::min(count, it->second);
    }
  }
  return st;
}

double bleu_from_stats(BleuStats st, const BleuParams& params) {
  const auto order = static_cast<std::size_t>(params.max_order);
  double bp = 1.0;
  if (st.hyp_len < st.ref_len) bp = st.hyp_len > 0 ? std::exp(1.0 - st.ref_len / st.hyp_len) : 0.0;
  if (std::all_of(st.correct.begin(), st.correct.end(), [](double c) { return c == 0.0; })) return 0.0;

  std::vector<double> precisions(order, 0.0);
  double smooth_mteval = 1.0;
  std::size_t eff_order = order;
  const double floor_value = params.smooth_value.value_or(0.1);
  const double add_k = params.smooth_value.value_or(1.0);
  for (std::size_t n = 1; n <= order; ++n) {
    if (params.smoothing == BleuSmoothing::kAddK && n > 1) {
      st.correct[n - 1] += add_k;
      st.total[n - 1] += add_k;
    }
    if (st.total[n - 1] == 0) {
      // No hypothesis reaches this order anywhere in the corpus. The
      // reference scorer would take log(0) here and report ~0 even for a
      // perfect match; drop the missing orders instead.
      eff_order = n - 1;
      break;
    }
    if (params.effective_order) eff_order = n;
    if (st.correct[n - 1] == 0) {
      if (params.smoothing == BleuSmoothing::kExp) {
        smooth_mteval *= 2;
        precisions[n - 1] = 100.0 / (smooth_mteval * st.total[n - 1]);
      } else if (params.smoothing == BleuSmoothing::kFloor) {
        precisions[n - 1] = 100.0 * floor_value / st.total[n - 1];
      }
    } else {
      precisions[n - 1] = 100.0 * st.correct[n - 1] / st.total[n - 1];
    }
  }
  // Equal precisions (e.g. a perfect match) need no logarithms, which keeps
  // bleu(x, x) at exactly 100.
  if (std::all_of(precisions.begin(), precisions.begin() + static_cast<std::ptrdiff_t>(eff_order),
                  [&](double p) { return p == precisions[0]; }))
    return precisions[0] == 0.0 ? 0.0 : bp * precisions[0];
  double log_sum = 0.0;
  for (std::size_t n = 0; n < eff_order; ++n) log_sum += precisions[n] == 0.0 ? -9999999999.0 : std::log(precisions[n]);
  return bp * std::exp(log_sum / static_cast<double>(eff_order));
}

double bleu(std::span<const EvalPair> pairs, const BleuParams& params) {
  require_nonempty(pairs, "bleu");
  BleuStats total;
  total.correct.assign(static_cast<std::size_t>(params.max_order), 0.0);
  total.total.assign(static_cast<std::size_t>(params.max_order), 0.0);
  for (const auto& p : pairs) {
    const BleuStats s = bleu_stats(p, params);
    for (std::size_t n = 0; n < s.correct.size(); ++n) {
      total.correct[n] += s.correct[n];
      total.total[n] += s.total[n];
    }
    total.hyp_len += s.hyp_len;
    total.ref_len += s.ref_len;
  }
  return bleu_from_stats(std::move(total), params);
}

ChrfStats chrf_stats(const EvalPair& pair, const ChrfParams& params) {
  CharNgrams h, r;
  char_ngrams(pair.hypothesis, params.char_order, params.include_whitespace, h);
  char_ngrams(pair.reference, params.char_order, params.include_whitespace, r);
  const auto& hyp = h.counts;
  const auto& ref = r.counts;
  ChrfStats st;
  st.reserve(static_cast<std::size_t>(params.char_order) * 3);
  for (std::size_t n = 0; n < hyp.size(); ++n) {
    double hyp_count = 0, ref_count = 0, match = 0;
    for (const auto& [ng, c] : hyp[n]) {
      hyp_count += c;
      auto it = ref[n].find(ng);
      if (it != ref[n].end()) match += std::min(c, it->second);
    }
    for (const auto& [ng, c] : ref[n]) ref_count += c;
    // Hypothesis n-grams only count when the reference has n-grams of that order.
    st.push_back(ref[n].empty() ? 0.0 : hyp_count);
    st.push_back(ref_count);
    st.push_back(match);
  }
  return st;
}

double chrf_from_stats(const ChrfStats& stats, const ChrfParams& params) {
  constexpr double kEps = 1e-16;
  const double factor = params.beta * params.beta;
  double score = 0.0, avg_prec = 0.0, avg_rec = 0.0;
  int effective = 0;
  const int order = params.char_order;
  for (int i = 0; i < order; ++i) {
    const double n_hyp = stats[static_cast<std::size_t>(3 * i)];
    const double n_ref = stats[static_cast<std::size_t>(3 * i + 1)];
    const double n_match = stats[static_cast<std::size_t>(3 * i + 2)];
    const double prec = n_hyp > 0 ? n_match / n_hyp : kEps;
    const double rec = n_ref > 0 ? n_match / n_ref : kEps;
    const double denom = factor * prec + rec;
    score += denom > 0 ? (1 + factor) * prec * rec / denom : kEps;
    if (n_hyp > 0 && n_ref > 0) {
      avg_prec += prec;
      avg_rec += rec;
      ++effective;
    }
  }
  if (params.eps_smoothing) return 100.0 * score / order;
  if (effective == 0) return 0.0;
  avg_prec /= effective;
  avg_rec /= effective;
  if (avg_prec + avg_rec == 0.0) return 0.0;
  return 100.0 * (1 + factor) * avg_prec * avg_rec / (factor * avg_prec + avg_rec);
}

double sentence_chrf(std::string_view hypothesis, std::string_view reference, const ChrfParams& params) {
  return chrf_from_stats(chrf_stats({std::string(hypothesis), std::string(reference)}, params), params);
}

ChrfResult chrf(std::span<const EvalPair> pairs, const ChrfParams& params, std::size_t workers) {
  require_nonempty(pairs, "chrf");
  std::vector<ChrfStats> stats(pairs.size());
  for_each_shard(pairs.size(), workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) stats[i] = chrf_stats(pairs[i], params);
  });
  ChrfResult r;
  ChrfStats total(static_cast<std::size_t>(params.char_order) * 3, 0.0);
  r.per_sentence.reserve(pairs.size());
  for (const auto& s : stats) {
    for (std::size_t k = 0; k < s.size(); ++k) total[k] += s[k];
    r.per_sentence.push_back(chrf_from_stats(s, params));
  }
  r.corpus = chrf_from_stats(total, params);
  return r;
}

MetricSet parse_metric_set(std::string_view s) {
  if (s == "bleu") return MetricSet::kBleu;
  if (s == "chrf") return MetricSet::kChrf;
  if (s == "both") return MetricSet::kBoth;
  throw Error(ErrorKind::kConfig, "unknown metric '" + std::string(s) + "' (expected bleu|chrf|both)");
}

ScoreReport score(std::span<const EvalPair> pairs, MetricSet metrics, std::string model,
                  const BleuParams& bleu_params, const ChrfParams& chrf_params, std::size_t workers) {
  ScoreReport r;
  r.model = std::move(model);
  r.pairs = pairs.size();
  std::vector<std::string> sigs;
  if (metrics != MetricSet::kChrf) {
    r.corpus_bleu = bleu(pairs, bleu_params);
    sigs.push_back(bleu_params.signature());
  }
  if (metrics != MetricSet::kBleu) {
    auto c = chrf(pairs, chrf_params, workers);
    r.corpus_chrf = c.corpus;
    r.sentence_chrf = std::move(c.per_sentence);
    sigs.push_back(chrf_params.signature());
  }
  for (std::size_t i = 0; i < sigs.size(); ++i) r.signature += (i ? " + " : "") + sigs[i];
  return r;
}

nlohmann::json to_json(const ScoreReport& r) {
  nlohmann::json j;
  j["model"] = r.model;
  j["pairs"] = r.pairs;
  j["corpus_bleu"] = r.corpus_bleu ? nlohmann::json(*r.corpus_bleu) : nlohmann::json(nullptr);
  j["corpus_chrf"] = r.corpus_chrf ? nlohmann::json(*r.corpus_chrf) : nlohmann::json(nullptr);
  j["sentence_chrf"] = r.sentence_chrf;
  j["signature"] = r.signature;
  return j;
}

ScoreReport score_report_from_json(const nlohmann::json& j) {
  ScoreReport r;
  try {
    r.model = j.value("model", "");
    r.pairs = j.at("pairs").get<std::size_t>();
    if (!j.at("corpus_bleu").is_null()) r.corpus_bleu = j.at("corpus_bleu").get<double>();
    if (!j.at("corpus_chrf").is_null()) r.corpus_chrf = j.at("corpus_chrf").get<double>();
    r.sentence_chrf = j.value("sentence_chrf", std::vector<double>{});
    r.signature = j.at("signature").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("score report: ") + e.what());
  }
  return r;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw Error(ErrorKind::kInput, "mean of no values");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double population_sd(std::span<const double> xs) {
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

RunAggregate aggregate_runs(std::span<const ScoreReport> reports) {
  if (reports.empty()) throw Error(ErrorKind::kInput, "aggregate_runs: no reports");
  RunAggregate agg;
  agg.model = reports.front().model;
  agg.runs = reports.size();
  agg.signature = reports.front().signature;
  std::vector<double> b, c;
  for (const auto& r : reports) {
    if (r.signature != agg.signature)
      throw Error(ErrorKind::kComparability,
                  "cannot aggregate reports with different signatures: '" + agg.signature + "' vs '" + r.signature + "'");
    if (r.corpus_bleu) b.push_back(*r.corpus_bleu);
    if (r.corpus_chrf) c.push_back(*r.corpus_chrf);
  }
  if (b.size() == reports.size()) {
    agg.mean_bleu = mean(b);
    agg.sd_bleu = population_sd(b);
  }
  if (c.size() == reports.size()) {
    agg.mean_chrf = mean(c);
    agg.sd_chrf = population_sd(c);
  }
  return agg;
}

std::string format_mean_sd(double m, double sd) { return fmt_double("%.1f", m) + "^{\xC2\xB1" + fmt_double("%.2f", sd) + "}"; }

std::vector<RunAggregate> aggregate_by_model(std::span<const ScoreReport> reports) {
  std::vector<std::string> order;
  for (const auto& r : reports)
    if (std::find(order.begin(), order.end(), r.model) == order.end()) order.push_back(r.model);
  std::vector<RunAggregate> out;
  for (const auto& model : order) {
    std::vector<ScoreReport> group;
    for (const auto& r : reports)
      if (r.model == model) group.push_back(r);
    out.push_back(aggregate_runs(group));
  }
  return out;
}

std::string results_table_tsv(std::span<const RunAggregate> rows) {
  std::string out = "model\tBLEU\tChrF\truns\n";
  for (const auto& r : rows) {
    out += r.model + '\t';
    out += (r.mean_bleu ? format_mean_sd(*r.mean_bleu, *r.sd_bleu) : "-") + '\t';
    out += (r.mean_chrf ? format_mean_sd(*r.mean_chrf, *r.sd_chrf) : "-") + '\t';
    out += std::to_string(r.runs) + '\n';
  }
  return out;
}

std::string plot_tsv(std::span<const RunAggregate> rows) {
  std::string out = "metric\tmodel\tmean\tsd\n";
  for (const char* metric : {"bleu", "chrf"}) {
    for (const auto& r : rows) {
      const auto& m = std::string_view(metric) == "bleu" ? r.mean_bleu : r.mean_chrf;
      const auto& sd = std::string_view(metric) == "bleu" ? r.sd_bleu : r.sd_chrf;
      if (!m) continue;
      out += std::string(metric) + '\t' + r.model + '\t' + fmt_double("%.4f", *m) + '\t' + fmt_double("%.4f", *sd) + '\n';
    }
  }
  return out;
}

std::string bar_chart_svg(std::span<const RunAggregate> rows, std::string_view metric) {
  constexpr int kBar = 40, kGap = 20, kHeight = 240, kTop = 30, kLeft = 50, kLabel = 80;
  const bool use_bleu = metric == "bleu";
  double max_v = 0.0;
  for (const auto& r : rows) {
    const auto& m = use_bleu ? r.mean_bleu : r.mean_chrf;
    const auto& sd = use_bleu ? r.sd_bleu : r.sd_chrf;
    if (m) max_v = std::max(max_v, *m + *sd);
  }
  if (max_v <= 0) max_v = 1;
  const int width = kLeft + static_cast<int>(rows.size()) * (kBar + kGap) + kGap;
  const int height = kTop + kHeight + kLabel;
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
                    std::to_string(height) + "\">\n";
  svg += "<text x=\"" + std::to_string(kLeft) + "\" y=\"20\" font-size=\"14\">" + (use_bleu ? "BLEU" : "ChrF") +
         "</text>\n";
  svg += "<line x1=\"" + std::to_string(kLeft) + "\" y1=\"" + std::to_string(kTop + kHeight) + "\" x2=\"" +
         std::to_string(width) + "\" y2=\"" + std::to_string(kTop + kHeight) + "\" stroke=\"black\"/>\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& m = use_bleu ? rows[i].mean_bleu : rows[i].mean_chrf;
    const auto& sd = use_bleu ? rows[i].sd_bleu : rows[i].sd_chrf;
    if (!m) continue;
    const double scale = kHeight / max_v;
    const int x = kLeft + kGap + static_cast<int>(i) * (kBar + kGap);
    const double h = *m * scale;
    const double y = kTop + kHeight - h;
    svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + fmt_double("%.2f", y) + "\" width=\"" +
           std::to_string(kBar) + "\" height=\"" + fmt_double("%.2f", h) + "\" fill=\"#4c72b0\"/>\n";
    const double cx = x + kBar / 2.0;
    svg += "<line x1=\"" + fmt_double("%.2f", cx) + "\" y1=\"" + fmt_double("%.2f", y - *sd * scale) + "\" x2=\"" +
           fmt_double("%.2f", cx) + "\" y2=\"" + fmt_double("%.2f", y + *sd * scale) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt_double("%.2f", cx) + "\" y=\"" + std::to_string(kTop + kHeight + 15) +
           "\" font-size=\"11\" text-anchor=\"end\" transform=\"rotate(-45 " + fmt_double("%.2f", cx) + " " +
           std::to_string(kTop + kHeight + 15) + ")\">" + html_escape(rows[i].model) + "</text>\n";
    svg += "<text x=\"" + fmt_double("%.2f", cx) + "\" y=\"" + fmt_double("%.2f", y - *sd * scale - 4) +
           "\" font-size=\"10\" text-anchor=\"middle\">" + fmt_double("%.1f", *m) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace vocablab::metrics
