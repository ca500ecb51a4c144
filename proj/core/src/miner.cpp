#include "vocablab/miner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "vocablab/error.hpp"
#include "vocablab/io.hpp"
#include "vocablab/parallel.hpp"

namespace vocablab::miner {

namespace {

constexpr std::string_view kSep = " | ";
constexpr std::string_view kHeader = "Line | Model | Translation | ChrF";
constexpr std::string_view kRule = "---";
constexpr std::string_view kSourceLabel = "Source";
constexpr std::string_view kReferenceLabel = "Ref";

std::string format_score(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", s);
  std::string out = buf;
  return out == "100.0" ? "100" : out;
}

struct Row {
  std::size_t line;
  std::string model;
  std::string text;
  std::string score;
};

Row parse_row(std::string_view row) {
  const auto first = row.find(kSep);
  if (first == std::string_view::npos) throw Error(ErrorKind::kParse, "table row without separators: " + std::string(row));
  const auto rest = row.substr(first + kSep.size());
  const auto second = rest.find(kSep);
  const auto last = rest.rfind(kSep);
  if (second == std::string_view::npos || last == second)
    throw Error(ErrorKind::kParse, "table row needs four columns: " + std::string(row));
  Row r;
  const std::string line(row.substr(0, first));
  try {
    r.line = std::stoull(line);
  } catch (const std::exception&) {
    throw Error(ErrorKind::kParse, "bad line number '" + line + "'");
  }
  r.model = rest.substr(0, second);
  r.text = rest.substr(second + kSep.size(), last - second - kSep.size());
  r.score = rest.substr(last + kSep.size());
  return r;
}

}  // namespace

std::vector<DivergenceRecord> mine_divergence(std::span<const std::string> source,
                                              std::span<const std::string> reference,
                                              std::span<const std::string> hyp_a,
                                              std::span<const std::string> hyp_b, const MineOptions& options) {
  const std::size_t n = source.size();
  if (reference.size() != n || hyp_a.size() != n || hyp_b.size() != n)
    throw Error(ErrorKind::kAlignment, "line counts differ: source " + std::to_string(n) + ", reference " +
                                           std::to_string(reference.size()) + ", hyp_a " +
                                           std::to_string(hyp_a.size()) + ", hyp_b " + std::to_string(hyp_b.size()));

  std::vector<std::vector<DivergenceRecord>> shards(shard_count(n, options.workers));
  for_each_shard(n, options.workers, [&](std::size_t shard, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double a = metrics::sentence_chrf(hyp_a[i], reference[i], options.chrf);
      const double b = metrics::sentence_chrf(hyp_b[i], reference[i], options.chrf);
      const double delta = a - b;
      const bool keep = options.symmetric ? std::abs(delta) >= options.threshold : delta >= options.threshold;
      if (keep) shards[shard].push_back({i + 1, source[i], reference[i], hyp_a[i], hyp_b[i], a, b, delta});
    }
  });

  std::vector<DivergenceRecord> out;
  for (auto& s : shards) std::move(s.begin(), s.end(), std::back_inserter(out));
  std::stable_sort(out.begin(), out.end(), [&](const DivergenceRecord& x, const DivergenceRecord& y) {
    const double kx = options.symmetric ? std::abs(x.delta) : x.delta;
    const double ky = options.symmetric ? std::abs(y.delta) : y.delta;
    if (kx != ky) return kx > ky;
    return x.index < y.index;
  });
  return out;
}

std::vector<DivergenceRecord> mine_divergence_files(const std::filesystem::path& source,
                                                    const std::filesystem::path& reference,
                                                    const std::filesystem::path& hyp_a,
                                                    const std::filesystem::path& hyp_b, const MineOptions& options) {
  const auto s = io::read_lines(source);
  const auto r = io::read_lines(reference);
  const auto a = io::read_lines(hyp_a);
  const auto b = io::read_lines(hyp_b);
  return mine_divergence(s, r, a, b, options);
}

std::string render_examples(std::span<const DivergenceRecord> records, std::size_t limit, std::string_view label_a,
                            std::string_view label_b) {
  for (auto label : {label_a, label_b})
    if (label.empty() || label.find(kSep) != std::string_view::npos || label == kSourceLabel ||
        label == kReferenceLabel)
      throw Error(ErrorKind::kConfig, "invalid system label '" + std::string(label) + "'");
  if (label_a == label_b) throw Error(ErrorKind::kConfig, "system labels must differ");

  const std::size_t rows = limit == 0 ? records.size() : std::min(limit, records.size());
  std::string out(kHeader);
  out += '\n';
  out += kRule;
  out += '\n';
  auto row = [&](std::size_t line, std::string_view model, std::string_view text, std::string_view score) {
    out += std::to_string(line);
    out += kSep;
    out += model;
    out += kSep;
    out += text;
    out += kSep;
    out += score;
    out += '\n';
  };
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& r = records[i];
    row(r.index, kSourceLabel, r.source, "");
    row(r.index, kReferenceLabel, r.reference, "");
    row(r.index, label_a, r.hyp_a, format_score(r.chrf_a));
    row(r.index, label_b, r.hyp_b, format_score(r.chrf_b));
    out += kRule;
    out += '\n';
  }
  return out;
}

std::vector<DivergenceRecord> parse_rendered(std::string_view table) {
  const auto lines = io::split_lines(table);
  if (lines.empty() || lines[0] != kHeader) throw Error(ErrorKind::kParse, "missing example table header");
  std::vector<DivergenceRecord> out;
  std::vector<Row> block;
  auto flush = [&] {
    if (block.empty()) return;
    if (block.size() != 4 || block[0].model != kSourceLabel || block[1].model != kReferenceLabel)
      throw Error(ErrorKind::kParse, "example block must have Source, Ref and two system rows");
    DivergenceRecord r;
    r.index = block[0].line;
    r.source = block[0].text;
    r.reference = block[1].text;
    r.hyp_a = block[2].text;
    r.hyp_b = block[3].text;
    try {
      r.chrf_a = std::stod(block[2].score);
      r.chrf_b = std::stod(block[3].score);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kParse, "bad score in block for line " + std::to_string(r.index));
    }
    r.delta = r.chrf_a - r.chrf_b;
    out.push_back(std::move(r));
    block.clear();
  };
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i] == kRule) {
      flush();
      continue;
    }
    block.push_back(parse_row(lines[i]));
  }
  flush();
  return out;
}

std::string to_tsv(std::span<const DivergenceRecord> records) {
  std::string out = "index\tchrf_a\tchrf_b\tdelta\tsource\treference\thyp_a\thyp_b\n";
  char buf[128];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%zu\t%.6f\t%.6f\t%.6f\t", r.index, r.chrf_a, r.chrf_b, r.delta);
    out += buf;
    out += io::escape_field(r.source) + '\t' + io::escape_field(r.reference) + '\t' + io::escape_field(r.hyp_a) +
           '\t' + io::escape_field(r.hyp_b) + '\n';
  }
  return out;
}

}  // namespace vocablab::miner
