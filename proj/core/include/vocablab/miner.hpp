#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vocablab/metrics.hpp"

namespace vocablab::miner {

struct DivergenceRecord {
  std::size_t index = 0;  // 1-based line number
  std::string source;
  std::string reference;
  std::string hyp_a;
  std::string hyp_b;
  double chrf_a = 0.0;
  double chrf_b = 0.0;
  double delta = 0.0;  // chrf_a - chrf_b

  bool operator==(const DivergenceRecord&) const = default;
};

struct MineOptions {
  double threshold = 50.0;
  // Keep lines where |delta| >= threshold, i.e. either system wins.
  bool symmetric = false;
  metrics::ChrfParams chrf;
  std::size_t workers = 1;
};

// Lines where system A beats system B by at least `threshold` sentence chrF
// points, highest delta first (ties by line). Throws kAlignment unless all
// four inputs have the same number of lines.
std::vector<DivergenceRecord> mine_divergence(std::span<const std::string> source,
                                              std::span<const std::string> reference,
                                              std::span<const std::string> hyp_a,
                                              std::span<const std::string> hyp_b, const MineOptions& options = {});

std::vector<DivergenceRecord> mine_divergence_files(const std::filesystem::path& source,
                                                    const std::filesystem::path& reference,
                                                    const std::filesystem::path& hyp_a,
                                                    const std::filesystem::path& hyp_b,
                                                    const MineOptions& options = {});

// Plain-text table shaped like the paper's example translations: per record
// a source row, a reference row, and one row per system with its score.
// `limit` 0 means no limit.
std::string render_examples(std::span<const DivergenceRecord> records, std::size_t limit = 0,
                            std::string_view label_a = "A", std::string_view label_b = "B");

// Inverse of render_examples; scores come back rounded to one decimal.
std::vector<DivergenceRecord> parse_rendered(std::string_view table);

// index, chrf_a, chrf_b, delta, then the four texts (escaped).
std::string to_tsv(std::span<const DivergenceRecord> records);

}  // namespace vocablab::miner
