#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vocablab/datamix.hpp"

namespace vocablab::pipeline {

inline constexpr int kManifestFormatVersion = 1;
inline constexpr std::size_t kDefaultVocabSize = 32000;

// Stage names, in execution order. Also used for exit codes.
inline constexpr std::string_view kStages[] = {"manifest", "mix",      "train-bpe", "encode",
                                               "prefix",   "vocab",    "overlap",   "comp-size",
                                               "write"};

struct Corpus {
  std::filesystem::path source;  // text in the language itself
  std::filesystem::path target;  // aligned target-language text
  std::string domain;
};

enum class Order {
  kSubsetThenTokenize,  // tokenizers train on the selected training lines
  kTokenizeThenSubset,  // tokenizers train on the head of the full corpus
};

struct MixQuota {
  std::map<std::string, std::size_t> train_lines;  // per language; 0 or absent = skip
  std::map<std::string, std::size_t> valid_lines;
  datamix::Selection selection = datamix::Selection::kShuffle;
  bool dedup = true;
};

struct ExperimentManifest {
  std::string name;
  std::string source;
  std::vector<std::string> auxiliary;
  std::string target;
  std::map<std::string, Corpus> corpora;
  // Per language code (source side) and the target code; default 32,000.
  std::map<std::string, std::size_t> vocab_size;
  bool byte_fallback = true;
  // Lines for each source-side tokenizer and for the target tokenizer;
  // 0 = all available.
  std::size_t tokenizer_lines = 0;
  std::size_t target_tokenizer_lines = 0;
  bool disjoint = false;
  std::map<std::string, std::string> aux_prefixes;
  MixQuota mix;
  // Artifact directory of an earlier run whose vocab/src.vocab and
  // vocab/trg.vocab are reused instead of extracting new ones.
  std::optional<std::filesystem::path> reuse_vocab_from;
  std::uint64_t seed = 1;
  Order order = Order::kSubsetThenTokenize;
  std::size_t workers = 1;
  std::filesystem::path output;

  std::size_t vocab_size_for(const std::string& lang) const;
  std::string prefix_for(const std::string& lang) const;
  // Source language first, then auxiliaries in manifest order.
  std::vector<std::string> source_side_languages() const;
  // Throws kConfig / kInput on an invalid manifest.
  void validate() const;
};

// Relative paths resolve against `base_dir`.
ExperimentManifest manifest_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
ExperimentManifest load_manifest(const std::filesystem::path& path);
// Parameters only (no workers, no absolute paths); stable across reruns.
nlohmann::json manifest_to_json(const ExperimentManifest& m, const std::filesystem::path& relative_to);

struct Artifact {
  std::string path;  // relative to the artifact root, '/' separated
  std::string sha256;
};

struct RunResult {
  std::filesystem::path root;
  std::vector<Artifact> artifacts;  // sorted by path
  std::size_t src_vocab_size = 0;
  std::size_t trg_vocab_size = 0;
  std::map<std::string, std::size_t> language_vocab_sizes;
};

// Figure-2 pipeline: mix -> train tokenizers -> encode -> prefix
// auxiliaries (disjoint) -> merge -> extract vocabularies -> overlap
// reports. Layout under manifest.output:
//   mix/      train/valid bitexts + mix manifest
//   models/   src.<lang>.model, trg.<lang>.model
//   tok/      <lang>.train.tok, train.src.tok, train.trg.tok, valid.*.tok
//   vocab/    <lang>.vocab, src.vocab, trg.vocab, src.yml, trg.yml
//   reports/  overlap_<aux>.json, overlap_triple.json (two auxiliaries)
//   manifest.resolved.json
// Failures raise StageError naming the stage; files of finished stages are
// left in place.
RunResult run_experiment(const ExperimentManifest& manifest, bool overwrite = false);

struct CompSizeResult {
  RunResult joint;
  RunResult disjoint;
  std::string auxiliary;
  std::size_t joint_size = 0;
  std::size_t base_size = 0;
  std::size_t target = 0;
  std::size_t extracted = 0;
};

// Complementary-size variant: a joint run in <output>/joint, then the
// auxiliary tokenizer retrained at |V_joint| - |V_source| and a disjoint
// run in <output>/disjoint. Writes <output>/comp_size.json. Requires
// exactly one auxiliary language.
CompSizeResult comp_size_experiment(const ExperimentManifest& manifest, bool overwrite = false);

// 20 + position of the stage in kStages, 1 for unknown stages.
int stage_exit_code(std::string_view stage);

}  // namespace vocablab::pipeline
