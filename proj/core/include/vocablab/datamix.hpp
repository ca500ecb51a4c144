#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

namespace vocablab::datamix {

struct Bitext {
  std::vector<std::string> source_lines;
  std::vector<std::string> target_lines;
  std::string source_lang;
  std::string target_lang;
  std::string domain_tag;

  std::size_t size() const { return source_lines.size(); }
};

struct BitextFiles {
  std::filesystem::path source;
  std::filesystem::path target;

  bool operator==(const BitextFiles&) const = default;
  auto operator<=>(const BitextFiles&) const = default;
};

struct Request {
  BitextFiles files;
  std::size_t lines = 0;
  std::string domain;
};

enum class Selection {
  kShuffle,  // seeded permutation of each component, then take
  kHead,     // take lines in file order
};

struct MixManifest {
  std::vector<Request> components;
  std::vector<Request> validation;
  std::uint64_t seed = 1;
  bool dedup = false;
  Selection selection = Selection::kShuffle;
};

// Relative paths are resolved against `base_dir`.
MixManifest manifest_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
MixManifest load_manifest(const std::filesystem::path& path);

struct MixResult {
  Bitext train;
  Bitext valid;
  // Index into MixManifest::components / ::validation for every emitted pair.
  std::vector<std::uint32_t> train_origin;
  std::vector<std::uint32_t> valid_origin;
};

// Validation lines come from the head of each component's (shuffled) order,
// training lines from what follows, so the two never share a source line
// index. The joined training set is shuffled once more with the manifest
// seed. Throws kAlignment for ragged bitexts and kQuota when a file is too
// short.
MixResult mix(const MixManifest& manifest);

// Same, over bitexts already in memory; `components[i].files` keys into
// `data`.
MixResult mix(const MixManifest& manifest, const std::vector<std::pair<BitextFiles, Bitext>>& data);

// Writes train.src, train.trg, valid.src, valid.trg and
// manifest.resolved.json (seed, selection, requests, SHA-256 checksums).
void write_mix(const MixManifest& manifest, const MixResult& result, const std::filesystem::path& out_dir,
               bool overwrite);

nlohmann::json resolved_manifest(const MixManifest& manifest, const std::filesystem::path& out_dir);

struct Diagnostic {
  enum class Severity { kWarning, kError };
  Severity severity = Severity::kError;
  std::string side;  // "source", "target" or "" for pairwise checks
  std::size_t line = 0;
  std::optional<std::size_t> byte_offset;
  std::string message;
};

struct Diagnostics {
  std::vector<Diagnostic> items;
  bool ok() const;
};

Diagnostics check_parallel(const Bitext& bitext);
Diagnostics check_parallel(const BitextFiles& files);

// Deterministic shuffling helpers; the outputs are fully specified by the
// seed so mixes reproduce across platforms and standard libraries.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);
std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed);

}  // namespace vocablab::datamix
