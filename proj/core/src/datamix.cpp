#include "vocablab/datamix.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <unordered_set>

#include <json.hpp>

#include "vocablab/error.hpp"
#include "vocablab/io.hpp"
#include "vocablab/utf8.hpp"

namespace vocablab::datamix {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kFinalShuffleStream = 0;

std::string_view selection_name(Selection s) { return s == Selection::kHead ? "head" : "shuffle"; }

Selection parse_selection(std::string_view s) {
  if (s == "shuffle") return Selection::kShuffle;
  if (s == "head") return Selection::kHead;
  throw Error(ErrorKind::kConfig, "unknown selection mode '" + std::string(s) + "' (expected shuffle|head)");
}

Bitext load_bitext(const BitextFiles& files) {
  Bitext b;
  b.source_lines = io::read_lines(files.source);
  b.target_lines = io::read_lines(files.target);
  if (b.source_lines.size() != b.target_lines.size())
    throw Error(ErrorKind::kAlignment, "ragged bitext: " + files.source.string() + " has " +
                                           std::to_string(b.source_lines.size()) + " lines, " +
                                           files.target.string() + " has " +
                                           std::to_string(b.target_lines.size()));
  return b;
}

std::vector<Request> requests_from_json(const nlohmann::json& arr, const fs::path& base) {
  std::vector<Request> out;
  for (const auto& item : arr) {
    Request r;
    fs::path src = item.at("source").get<std::string>();
    fs::path trg = item.at("target").get<std::string>();
    r.files.source = src.is_absolute() ? src : base / src;
    r.files.target = trg.is_absolute() ? trg : base / trg;
    r.lines = item.at("lines").get<std::size_t>();
    r.domain = item.value("domain", "");
    out.push_back(std::move(r));
  }
  return out;
}

nlohmann::json requests_to_json(const std::vector<Request>& reqs, const fs::path& out_dir) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reqs) {
    arr.push_back({{"source", r.files.source.lexically_relative(out_dir).generic_string()},
                   {"target", r.files.target.lexically_relative(out_dir).generic_string()},
                   {"lines", r.lines},
                   {"domain", r.domain},
                   {"source_sha256", io::sha256_file(r.files.source)},
                   {"target_sha256", io::sha256_file(r.files.target)}});
  }
  return arr;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over (seed, stream)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % bound);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[uniform_below(rng, i)]);
  return idx;
}

MixManifest manifest_from_json(const nlohmann::json& j, const fs::path& base_dir) {
  MixManifest m;
  try {
    m.components = requests_from_json(j.at("components"), base_dir);
    m.validation = requests_from_json(j.value("validation", nlohmann::json::array()), base_dir);
    m.seed = j.value("seed", std::uint64_t{1});
    m.dedup = j.value("dedup", false);
    m.selection = parse_selection(j.value("selection", std::string("shuffle")));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("mix manifest: ") + e.what());
  }
  if (m.components.empty()) throw Error(ErrorKind::kConfig, "mix manifest has no components");
  return m;
}

MixManifest load_manifest(const fs::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kParse, path.string() + ": " + e.what());
  }
  return manifest_from_json(j, path.parent_path());
}

MixResult mix(const MixManifest& manifest) {
  std::vector<std::pair<BitextFiles, Bitext>> data;
  auto load = [&](const Request& r) {
    for (const auto& [f, b] : data)
      if (f == r.files) return;
    data.emplace_back(r.files, load_bitext(r.files));
  };
  for (const auto& r : manifest.validation) load(r);
  for (const auto& r : manifest.components) load(r);
  return mix(manifest, data);
}

MixResult mix(const MixManifest& manifest, const std::vector<std::pair<BitextFiles, Bitext>>& data) {
  struct Source {
    const Bitext* bitext;
    std::vector<std::size_t> order;
    std::size_t cursor = 0;
  };
  // Streams are numbered by first appearance so the shuffle of one file
  // does not depend on what else the manifest lists after it.
  std::vector<std::pair<BitextFiles, Source>> sources;
  auto source_for = [&](const Request& r) -> Source& {
    for (auto& [f, s] : sources)
      if (f == r.files) return s;
    const Bitext* b = nullptr;
    for (const auto& [f, bt] : data)
      if (f == r.files) b = &bt;
    if (!b) throw Error(ErrorKind::kInput, "no data for " + r.files.source.string());
    if (b->source_lines.size() != b->target_lines.size())
      throw Error(ErrorKind::kAlignment, "ragged bitext " + r.files.source.string() + ": " +
                                             std::to_string(b->source_lines.size()) + " vs " +
                                             std::to_string(b->target_lines.size()) + " lines");
    Source s{b, {}, 0};
    if (manifest.selection == Selection::kShuffle) {
      s.order = permutation(b->size(), derive_seed(manifest.seed, sources.size() + 1));
    } else {
      s.order.resize(b->size());
      for (std::size_t i = 0; i < s.order.size(); ++i) s.order[i] = i;
    }
    sources.emplace_back(r.files, std::move(s));
    return sources.back().second;
  };
  for (const auto& r : manifest.validation) source_for(r);
  for (const auto& r : manifest.components) source_for(r);

  MixResult out;
  std::unordered_set<std::string> valid_sources;
  for (std::uint32_t vi = 0; vi < manifest.validation.size(); ++vi) {
    const auto& req = manifest.validation[vi];
    Source& s = source_for(req);
    if (s.cursor + req.lines > s.order.size())
      throw Error(ErrorKind::kQuota, "validation request for " + std::to_string(req.lines) + " lines from " +
                                         req.files.source.string() + " exceeds the " +
                                         std::to_string(s.order.size() - s.cursor) + " available");
    for (std::size_t k = 0; k < req.lines; ++k) {
      const std::size_t idx = s.order[s.cursor++];
      out.valid.source_lines.push_back(s.bitext->source_lines[idx]);
      out.valid.target_lines.push_back(s.bitext->target_lines[idx]);
      out.valid_origin.push_back(vi);
      if (manifest.dedup) valid_sources.insert(s.bitext->source_lines[idx]);
    }
  }

  std::vector<std::string> src, trg;
  std::vector<std::uint32_t> origin;
  for (std::uint32_t ci = 0; ci < manifest.components.size(); ++ci) {
    const auto& req = manifest.components[ci];
    Source& s = source_for(req);
    std::size_t taken = 0;
    while (taken < req.lines && s.cursor < s.order.size()) {
      const std::size_t idx = s.order[s.cursor++];
      if (manifest.dedup && valid_sources.contains(s.bitext->source_lines[idx])) continue;
      src.push_back(s.bitext->source_lines[idx]);
      trg.push_back(s.bitext->target_lines[idx]);
      origin.push_back(ci);
      ++taken;
    }
    if (taken < req.lines)
      throw Error(ErrorKind::kQuota, "training request for " + std::to_string(req.lines) + " lines from " +
                                         req.files.source.string() + " could only be filled with " +
                                         std::to_string(taken));
  }

  const auto perm = permutation(src.size(), derive_seed(manifest.seed, kFinalShuffleStream));
  out.train.source_lines.reserve(src.size());
  out.train.target_lines.reserve(src.size());
  out.train_origin.reserve(src.size());
  for (std::size_t i : perm) {
    out.train.source_lines.push_back(std::move(src[i]));
    out.train.target_lines.push_back(std::move(trg[i]));
    out.train_origin.push_back(origin[i]);
  }
  out.train.domain_tag = out.valid.domain_tag = "mixed";
  return out;
}

nlohmann::json resolved_manifest(const MixManifest& manifest, const fs::path& out_dir) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["seed"] = manifest.seed;
  j["dedup"] = manifest.dedup;
  j["selection"] = selection_name(manifest.selection);
  j["components"] = requests_to_json(manifest.components, out_dir);
  j["validation"] = requests_to_json(manifest.validation, out_dir);
  return j;
}

void write_mix(const MixManifest& manifest, const MixResult& result, const fs::path& out_dir, bool overwrite) {
  const std::vector<std::pair<std::string, const std::vector<std::string>*>> files = {
      {"train.src", &result.train.source_lines},
      {"train.trg", &result.train.target_lines},
      {"valid.src", &result.valid.source_lines},
      {"valid.trg", &result.valid.target_lines},
  };
  for (const auto& [name, lines] : files) io::ensure_writable(out_dir / name, overwrite);
  io::ensure_writable(out_dir / "manifest.resolved.json", overwrite);

  nlohmann::json j = resolved_manifest(manifest, out_dir);
  for (const auto& [name, lines] : files) {
    io::write_lines(out_dir / name, *lines, overwrite);
    j["outputs"][name] = {{"lines", lines->size()}, {"sha256", io::sha256_file(out_dir / name)}};
  }
  io::write_file(out_dir / "manifest.resolved.json",
                 j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n", overwrite);
}

bool Diagnostics::ok() const {
  return std::none_of(items.begin(), items.end(),
                      [](const Diagnostic& d) { return d.severity == Diagnostic::Severity::kError; });
}

Diagnostics check_parallel(const Bitext& bitext) {
  Diagnostics d;
  if (bitext.source_lines.size() != bitext.target_lines.size())
    d.items.push_back({Diagnostic::Severity::kError, "", 0, std::nullopt,
                       "alignment: source has " + std::to_string(bitext.source_lines.size()) +
                           " lines, target has " + std::to_string(bitext.target_lines.size())});
  auto scan = [&](const std::vector<std::string>& lines, const std::string& side) {
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].empty())
        d.items.push_back({Diagnostic::Severity::kWarning, side, i + 1, std::nullopt, "empty line"});
      if (auto off = utf8::first_invalid_offset(lines[i]))
        d.items.push_back({Diagnostic::Severity::kError, side, i + 1, off,
                           "invalid UTF-8 at byte offset " + std::to_string(*off)});
    }
  };
  scan(bitext.source_lines, "source");
  scan(bitext.target_lines, "target");
  return d;
}

Diagnostics check_parallel(const BitextFiles& files) {
  Bitext b;
  b.source_lines = io::read_lines(files.source);
  b.target_lines = io::read_lines(files.target);
  return check_parallel(b);
}

}  // namespace vocablab::datamix
