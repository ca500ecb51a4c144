#include "vocablab/pipeline.hpp"

#include <algorithm>
#include <set>

#include "vocablab/bpe.hpp"
#include "vocablab/error.hpp"
#include "vocablab/io.hpp"
#include "vocablab/overlap.hpp"
#include "vocablab/prefix.hpp"
#include "vocablab/vocab.hpp"

namespace vocablab::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kSubsetThenTokenize = "subset-then-tokenize";
constexpr std::string_view kTokenizeThenSubset = "tokenize-then-subset";

fs::path resolve(const fs::path& p, const fs::path& base) { return p.is_absolute() ? p : base / p; }

std::string relative_path(const fs::path& p, const fs::path& base) {
  return fs::absolute(p).lexically_normal().lexically_relative(fs::absolute(base).lexically_normal()).generic_string();
}

Order parse_order(std::string_view s) {
  if (s == kSubsetThenTokenize) return Order::kSubsetThenTokenize;
  if (s == kTokenizeThenSubset) return Order::kTokenizeThenSubset;
  throw Error(ErrorKind::kConfig, "unknown order '" + std::string(s) + "' (expected " +
                                      std::string(kSubsetThenTokenize) + "|" + std::string(kTokenizeThenSubset) + ")");
}

std::vector<std::string> head(const std::vector<std::string>& lines, std::size_t n) {
  if (n == 0 || n >= lines.size()) return lines;
  return {lines.begin(), lines.begin() + static_cast<std::ptrdiff_t>(n)};
}

// Runs one stage, re-raising library errors as StageError so callers learn
// which stage failed and which ones already wrote their files.
class StageRunner {
 public:
  template <typename F>
  auto operator()(std::string_view name, F&& fn) -> decltype(fn()) {
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        completed_.emplace_back(name);
      } else {
        auto r = fn();
        completed_.emplace_back(name);
        return r;
      }
    } catch (const StageError&) {
      throw;
    } catch (const Error& e) {
      throw StageError(std::string(name), e.kind(), e.what() + completed_note());
    } catch (const fs::filesystem_error& e) {
      throw StageError(std::string(name), ErrorKind::kIo, e.what() + completed_note());
    }
  }

 private:
  std::string completed_note() const {
    if (completed_.empty()) return "";
    std::string s = " (completed stages kept:";
    for (const auto& c : completed_) s += " " + c;
    return s + ")";
  }
  std::vector<std::string> completed_;
};

class ArtifactLog {
 public:
  explicit ArtifactLog(fs::path root) : root_(std::move(root)) {}
  const fs::path& root() const { return root_; }
  fs::path add(const std::string& rel) {
    paths_.insert(rel);
    return root_ / rel;
  }
  std::vector<Artifact> checksums() const {
    std::vector<Artifact> out;
    for (const auto& p : paths_) out.push_back({p, io::sha256_file(root_ / p)});
    return out;
  }

 private:
  fs::path root_;
  std::set<std::string> paths_;
};

std::string to_text(const json& j) { return j.dump(2, ' ', false, json::error_handler_t::replace) + "\n"; }

}  // namespace

std::size_t ExperimentManifest::vocab_size_for(const std::string& lang) const {
  auto it = vocab_size.find(lang);
  return it == vocab_size.end() ? kDefaultVocabSize : it->second;
}

std::string ExperimentManifest::prefix_for(const std::string& lang) const {
  auto it = aux_prefixes.find(lang);
  return it == aux_prefixes.end() ? prefix::default_prefix(lang) : it->second;
}

std::vector<std::string> ExperimentManifest::source_side_languages() const {
  std::vector<std::string> out{source};
  out.insert(out.end(), auxiliary.begin(), auxiliary.end());
  return out;
}

void ExperimentManifest::validate() const {
  if (source.empty()) throw Error(ErrorKind::kConfig, "manifest: source language missing");
  if (target.empty()) throw Error(ErrorKind::kConfig, "manifest: target language missing");
  std::set<std::string> seen;
  for (const auto& lang : source_side_languages()) {
    if (lang.empty()) throw Error(ErrorKind::kConfig, "manifest: empty language code");
    if (!seen.insert(lang).second) throw Error(ErrorKind::kConfig, "manifest: language '" + lang + "' listed twice");
    auto c = corpora.find(lang);
    if (c == corpora.end()) throw Error(ErrorKind::kConfig, "manifest: no corpus for '" + lang + "'");
    for (const auto& p : {c->second.source, c->second.target})
      if (!fs::is_regular_file(p)) throw Error(ErrorKind::kInput, "manifest: corpus file not found: " + p.string());
    auto q = mix.train_lines.find(lang);
    if (q == mix.train_lines.end() || q->second == 0)
      throw Error(ErrorKind::kConfig, "manifest: mix.train_lines must be positive for '" + lang + "'");
  }
  for (const auto& [lang, n] : mix.valid_lines)
    if (!seen.contains(lang)) throw Error(ErrorKind::kConfig, "manifest: validation quota for unknown language '" + lang + "'");
  for (const auto& [lang, n] : vocab_size)
    if (n == 0) throw Error(ErrorKind::kConfig, "manifest: vocab size for '" + lang + "' must be positive");
  if (disjoint) {
    std::set<std::string> prefixes;
    for (const auto& lang : auxiliary) {
      prefix::PrefixRule rule{prefix_for(lang), {}};
      rule.validate();
      if (!prefixes.insert(rule.prefix).second)
        throw Error(ErrorKind::kConfig, "manifest: prefix '" + rule.prefix + "' used by two languages");
    }
  }
  if (reuse_vocab_from) {
    for (const char* f : {"vocab/src.vocab", "vocab/trg.vocab"})
      if (!fs::is_regular_file(*reuse_vocab_from / f))
        throw Error(ErrorKind::kInput, "manifest: reuse_vocab_from lacks " + (*reuse_vocab_from / f).string());
  }
  if (output.empty()) throw Error(ErrorKind::kConfig, "manifest: output directory missing");
}

ExperimentManifest manifest_from_json(const json& j, const fs::path& base_dir) {
  ExperimentManifest m;
  try {
    m.name = j.value("name", "");
    m.source = j.at("source").get<std::string>();
    m.auxiliary = j.value("auxiliary", std::vector<std::string>{});
    m.target = j.at("target").get<std::string>();
    for (const auto& [lang, c] : j.at("corpora").items()) {
      Corpus corpus;
      corpus.source = resolve(c.at("source").get<std::string>(), base_dir);
      corpus.target = resolve(c.at("target").get<std::string>(), base_dir);
      corpus.domain = c.value("domain", "");
      m.corpora[lang] = std::move(corpus);
    }
    if (j.contains("vocab_size")) {
      if (j["vocab_size"].is_number()) {
        const auto n = j["vocab_size"].get<std::size_t>();
        for (const auto& lang : m.source_side_languages()) m.vocab_size[lang] = n;
        m.vocab_size[m.target] = n;
      } else {
        m.vocab_size = j["vocab_size"].get<std::map<std::string, std::size_t>>();
      }
    }
    m.byte_fallback = j.value("byte_fallback", true);
    m.tokenizer_lines = j.value("tokenizer_lines", std::size_t{0});
    m.target_tokenizer_lines = j.value("target_tokenizer_lines", std::size_t{0});
    m.disjoint = j.value("disjoint", false);
    m.aux_prefixes = j.value("aux_prefixes", std::map<std::string, std::string>{});
    if (j.contains("mix")) {
      const auto& mx = j["mix"];
      m.mix.train_lines = mx.value("train_lines", std::map<std::string, std::size_t>{});
      m.mix.valid_lines = mx.value("valid_lines", std::map<std::string, std::size_t>{});
      const auto sel = mx.value("selection", std::string("shuffle"));
      if (sel == "shuffle") m.mix.selection = datamix::Selection::kShuffle;
      else if (sel == "head") m.mix.selection = datamix::Selection::kHead;
      else throw Error(ErrorKind::kConfig, "manifest: unknown selection '" + sel + "'");
      m.mix.dedup = mx.value("dedup", true);
    }
    if (j.contains("reuse_vocab_from") && !j["reuse_vocab_from"].is_null())
      m.reuse_vocab_from = resolve(j["reuse_vocab_from"].get<std::string>(), base_dir);
    m.seed = j.value("seed", std::uint64_t{1});
    m.order = parse_order(j.value("order", std::string(kSubsetThenTokenize)));
    m.workers = j.value("workers", std::size_t{1});
    m.output = resolve(j.at("output").get<std::string>(), base_dir);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("manifest: ") + e.what());
  }
  if (m.workers == 0) throw Error(ErrorKind::kConfig, "manifest: workers must be at least 1");
  return m;
}

ExperimentManifest load_manifest(const fs::path& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, path.string() + ": " + e.what());
  }
  return manifest_from_json(j, path.parent_path());
}

json manifest_to_json(const ExperimentManifest& m, const fs::path& relative_to) {
  json j;
  j["format_version"] = kManifestFormatVersion;
  j["name"] = m.name;
  j["source"] = m.source;
  j["auxiliary"] = m.auxiliary;
  j["target"] = m.target;
  json corpora = json::object();
  for (const auto& [lang, c] : m.corpora)
    corpora[lang] = {{"source", relative_path(c.source, relative_to)},
                     {"target", relative_path(c.target, relative_to)},
                     {"domain", c.domain}};
  j["corpora"] = corpora;
  json sizes = json::object();
  for (const auto& lang : m.source_side_languages()) sizes[lang] = m.vocab_size_for(lang);
  sizes[m.target] = m.vocab_size_for(m.target);
  j["vocab_size"] = sizes;
  j["byte_fallback"] = m.byte_fallback;
  j["tokenizer_lines"] = m.tokenizer_lines;
  j["target_tokenizer_lines"] = m.target_tokenizer_lines;
  j["disjoint"] = m.disjoint;
  json prefixes = json::object();
  if (m.disjoint)
    for (const auto& lang : m.auxiliary) prefixes[lang] = m.prefix_for(lang);
  j["aux_prefixes"] = prefixes;
  j["mix"] = {{"train_lines", m.mix.train_lines},
              {"valid_lines", m.mix.valid_lines},
              {"selection", m.mix.selection == datamix::Selection::kHead ? "head" : "shuffle"},
              {"dedup", m.mix.dedup}};
  j["reuse_vocab_from"] = m.reuse_vocab_from ? json(relative_path(*m.reuse_vocab_from, relative_to)) : json(nullptr);
  j["seed"] = m.seed;
  j["order"] = m.order == Order::kSubsetThenTokenize ? kSubsetThenTokenize : kTokenizeThenSubset;
  return j;
}

RunResult run_experiment(const ExperimentManifest& m, bool overwrite) {
  StageRunner stage;
  stage("manifest", [&] { m.validate(); });

  const auto langs = m.source_side_languages();
  auto is_aux = [&](const std::string& lang) { return lang != m.source; };
  ArtifactLog log(m.output);
  RunResult result;
  result.root = m.output;

  // Mixed train/valid bitexts.
  datamix::MixManifest mix_manifest;
  mix_manifest.seed = m.seed;
  mix_manifest.dedup = m.mix.dedup;
  mix_manifest.selection = m.mix.selection;
  for (const auto& lang : langs) {
    const auto& c = m.corpora.at(lang);
    mix_manifest.components.push_back({{c.source, c.target}, m.mix.train_lines.at(lang), c.domain});
    auto v = m.mix.valid_lines.find(lang);
    if (v != m.mix.valid_lines.end() && v->second > 0)
      mix_manifest.validation.push_back({{c.source, c.target}, v->second, c.domain});
  }
  const datamix::MixResult mixed = stage("mix", [&] {
    auto r = datamix::mix(mix_manifest);
    datamix::write_mix(mix_manifest, r, m.output / "mix", overwrite);
    for (const char* f : {"train.src", "train.trg", "valid.src", "valid.trg", "manifest.resolved.json"})
      log.add(std::string("mix/") + f);
    return r;
  });

  auto lang_of_valid = [&](std::size_t i) {
    const auto& files = mix_manifest.validation[mixed.valid_origin[i]].files;
    for (const auto& lang : langs)
      if (m.corpora.at(lang).source == files.source && m.corpora.at(lang).target == files.target) return lang;
    return m.source;
  };
  std::map<std::string, std::vector<std::size_t>> train_rows, valid_rows;
  for (std::size_t i = 0; i < mixed.train.size(); ++i) train_rows[langs[mixed.train_origin[i]]].push_back(i);
  for (std::size_t i = 0; i < mixed.valid.size(); ++i) valid_rows[lang_of_valid(i)].push_back(i);
  auto select = [](const std::vector<std::string>& lines, const std::vector<std::size_t>& rows) {
    std::vector<std::string> out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(lines[r]);
    return out;
  };

  // One tokenizer per source-side language plus one for the target side.
  std::map<std::string, bpe::Model> models;
  bpe::Model target_model;
  stage("train-bpe", [&] {
    for (const auto& lang : langs) {
      std::vector<std::string> data =
          m.order == Order::kSubsetThenTokenize
              ? head(select(mixed.train.source_lines, train_rows[lang]), m.tokenizer_lines)
              : head(io::read_lines(m.corpora.at(lang).source), m.tokenizer_lines);
      bpe::TrainOptions opt{m.vocab_size_for(lang), m.byte_fallback, bpe::Normalization::kNone, m.workers};
      models[lang] = bpe::train(data, opt);
      models[lang].save(log.add("models/src." + lang + ".model"), overwrite);
    }
    std::vector<std::string> data;
    if (m.order == Order::kSubsetThenTokenize) {
      data = head(mixed.train.target_lines, m.target_tokenizer_lines);
    } else {
      for (const auto& lang : langs) {
        auto lines = io::read_lines(m.corpora.at(lang).target);
        data.insert(data.end(), lines.begin(), lines.end());
      }
      data = head(data, m.target_tokenizer_lines);
    }
    bpe::TrainOptions opt{m.vocab_size_for(m.target), m.byte_fallback, bpe::Normalization::kNone, m.workers};
    target_model = bpe::train(data, opt);
    target_model.save(log.add("models/trg." + m.target + ".model"), overwrite);
  });

  std::map<std::string, bpe::TokenizedCorpus> train_tok, valid_tok;
  bpe::TokenizedCorpus trg_train, trg_valid;
  stage("encode", [&] {
    for (const auto& lang : langs) {
      train_tok[lang] = bpe::encode_corpus(models[lang], select(mixed.train.source_lines, train_rows[lang]), lang, m.workers);
      valid_tok[lang] = bpe::encode_corpus(models[lang], select(mixed.valid.source_lines, valid_rows[lang]), lang, m.workers);
    }
    trg_train = bpe::encode_corpus(target_model, mixed.train.target_lines, m.target, m.workers);
    trg_valid = bpe::encode_corpus(target_model, mixed.valid.target_lines, m.target, m.workers);
  });

  if (m.disjoint) {
    stage("prefix", [&] {
      for (const auto& lang : langs) {
        if (!is_aux(lang)) continue;
        const prefix::PrefixRule rule{m.prefix_for(lang), {}};
        train_tok[lang] = prefix::apply_prefix(train_tok[lang], rule, m.workers);
        valid_tok[lang] = prefix::apply_prefix(valid_tok[lang], rule, m.workers);
      }
    });
  }

  // Merged source side, in mix order.
  auto merge_side = [&](std::size_t n, std::map<std::string, std::vector<std::size_t>>& rows,
                        std::map<std::string, bpe::TokenizedCorpus>& tok) {
    bpe::TokenizedCorpus merged;
    merged.language = "src";
    merged.lines.resize(n);
    for (const auto& lang : langs)
      for (std::size_t k = 0; k < rows[lang].size(); ++k) merged.lines[rows[lang][k]] = tok[lang].lines[k];
    return merged;
  };
  const auto src_train = merge_side(mixed.train.size(), train_rows, train_tok);
  const auto src_valid = merge_side(mixed.valid.size(), valid_rows, valid_tok);
  stage("encode", [&] {
    for (const auto& lang : langs) bpe::write_token_stream(log.add("tok/" + lang + ".train.tok"), train_tok[lang], overwrite);
    bpe::write_token_stream(log.add("tok/train.src.tok"), src_train, overwrite);
    bpe::write_token_stream(log.add("tok/valid.src.tok"), src_valid, overwrite);
    bpe::write_token_stream(log.add("tok/train.trg.tok"), trg_train, overwrite);
    bpe::write_token_stream(log.add("tok/valid.trg.tok"), trg_valid, overwrite);
  });

  std::map<std::string, vocab::Vocabulary> lang_vocab;
  stage("vocab", [&] {
    for (const auto& lang : langs) {
      lang_vocab[lang] = vocab::extract(train_tok[lang], m.workers);
      vocab::write(lang_vocab[lang], log.add("vocab/" + lang + ".vocab"), vocab::Format::kCanonical, overwrite);
      result.language_vocab_sizes[lang] = lang_vocab[lang].size();
    }
    vocab::Vocabulary src, trg;
    if (m.reuse_vocab_from) {
      src = vocab::read(*m.reuse_vocab_from / "vocab/src.vocab");
      trg = vocab::read(*m.reuse_vocab_from / "vocab/trg.vocab");
    } else {
      src = vocab::extract(src_train, m.workers);
      trg = vocab::extract(trg_train, m.workers);
    }
    vocab::write(src, log.add("vocab/src.vocab"), vocab::Format::kCanonical, overwrite);
    vocab::write(trg, log.add("vocab/trg.vocab"), vocab::Format::kCanonical, overwrite);
    vocab::write(src, log.add("vocab/src.yml"), vocab::Format::kCompat, overwrite);
    vocab::write(trg, log.add("vocab/trg.yml"), vocab::Format::kCompat, overwrite);
    result.src_vocab_size = src.size();
    result.trg_vocab_size = trg.size();
  });

  stage("overlap", [&] {
    for (const auto& aux : m.auxiliary) {
      const std::vector<bpe::TokenizedCorpus> pair{train_tok[m.source], train_tok[aux]};
      const auto joint = vocab::extract(pair, m.workers);
      const auto report = overlap::compute(lang_vocab[m.source], lang_vocab[aux], &joint);
      json j = overlap::to_json(report);
      j["language_a"] = m.source;
      j["language_b"] = aux;
      j["disjoint"] = m.disjoint;
      io::write_file(log.add("reports/overlap_" + aux + ".json"), to_text(j), overwrite);
    }
    if (m.auxiliary.size() == 2) {
      const auto triple =
          overlap::compute_triple(lang_vocab[m.source], lang_vocab[m.auxiliary[0]], lang_vocab[m.auxiliary[1]]);
      json j = overlap::to_json(triple);
      j["base"] = m.source;
      j["aux1"] = m.auxiliary[0];
      j["aux2"] = m.auxiliary[1];
      io::write_file(log.add("reports/overlap_triple.json"), to_text(j), overwrite);
    }
  });

  stage("write", [&] {
    result.artifacts = log.checksums();
    json j;
    j["format_version"] = kManifestFormatVersion;
    j["manifest"] = manifest_to_json(m, m.output);
    j["mode"] = m.auxiliary.empty() ? "baseline" : (m.disjoint ? "disjoint" : "joint");
    json sizes = json::object();
    for (const auto& [lang, n] : result.language_vocab_sizes) sizes[lang] = n;
    j["vocab_sizes"] = {{"languages", sizes}, {"src", result.src_vocab_size}, {"trg", result.trg_vocab_size}};
    json arts = json::array();
    for (const auto& a : result.artifacts) arts.push_back({{"path", a.path}, {"sha256", a.sha256}});
    j["artifacts"] = arts;
    io::write_file(m.output / "manifest.resolved.json", to_text(j), overwrite);
  });
  return result;
}

CompSizeResult comp_size_experiment(const ExperimentManifest& manifest, bool overwrite) {
  StageRunner stage;
  stage("manifest", [&] {
    if (manifest.auxiliary.size() != 1)
      throw Error(ErrorKind::kConfig, "comp-size runs need exactly one auxiliary language, got " +
                                          std::to_string(manifest.auxiliary.size()));
    manifest.validate();
  });
  CompSizeResult r;
  r.auxiliary = manifest.auxiliary.front();

  ExperimentManifest joint = manifest;
  joint.disjoint = false;
  joint.output = manifest.output / "joint";
  r.joint = run_experiment(joint, overwrite);
  r.joint_size = r.joint.src_vocab_size;
  r.base_size = r.joint.language_vocab_sizes.at(manifest.source);
  r.target = stage("comp-size", [&] { return overlap::complementary_size(r.joint_size, r.base_size); });

  ExperimentManifest disjoint = manifest;
  disjoint.disjoint = true;
  disjoint.reuse_vocab_from.reset();
  disjoint.vocab_size[r.auxiliary] = r.target;
  disjoint.output = manifest.output / "disjoint";
  r.disjoint = run_experiment(disjoint, overwrite);
  r.extracted = r.disjoint.language_vocab_sizes.at(r.auxiliary);

  stage("comp-size", [&] {
    json j;
    j["source"] = manifest.source;
    j["auxiliary"] = r.auxiliary;
    j["joint_size"] = r.joint_size;
    j["base_size"] = r.base_size;
    j["target"] = r.target;
    j["extracted_aux_size"] = r.extracted;
    j["within_target"] = r.extracted <= r.target;
    io::write_file(manifest.output / "comp_size.json", to_text(j), overwrite);
    if (r.extracted > r.target)
      throw Error(ErrorKind::kConsistency, "extracted " + r.auxiliary + " vocabulary (" + std::to_string(r.extracted) +
                                               ") exceeds the retraining target (" + std::to_string(r.target) + ")");
  });
  return r;
}

int stage_exit_code(std::string_view stage) {
  for (std::size_t i = 0; i < std::size(kStages); ++i)
    if (kStages[i] == stage) return 20 + static_cast<int>(i);
  return 1;
}

}  // namespace vocablab::pipeline
