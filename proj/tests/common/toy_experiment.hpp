#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "vocablab/pipeline.hpp"

namespace vocablab::testing {

inline const std::map<std::string, std::string>& toy_letters() {
  static const std::map<std::string, std::string> letters{
      {"de", "abcdefghiklmnorstuwzäöüß"},
      {"sv", "abdefghijklmnoprstuvåäö"},
      {"fi", "adehijklmnoprstuvyäö"},
      {"en", "abcdefghiklmnoprstuwy"},
  };
  return letters;
}

// Writes random parallel corpora for `source` + `aux` (each aligned with an
// English target side) under `dir` and returns a manifest for them.
inline pipeline::ExperimentManifest toy_experiment(const std::filesystem::path& dir, std::uint64_t seed,
                                                   const std::string& source, const std::vector<std::string>& aux,
                                                   bool disjoint, std::size_t lines = 120) {
  std::mt19937_64 rng(seed);
  pipeline::ExperimentManifest m;
  m.name = "toy";
  m.source = source;
  m.auxiliary = aux;
  m.target = "en";
  m.disjoint = disjoint;
  m.seed = seed;
  m.output = dir / "out";
  std::vector<std::string> langs{source};
  langs.insert(langs.end(), aux.begin(), aux.end());
  for (const auto& lang : langs) {
    const auto src = dir / "data" / (lang + ".txt");
    const auto trg = dir / "data" / (lang + ".en.txt");
    write_lines(src, random_corpus(rng, lines, toy_letters().at(lang)));
    write_lines(trg, random_corpus(rng, lines, toy_letters().at("en")));
    m.corpora[lang] = {src, trg, lang == source ? "europarl" : "opensubs"};
    m.vocab_size[lang] = 340;
    m.mix.train_lines[lang] = lines - 20;
    m.mix.valid_lines[lang] = 10;
  }
  m.vocab_size["en"] = 360;
  return m;
}

}  // namespace vocablab::testing
