#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vocablab/io.hpp"

namespace vocablab::testing {

inline std::filesystem::path data_dir() { return VOCABLAB_TEST_DATA; }

inline nlohmann::json load_json(const std::filesystem::path& p) {
  return nlohmann::json::parse(io::read_file(p));
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "vocablab") {
    std::random_device rd;
    for (int attempt = 0; attempt < 100; ++attempt) {
      path_ = std::filesystem::temp_directory_path() / (tag + "-" + std::to_string(rd()));
      if (std::filesystem::create_directories(path_)) return;
    }
    throw std::runtime_error("cannot create temp dir");
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline void write_lines(const std::filesystem::path& p, const std::vector<std::string>& lines) {
  std::filesystem::create_directories(p.parent_path());
  io::write_lines(p, lines, true);
}

// Every regular file under `root` with its contents, keyed by relative path.
inline std::vector<std::pair<std::string, std::string>> snapshot(const std::filesystem::path& root) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root))
    if (e.is_regular_file())
      out.emplace_back(e.path().lexically_relative(root).generic_string(), io::read_file(e.path()));
  std::sort(out.begin(), out.end());
  return out;
}

// Random sentences over a small lexicon; lowercase ASCII plus a few
// language-specific letters so tokenizers have something to merge.
inline std::vector<std::string> random_corpus(std::mt19937_64& rng, std::size_t lines, const std::string& letters,
                                              std::size_t lexicon_size = 40) {
  std::vector<std::string> letters_u8;
  for (std::size_t i = 0; i < letters.size();) {
    std::size_t len = 1;
    const auto c = static_cast<unsigned char>(letters[i]);
    if (c >= 0xF0) len = 4;
    else if (c >= 0xE0) len = 3;
    else if (c >= 0xC0) len = 2;
    letters_u8.push_back(letters.substr(i, len));
    i += len;
  }
  std::vector<std::string> lexicon;
  for (std::size_t w = 0; w < lexicon_size; ++w) {
    std::string word;
    const std::size_t n = 1 + rng() % 7;
    for (std::size_t k = 0; k < n; ++k) word += letters_u8[rng() % letters_u8.size()];
    lexicon.push_back(word);
  }
  std::vector<std::string> out;
  for (std::size_t l = 0; l < lines; ++l) {
    std::string line;
    const std::size_t n = 1 + rng() % 10;
    for (std::size_t k = 0; k < n; ++k) {
      if (k) line += ' ';
      line += lexicon[rng() % lexicon.size()];
    }
    if (rng() % 3 == 0) line += ".";
    out.push_back(line);
  }
  return out;
}

// Stress line for tokenizer round trips: emoji, combining marks, literal
// markers, piece-name lookalikes, tabs, runs of spaces and invalid bytes.
inline std::string fuzz_line(std::mt19937_64& rng) {
  static const std::vector<std::string> alphabet{
      "a", "b", "e", "n", "r", "s", "t", " ", " ", "  ", "ä", "ö", "å", "ß", "é",
      "e\xCC\x81",          // e + combining acute
      "\xF0\x9F\x98\x80",   // emoji
      "\xF0\x9F\x91\x8D\xF0\x9F\x8F\xBD",  // emoji with skin tone modifier
      "\xE2\x96\x81",       // a literal whitespace marker
      "<0x41>", "<unk>", "</s>", "\t", ".", ",", "\xE2\x82\xAC", "\xE4\xB8\xAD",
      "\xFF", "\xC3", "\x80",  // invalid UTF-8 bytes
  };
  std::string line;
  const std::size_t n = rng() % 30;
  for (std::size_t i = 0; i < n; ++i) line += alphabet[rng() % alphabet.size()];
  return line;
}

}  // namespace vocablab::testing
