#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vocablab/bpe.hpp"

namespace vocablab::vocab {

inline constexpr std::string_view kEndOfSentence = "</s>";
inline constexpr std::string_view kUnknown = "<unk>";
inline constexpr std::size_t kSpecialCount = 2;

struct Entry {
  std::string token;
  std::uint64_t count = 0;

  bool operator==(const Entry&) const = default;
};

// Frequency-ordered token list; an entry's id is its position. Ids 0 and 1
// are always </s> and <unk>.
class Vocabulary {
 public:
  Vocabulary();
  // Validates uniqueness and the special-token layout.
  explicit Vocabulary(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::optional<std::size_t> id_of(std::string_view token) const;
  bool contains(std::string_view token) const { return id_of(token).has_value(); }
  static bool is_special(std::string_view token) { return token == kEndOfSentence || token == kUnknown; }

  bool operator==(const Vocabulary& other) const { return entries_ == other.entries_; }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Shardable token counter. Each token remembers its earliest position so
// ties in count resolve by first occurrence no matter how the input was
// split.
class Counter {
 public:
  struct Position {
    std::uint32_t corpus = 0;
    std::uint64_t line = 0;
    std::uint32_t token = 0;
    auto operator<=>(const Position&) const = default;
  };

  void add(const bpe::TokenizedCorpus& corpus, std::uint32_t corpus_index, std::size_t line_begin,
           std::size_t line_end);
  void merge(const Counter& other);
  Vocabulary finalize() const;

 private:
  struct Stat {
    std::uint64_t count = 0;
    Position first;
  };
  std::unordered_map<std::string, Stat> stats_;
};

// Counts summed over all corpora, i.e. the vocabulary of their
// concatenation. Throws kInput when every corpus is empty.
Vocabulary extract(std::span<const bpe::TokenizedCorpus> corpora, std::size_t workers = 1);
Vocabulary extract(const bpe::TokenizedCorpus& corpus, std::size_t workers = 1);

enum class Format {
  kCanonical,  // token<TAB>id<TAB>count
  kCompat,     // "token": id   (marian-vocab YAML shape)
};

std::string serialize(const Vocabulary& v, Format format);
void write(const Vocabulary& v, const std::filesystem::path& path, Format format, bool overwrite);

Vocabulary parse_canonical(std::string_view text);
// Counts are not stored in the compat format and come back as 0.
Vocabulary parse_compat(std::string_view text);
// .yml / .yaml files are read as compat, everything else as canonical.
Vocabulary read(const std::filesystem::path& path);

std::string quote_yaml(std::string_view token);
std::string unquote_yaml(std::string_view quoted);

}  // namespace vocablab::vocab
