#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vocablab::bpe {

// U+2581, marks the start of every whitespace-separated word.
inline constexpr std::string_view kWhitespaceMarker = "\xE2\x96\x81";
inline constexpr std::string_view kUnknownPiece = "<unk>";
inline constexpr std::string_view kSentenceStartPiece = "<s>";
inline constexpr std::string_view kSentenceEndPiece = "</s>";
inline constexpr std::size_t kMaxWordChars = 4096;
inline constexpr std::size_t kMaxPieceChars = 16;
inline constexpr int kModelFormatVersion = 1;

enum class Normalization { kNone, kNfkc };

std::string_view to_string(Normalization n);
Normalization parse_normalization(std::string_view s);
std::string normalize(std::string_view line, Normalization n);

// "<0xNN>", uppercase hex.
std::string byte_piece(std::uint8_t value);
std::optional<std::uint8_t> parse_byte_piece(std::string_view piece);

struct Merge {
  std::string left;
  std::string right;
  // Pair count when the merge was selected. Only known for freshly trained
  // models; the model file does not carry it.
  std::uint64_t frequency = 0;
};

enum class PieceKind { kSpecial, kByte, kCharacter, kMerged };

struct TrainOptions {
  std::size_t vocab_size = 32000;
  bool byte_fallback = true;
  Normalization normalization = Normalization::kNone;
  std::size_t workers = 1;
};

class Model {
 public:
  Model() = default;

  const std::vector<Merge>& merges() const { return merges_; }
  const std::vector<std::string>& pieces() const { return pieces_; }
  PieceKind kind(std::size_t id) const { return kinds_[id]; }
  std::optional<std::size_t> piece_id(std::string_view piece) const;
  bool contains(std::string_view piece) const { return piece_id(piece).has_value(); }

  std::size_t target_vocab_size() const { return target_vocab_size_; }
  bool byte_fallback() const { return byte_fallback_; }
  Normalization normalization() const { return normalization_; }

  std::vector<std::string> encode(std::string_view line) const;
  std::string decode(std::span<const std::string> tokens) const;

  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path, bool overwrite) const;
  static Model load(std::istream& in);
  static Model load(const std::filesystem::path& path);

 private:
  friend Model train(std::span<const std::string> corpus, const TrainOptions& options);
  friend class ModelBuilder;

  struct MergeRule {
    std::uint32_t rank;
    std::uint32_t result;
  };

  void index();
  std::int64_t symbol_of(std::string_view ch) const;

  std::vector<std::string> pieces_;
  std::vector<PieceKind> kinds_;
  std::vector<Merge> merges_;
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::unordered_map<std::uint64_t, MergeRule> rules_;
  std::size_t target_vocab_size_ = 0;
  bool byte_fallback_ = true;
  Normalization normalization_ = Normalization::kNone;
};

// Whether a merge may produce `piece`: at most kMaxPieceChars characters,
// the marker only in front, and no mix of Unicode scripts (Hiragana and
// Katakana count as Han; combining marks take the preceding script).
bool is_valid_piece(std::string_view piece);

// Greedy BPE: repeatedly merges the most frequent adjacent pair whose result
// is a valid piece (ties: the lexicographically smallest concatenation, then
// the smallest left side).
Model train(std::span<const std::string> corpus, const TrainOptions& options);

// Preprocessed words of a line: one leading marker, spaces mapped to the
// marker, a new word at every marker, long words chunked. Exposed for
// tests and oracles.
std::vector<std::string> split_words(std::string_view line);

struct TokenizedCorpus {
  std::string language;
  std::vector<std::vector<std::string>> lines;

  std::size_t token_count() const;
  bool operator==(const TokenizedCorpus&) const = default;
};

TokenizedCorpus encode_corpus(const Model& model, std::span<const std::string> lines,
                              std::string language, std::size_t workers = 1);
std::vector<std::string> decode_corpus(const Model& model, const TokenizedCorpus& corpus);

// Token streams: pieces separated by single spaces, one sentence per line.
std::string format_tokens(std::span<const std::string> tokens);
std::vector<std::string> parse_tokens(std::string_view line);
TokenizedCorpus read_token_stream(const std::filesystem::path& path, std::string language);
void write_token_stream(const std::filesystem::path& path, const TokenizedCorpus& corpus,
                        bool overwrite);

}  // namespace vocablab::bpe
