#include "vocablab/bpe.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uscript.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "vocablab/error.hpp"
#include "vocablab/io.hpp"
#include "vocablab/parallel.hpp"
#include "vocablab/utf8.hpp"

namespace vocablab::bpe {

namespace {

constexpr std::string_view kModelMagic = "vocablab-bpe";
constexpr std::string_view kUnknownRendering = "\xE2\x81\x87";  // U+2047

constexpr std::uint64_t pair_key(std::uint32_t left, std::uint32_t right) {
  return (static_cast<std::uint64_t>(left) << 32) | right;
}
constexpr std::uint32_t key_left(std::uint64_t key) { return static_cast<std::uint32_t>(key >> 32); }
constexpr std::uint32_t key_right(std::uint64_t key) { return static_cast<std::uint32_t>(key); }

enum class UnitClass { kMarker, kCharacter, kBarrier };

// A literal U+2581 in the input can not be told apart from a mapped space
// once rendered, so it never joins a piece and always falls back to bytes.
UnitClass classify(const utf8::Unit& u) {
  if (u.bytes == " ") return UnitClass::kMarker;
  if (!u.valid || u.bytes == kWhitespaceMarker) return UnitClass::kBarrier;
  return UnitClass::kCharacter;
}

// Calls f(slice) for every word chunk of `padded` (the line with one
// leading space). A word starts at each space; chunks hold at most
// kMaxWordChars units.
template <typename F>
void for_each_word(std::string_view padded, F&& f) {
  std::size_t word_start = 0;
  std::size_t chunk_start = 0;
  std::size_t units = 0;
  std::size_t pos = 0;
  while (pos < padded.size()) {
    if (padded[pos] == ' ' && pos > word_start) {
      f(padded.substr(chunk_start, pos - chunk_start));
      word_start = chunk_start = pos;
      units = 0;
    }
    if (units == kMaxWordChars) {
      f(padded.substr(chunk_start, pos - chunk_start));
      chunk_start = pos;
      units = 0;
    }
    pos += utf8::next_unit(padded, pos).bytes.size();
    ++units;
  }
  if (pos > chunk_start) f(padded.substr(chunk_start, pos - chunk_start));
}

std::unordered_set<std::string> reserved_pieces(bool byte_fallback) {
  std::unordered_set<std::string> reserved{std::string(kUnknownPiece), std::string(kSentenceStartPiece),
                                           std::string(kSentenceEndPiece)};
  if (byte_fallback)
    for (int b = 0; b < 256; ++b) reserved.insert(byte_piece(static_cast<std::uint8_t>(b)));
  return reserved;
}

std::string render(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 2);
  for (char c : text) {
    if (c == ' ')
      out += kWhitespaceMarker;
    else
      out.push_back(c);
  }
  return out;
}

struct TrainWord {
  std::vector<std::int64_t> symbols;  // -1 = barrier
  std::uint64_t freq = 0;
};

// Incremental greedy merge selection over a word-type table.
class MergeTrainer {
 public:
  MergeTrainer(std::vector<std::string> symbols, std::vector<TrainWord> words,
               std::unordered_set<std::string> reserved)
      : symbols_(std::move(symbols)),
        words_(std::move(words)),
        reserved_(std::move(reserved)),
        candidates_(CandidateLess{&symbols_}) {
    for (const auto& s : symbols_) symbol_ids_.emplace(s, symbol_ids_.size());
    for (std::uint32_t w = 0; w < words_.size(); ++w) {
      const auto& syms = words_[w].symbols;
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        if (syms[i] < 0 || syms[i + 1] < 0) continue;
        const auto key = pair_key(static_cast<std::uint32_t>(syms[i]), static_cast<std::uint32_t>(syms[i + 1]));
        counts_[key] += words_[w].freq;
        auto& occ = occurrences_[key];
        if (occ.empty() || occ.back() != w) occ.push_back(w);
      }
    }
    for (const auto& [key, count] : counts_)
      if (eligible(key, count)) candidates_.insert({count, key});
    visited_.assign(words_.size(), 0);
  }

  // Applies the best merge; returns false when no pair occurs twice.
  bool step(Merge& merge, std::string& result) {
    if (candidates_.empty()) return false;
    const Candidate best = *candidates_.begin();
    const std::uint32_t a = key_left(best.key);
    const std::uint32_t b = key_right(best.key);
    result = symbols_[a] + symbols_[b];
    merge = Merge{symbols_[a], symbols_[b], best.count};

    std::uint32_t c = 0;
    if (auto it = symbol_ids_.find(result); it != symbol_ids_.end()) {
      c = it->second;
    } else {
      c = static_cast<std::uint32_t>(symbols_.size());
      symbols_.push_back(result);
      symbol_ids_.emplace(result, c);
    }

    ++stamp_;
    std::vector<std::uint32_t> occ = std::move(occurrences_[best.key]);
    occurrences_.erase(best.key);
    std::unordered_map<std::uint64_t, std::int64_t> delta;
    std::vector<std::int64_t> rewritten;
    for (std::uint32_t w : occ) {
      if (visited_[w] == stamp_) continue;
      visited_[w] = stamp_;
      auto& word = words_[w];
      auto& syms = word.symbols;
      bool found = false;
      for (std::size_t i = 0; i + 1 < syms.size() && !found; ++i) found = syms[i] == a && syms[i + 1] == b;
      if (!found) continue;

      const auto freq = static_cast<std::int64_t>(word.freq);
      for_each_pair(syms, [&](std::uint64_t k) { delta[k] -= freq; });
      rewritten.clear();
      for (std::size_t i = 0; i < syms.size(); ++i) {
        if (i + 1 < syms.size() && syms[i] == a && syms[i + 1] == b) {
          rewritten.push_back(c);
          ++i;
        } else {
          rewritten.push_back(syms[i]);
        }
      }
      syms.swap(rewritten);
      for_each_pair(syms, [&](std::uint64_t k) {
        delta[k] += freq;
        if (key_left(k) == c || key_right(k) == c) {
          auto& list = occurrences_[k];
          if (list.empty() || list.back() != w) list.push_back(w);
        }
      });
    }

    for (const auto& [key, d] : delta) {
      if (d == 0) continue;
      auto it = counts_.find(key);
      const std::uint64_t old = it == counts_.end() ? 0 : it->second;
      if (eligible(key, old)) candidates_.erase({old, key});
      const std::uint64_t now = static_cast<std::uint64_t>(static_cast<std::int64_t>(old) + d);
      if (now == 0) {
        if (it != counts_.end()) counts_.erase(it);
      } else {
        counts_[key] = now;
        if (eligible(key, now)) candidates_.insert({now, key});
      }
    }
    return true;
  }

 private:
  struct Candidate {
    std::uint64_t count;
    std::uint64_t key;
  };

  struct CandidateLess {
    const std::vector<std::string>* symbols;

    bool operator()(const Candidate& x, const Candidate& y) const {
      if (x.count != y.count) return x.count > y.count;
      if (x.key == y.key) return false;
      const auto& xl = (*symbols)[key_left(x.key)];
      const auto& xr = (*symbols)[key_right(x.key)];
      const auto& yl = (*symbols)[key_left(y.key)];
      const auto& yr = (*symbols)[key_right(y.key)];
      if (int c = compare_concat(xl, xr, yl, yr); c != 0) return c < 0;
      if (int c = xl.compare(yl); c != 0) return c < 0;
      return x.key < y.key;
    }

    // Byte-wise comparison of xl+xr against yl+yr without allocating.
    static int compare_concat(const std::string& xl, const std::string& xr, const std::string& yl,
                              const std::string& yr) {
      const std::size_t xn = xl.size() + xr.size();
      const std::size_t yn = yl.size() + yr.size();
      const std::size_t n = std::min(xn, yn);
      for (std::size_t i = 0; i < n; ++i) {
        const auto xc = static_cast<unsigned char>(i < xl.size() ? xl[i] : xr[i - xl.size()]);
        const auto yc = static_cast<unsigned char>(i < yl.size() ? yl[i] : yr[i - yl.size()]);
        if (xc != yc) return xc < yc ? -1 : 1;
      }
      return xn == yn ? 0 : (xn < yn ? -1 : 1);
    }
  };

  template <typename F>
  static void for_each_pair(const std::vector<std::int64_t>& syms, F&& f) {
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      if (syms[i] < 0 || syms[i + 1] < 0) continue;
      f(pair_key(static_cast<std::uint32_t>(syms[i]), static_cast<std::uint32_t>(syms[i + 1])));
    }
  }

  bool eligible(std::uint64_t key, std::uint64_t count) {
    if (count < 2) return false;
    auto [it, fresh] = shape_ok_.try_emplace(key, false);
    if (fresh) it->second = is_valid_piece(symbols_[key_left(key)] + symbols_[key_right(key)]);
    if (!it->second) return false;
    const auto& l = symbols_[key_left(key)];
    const auto& r = symbols_[key_right(key)];
    // Reserved pieces are all of the form "<...>" and at most 6 bytes long.
    if (l.empty() || l.front() != '<' || l.size() + r.size() > 6) return true;
    return !reserved_.contains(l + r);
  }

  std::vector<std::string> symbols_;
  std::unordered_map<std::string, std::uint32_t> symbol_ids_;
  std::vector<TrainWord> words_;
  std::unordered_set<std::string> reserved_;
  std::unordered_map<std::uint64_t, std::uint64_t> counts_;
  std::unordered_map<std::uint64_t, bool> shape_ok_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> occurrences_;
  std::set<Candidate, CandidateLess> candidates_;
  std::vector<std::uint32_t> visited_;
  std::uint32_t stamp_ = 0;
};

std::string_view kind_name(PieceKind k) {
  switch (k) {
    case PieceKind::kSpecial: return "special";
    case PieceKind::kByte: return "byte";
    case PieceKind::kCharacter: return "char";
    case PieceKind::kMerged: return "merged";
  }
  return "?";
}

PieceKind parse_kind(std::string_view s, std::size_t line) {
  if (s == "special") return PieceKind::kSpecial;
  if (s == "byte") return PieceKind::kByte;
  if (s == "char") return PieceKind::kCharacter;
  if (s == "merged") return PieceKind::kMerged;
  throw Error(ErrorKind::kParse, "model line " + std::to_string(line) + ": unknown piece kind '" + std::string(s) + "'");
}

}  // namespace

std::string_view to_string(Normalization n) { return n == Normalization::kNfkc ? "nfkc" : "none"; }

Normalization parse_normalization(std::string_view s) {
  if (s == "none") return Normalization::kNone;
  if (s == "nfkc") return Normalization::kNfkc;
  throw Error(ErrorKind::kConfig, "unknown normalization '" + std::string(s) + "'");
}

std::string normalize(std::string_view line, Normalization n) {
  if (n == Normalization::kNone) return std::string(line);
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkc = icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorKind::kConfig, "NFKC normalizer unavailable");
  icu::UnicodeString in = icu::UnicodeString::fromUTF8(icu::StringPiece(line.data(), static_cast<int32_t>(line.size())));
  icu::UnicodeString out = nfkc->normalize(in, status);
  if (U_FAILURE(status)) throw Error(ErrorKind::kInput, "normalization failed");
  std::string result;
  out.toUTF8String(result);
  return result;
}

std::string byte_piece(std::uint8_t value) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  return std::string{'<', '0', 'x', kHex[value >> 4], kHex[value & 0xF], '>'};
}

std::optional<std::uint8_t> parse_byte_piece(std::string_view piece) {
  if (piece.size() != 6 || piece.substr(0, 3) != "<0x" || piece[5] != '>') return std::nullopt;
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  const int hi = hex(piece[3]);
  const int lo = hex(piece[4]);
  if (hi < 0 || lo < 0) return std::nullopt;
  return static_cast<std::uint8_t>(hi * 16 + lo);
}

std::vector<std::string> split_words(std::string_view line) {
  std::vector<std::string> words;
  if (line.empty()) return words;
  const std::string padded = " " + std::string(line);
  for_each_word(padded, [&](std::string_view w) { words.push_back(render(w)); });
  return words;
}

std::optional<std::size_t> Model::piece_id(std::string_view piece) const {
  auto it = ids_.find(std::string(piece));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

void Model::index() {
  ids_.clear();
  rules_.clear();
  for (std::uint32_t i = 0; i < pieces_.size(); ++i) {
    if (!ids_.emplace(pieces_[i], i).second)
      throw Error(ErrorKind::kParse, "duplicate piece '" + pieces_[i] + "'");
  }
  for (std::uint32_t rank = 0; rank < merges_.size(); ++rank) {
    const auto& m = merges_[rank];
    auto l = ids_.find(m.left);
    auto r = ids_.find(m.right);
    auto res = ids_.find(m.left + m.right);
    if (l == ids_.end() || r == ids_.end() || res == ids_.end())
      throw Error(ErrorKind::kParse, "merge " + std::to_string(rank) + " refers to a missing piece");
    rules_.try_emplace(pair_key(l->second, r->second), MergeRule{rank, res->second});
  }
}

bool is_valid_piece(std::string_view piece) {
  constexpr int kAnyScript = -1;
  int prev = kAnyScript;
  std::size_t chars = 0;
  std::size_t pos = 0;
  while (pos < piece.size()) {
    const utf8::Unit u = utf8::next_unit(piece, pos);
    if (!u.valid) return false;
    if (u.bytes == kWhitespaceMarker) {
      if (pos > 0) return false;
    } else {
      UErrorCode status = U_ZERO_ERROR;
      int script = uscript_getScript(static_cast<UChar32>(u.code_point), &status);
      if (U_FAILURE(status)) return false;
      if (script == USCRIPT_HIRAGANA || script == USCRIPT_KATAKANA || u.code_point == 0x30FC) {
        script = USCRIPT_HAN;
      } else if (script == USCRIPT_INHERITED) {
        script = prev;
      }
      if (script != kAnyScript && prev != kAnyScript && script != prev) return false;
      prev = script;
    }
    pos += u.bytes.size();
    if (++chars > kMaxPieceChars) return false;
  }
  return true;
}

std::int64_t Model::symbol_of(std::string_view ch) const {
  auto it = ids_.find(std::string(ch));
  if (it == ids_.end() || kinds_[it->second] != PieceKind::kCharacter) return -1;
  return it->second;
}

Model train(std::span<const std::string> corpus, const TrainOptions& options) {
  if (corpus.empty()) throw Error(ErrorKind::kInput, "train_bpe: empty corpus");

  // Word-type table, counted per shard and merged; the final table is
  // sorted so it does not depend on the shard layout.
  std::vector<std::unordered_map<std::string, std::uint64_t>> shard_tables(
      shard_count(corpus.size(), options.workers));
  for_each_shard(corpus.size(), options.workers, [&](std::size_t shard, std::size_t begin, std::size_t end) {
    auto& table = shard_tables[shard];
    for (std::size_t i = begin; i < end; ++i) {
      if (corpus[i].empty()) continue;
      const std::string padded = " " + normalize(corpus[i], options.normalization);
      for_each_word(padded, [&](std::string_view w) { ++table[std::string(w)]; });
    }
  });
  std::map<std::string, std::uint64_t> table;
  for (auto& t : shard_tables)
    for (auto& [w, f] : t) table[w] += f;
  shard_tables.clear();

  std::map<std::string, std::uint64_t> char_freq;
  for (const auto& [w, f] : table) {
    utf8::for_each_unit(w, [&](const utf8::Unit& u) {
      if (classify(u) == UnitClass::kCharacter) char_freq[std::string(u.bytes)] += f;
    });
  }

  const std::size_t mandatory = 3 + (options.byte_fallback ? 256 : 0) + 1;
  if (options.vocab_size < mandatory)
    throw Error(ErrorKind::kConfig, "vocab size " + std::to_string(options.vocab_size) +
                                        " cannot hold the " + std::to_string(mandatory) + " mandatory pieces");
  if (!options.byte_fallback && options.vocab_size < mandatory + char_freq.size())
    throw Error(ErrorKind::kConfig, "vocab size " + std::to_string(options.vocab_size) + " cannot hold " +
                                        std::to_string(mandatory) + " mandatory pieces plus " +
                                        std::to_string(char_freq.size()) + " characters without byte fallback");

  std::vector<std::pair<std::string, std::uint64_t>> chars(char_freq.begin(), char_freq.end());
  std::stable_sort(chars.begin(), chars.end(),
                   [](const auto& x, const auto& y) { return x.second > y.second; });

  Model model;
  model.target_vocab_size_ = options.vocab_size;
  model.byte_fallback_ = options.byte_fallback;
  model.normalization_ = options.normalization;
  auto add_piece = [&](std::string p, PieceKind k) {
    model.pieces_.push_back(std::move(p));
    model.kinds_.push_back(k);
  };
  add_piece(std::string(kUnknownPiece), PieceKind::kSpecial);
  add_piece(std::string(kSentenceStartPiece), PieceKind::kSpecial);
  add_piece(std::string(kSentenceEndPiece), PieceKind::kSpecial);
  if (options.byte_fallback)
    for (int b = 0; b < 256; ++b) add_piece(byte_piece(static_cast<std::uint8_t>(b)), PieceKind::kByte);
  add_piece(std::string(kWhitespaceMarker), PieceKind::kCharacter);

  const std::size_t budget = options.vocab_size - mandatory;
  const bool truncated = chars.size() > budget;
  if (truncated) chars.resize(budget);
  for (const auto& [ch, f] : chars) add_piece(ch, PieceKind::kCharacter);

  if (!truncated) {
    std::vector<std::string> symbols;
    std::unordered_map<std::string, std::int64_t> symbol_ids;
    symbols.emplace_back(kWhitespaceMarker);
    for (const auto& [ch, f] : chars) symbols.push_back(ch);
    for (std::size_t i = 0; i < symbols.size(); ++i) symbol_ids.emplace(symbols[i], static_cast<std::int64_t>(i));

    std::vector<TrainWord> words;
    words.reserve(table.size());
    for (const auto& [w, f] : table) {
      TrainWord tw;
      tw.freq = f;
      utf8::for_each_unit(w, [&](const utf8::Unit& u) {
        switch (classify(u)) {
          case UnitClass::kMarker: tw.symbols.push_back(0); break;
          case UnitClass::kCharacter: tw.symbols.push_back(symbol_ids.at(std::string(u.bytes))); break;
          case UnitClass::kBarrier: tw.symbols.push_back(-1); break;
        }
      });
      words.push_back(std::move(tw));
    }
    table.clear();

    std::unordered_set<std::string> known(model.pieces_.begin(), model.pieces_.end());
    MergeTrainer trainer(std::move(symbols), std::move(words), reserved_pieces(options.byte_fallback));
    Merge merge;
    std::string result;
    while (model.pieces_.size() < options.vocab_size && trainer.step(merge, result)) {
      model.merges_.push_back(merge);
      if (known.insert(result).second) add_piece(result, PieceKind::kMerged);
    }
  }
  model.index();
  return model;
}

std::vector<std::string> Model::encode(std::string_view line) const {
  std::vector<std::string> tokens;
  if (line.empty()) return tokens;
  const std::string padded = " " + normalize(line, normalization_);

  struct Sym {
    std::int64_t id;
    std::string_view bytes;
  };
  std::vector<Sym> syms;
  for_each_word(padded, [&](std::string_view word) {
    syms.clear();
    utf8::for_each_unit(word, [&](const utf8::Unit& u) {
      switch (classify(u)) {
        case UnitClass::kMarker: syms.push_back({symbol_of(kWhitespaceMarker), u.bytes}); break;
        case UnitClass::kCharacter: syms.push_back({symbol_of(u.bytes), u.bytes}); break;
        case UnitClass::kBarrier: syms.push_back({-1, u.bytes}); break;
      }
    });

    while (syms.size() > 1) {
      std::uint32_t best_rank = std::numeric_limits<std::uint32_t>::max();
      std::uint64_t best_key = 0;
      std::uint32_t best_result = 0;
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        if (syms[i].id < 0 || syms[i + 1].id < 0) continue;
        const auto key = pair_key(static_cast<std::uint32_t>(syms[i].id), static_cast<std::uint32_t>(syms[i + 1].id));
        auto it = rules_.find(key);
        if (it != rules_.end() && it->second.rank < best_rank) {
          best_rank = it->second.rank;
          best_key = key;
          best_result = it->second.result;
        }
      }
      if (best_rank == std::numeric_limits<std::uint32_t>::max()) break;
      std::size_t out = 0;
      for (std::size_t i = 0; i < syms.size(); ++i, ++out) {
        if (i + 1 < syms.size() && syms[i].id == key_left(best_key) && syms[i + 1].id == key_right(best_key) &&
            syms[i].id >= 0 && syms[i + 1].id >= 0) {
          syms[out] = {best_result, {}};
          ++i;
        } else {
          syms[out] = syms[i];
        }
      }
      syms.resize(out);
    }

    for (const auto& s : syms) {
      if (s.id >= 0) {
        tokens.push_back(pieces_[static_cast<std::size_t>(s.id)]);
      } else if (byte_fallback_) {
        for (char c : s.bytes) tokens.push_back(byte_piece(static_cast<std::uint8_t>(c)));
      } else {
        tokens.emplace_back(kUnknownPiece);
      }
    }
  });
  return tokens;
}

std::string Model::decode(std::span<const std::string> tokens) const {
  std::string out;
  bool emitted = false;
  bool strip_leading = false;
  for (const auto& tok : tokens) {
    if (byte_fallback_) {
      if (auto b = parse_byte_piece(tok)) {
        out.push_back(static_cast<char>(*b));
        emitted = true;
        continue;
      }
    }
    auto id = piece_id(tok);
    if (!id) throw Error(ErrorKind::kDecode, "token '" + tok + "' is not in the piece inventory");
    if (kinds_[*id] == PieceKind::kSpecial) {
      if (tok == kUnknownPiece) {
        out += kUnknownRendering;
        emitted = true;
      }
      continue;
    }
    if (!emitted) strip_leading = std::string_view(tok).starts_with(kWhitespaceMarker);
    emitted = true;
    std::string_view rest = tok;
    while (!rest.empty()) {
      if (rest.starts_with(kWhitespaceMarker)) {
        out.push_back(' ');
        rest.remove_prefix(kWhitespaceMarker.size());
      } else {
        out.push_back(rest.front());
        rest.remove_prefix(1);
      }
    }
  }
  if (strip_leading && !out.empty() && out.front() == ' ') out.erase(0, 1);
  return out;
}

void Model::save(std::ostream& out) const {
  out << kModelMagic << '\t' << kModelFormatVersion << '\n';
  out << "vocab_size\t" << target_vocab_size_ << '\n';
  out << "byte_fallback\t" << (byte_fallback_ ? 1 : 0) << '\n';
  out << "normalization\t" << to_string(normalization_) << '\n';
  out << "merges\t" << merges_.size() << '\n';
  for (std::size_t r = 0; r < merges_.size(); ++r)
    out << r << '\t' << io::escape_field(merges_[r].left) << '\t' << io::escape_field(merges_[r].right) << '\n';
  out << "pieces\t" << pieces_.size() << '\n';
  for (std::size_t i = 0; i < pieces_.size(); ++i)
    out << i << '\t' << io::escape_field(pieces_[i]) << '\t' << kind_name(kinds_[i]) << '\n';
}

void Model::save(const std::filesystem::path& path, bool overwrite) const {
  std::ostringstream ss;
  save(ss);
  io::write_file(path, ss.str(), overwrite);
}

Model Model::load(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) -> Error {
    return Error(ErrorKind::kParse, "model line " + std::to_string(line_no) + ": " + why);
  };
  auto next = [&]() -> std::vector<std::string_view> {
    if (!std::getline(in, line)) throw fail("unexpected end of file");
    ++line_no;
    return io::split(line, '\t');
  };
  auto header = [&](std::string_view key) -> std::size_t {
    auto f = next();
    if (f.size() != 2 || f[0] != key) throw fail("expected '" + std::string(key) + "'");
    try {
      return std::stoull(std::string(f[1]));
    } catch (const std::exception&) {
      throw fail("bad number");
    }
  };
  auto index_of = [&](std::string_view field, std::size_t expected) {
    if (field != std::to_string(expected)) throw fail("expected index " + std::to_string(expected));
  };

  auto magic = next();
  if (magic.size() != 2 || magic[0] != kModelMagic) throw fail("not a vocablab BPE model");
  if (magic[1] != std::to_string(kModelFormatVersion)) throw fail("unsupported format version");

  Model m;
  m.target_vocab_size_ = header("vocab_size");
  m.byte_fallback_ = header("byte_fallback") != 0;
  {
    auto f = next();
    if (f.size() != 2 || f[0] != "normalization") throw fail("expected 'normalization'");
    m.normalization_ = parse_normalization(f[1]);
  }
  const std::size_t n_merges = header("merges");
  for (std::size_t r = 0; r < n_merges; ++r) {
    auto f = next();
    if (f.size() != 3) throw fail("merge lines need 3 fields");
    index_of(f[0], r);
    m.merges_.push_back({io::unescape_field(f[1]), io::unescape_field(f[2]), 0});
  }
  const std::size_t n_pieces = header("pieces");
  for (std::size_t i = 0; i < n_pieces; ++i) {
    auto f = next();
    if (f.size() != 3) throw fail("piece lines need 3 fields");
    index_of(f[0], i);
    m.pieces_.push_back(io::unescape_field(f[1]));
    m.kinds_.push_back(parse_kind(f[2], line_no));
  }
  m.index();
  for (auto special : {kUnknownPiece, kSentenceStartPiece, kSentenceEndPiece, kWhitespaceMarker})
    if (!m.contains(special)) throw Error(ErrorKind::kParse, "model lacks mandatory piece " + std::string(special));
  if (m.byte_fallback_)
    for (int b = 0; b < 256; ++b)
      if (!m.contains(byte_piece(static_cast<std::uint8_t>(b))))
        throw Error(ErrorKind::kParse, "model lacks byte piece " + byte_piece(static_cast<std::uint8_t>(b)));
  return m;
}

Model Model::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open model " + path.string());
  return load(in);
}

std::size_t TokenizedCorpus::token_count() const {
  std::size_t n = 0;
  for (const auto& l : lines) n += l.size();
  return n;
}

TokenizedCorpus encode_corpus(const Model& model, std::span<const std::string> lines, std::string language,
                              std::size_t workers) {
  TokenizedCorpus out{std::move(language), {}};
  out.lines.resize(lines.size());
  for_each_shard(lines.size(), workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out.lines[i] = model.encode(lines[i]);
  });
  return out;
}

std::vector<std::string> decode_corpus(const Model& model, const TokenizedCorpus& corpus) {
  std::vector<std::string> out;
  out.reserve(corpus.lines.size());
  for (std::size_t i = 0; i < corpus.lines.size(); ++i) {
    try {
      out.push_back(model.decode(corpus.lines[i]));
    } catch (const Error& e) {
      throw Error(e.kind(), "line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

std::string format_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::vector<std::string> parse_tokens(std::string_view line) {
  std::vector<std::string> tokens;
  if (line.empty()) return tokens;
  for (auto t : io::split(line, ' ')) {
    if (t.empty()) throw Error(ErrorKind::kParse, "empty token (stray space)");
    tokens.emplace_back(t);
  }
  return tokens;
}

TokenizedCorpus read_token_stream(const std::filesystem::path& path, std::string language) {
  TokenizedCorpus corpus{std::move(language), {}};
  const auto lines = io::read_lines(path);
  corpus.lines.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      corpus.lines.push_back(parse_tokens(lines[i]));
    } catch (const Error& e) {
      throw Error(e.kind(), path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return corpus;
}

void write_token_stream(const std::filesystem::path& path, const TokenizedCorpus& corpus, bool overwrite) {
  std::vector<std::string> lines;
  lines.reserve(corpus.lines.size());
  for (const auto& l : corpus.lines) lines.push_back(format_tokens(l));
  io::write_lines(path, lines, overwrite);
}

}  // namespace vocablab::bpe
