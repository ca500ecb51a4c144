#include "vocablab/vocab.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include "vocablab/error.hpp"
#include "vocablab/io.hpp"
#include "vocablab/parallel.hpp"

namespace vocablab::vocab {

namespace {

std::vector<Entry> specials_only() { return {{std::string(kEndOfSentence), 0}, {std::string(kUnknown), 0}}; }

std::uint64_t parse_uint(std::string_view s, std::size_t line, std::string_view what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw Error(ErrorKind::kParse, "vocab line " + std::to_string(line) + ": bad " + std::string(what) + " '" +
                                       std::string(s) + "'");
  return v;
}

Vocabulary build_checked(std::vector<Entry> entries) {
  try {
    return Vocabulary(std::move(entries));
  } catch (const Error& e) {
    throw Error(ErrorKind::kParse, e.what());
  }
}

}  // namespace

Vocabulary::Vocabulary() : Vocabulary(specials_only()) {}

Vocabulary::Vocabulary(std::vector<Entry> entries) : entries_(std::move(entries)) {
  if (entries_.size() < kSpecialCount || entries_[0].token != kEndOfSentence || entries_[1].token != kUnknown)
    throw Error(ErrorKind::kConsistency, "vocabulary must start with </s> (id 0) and <unk> (id 1)");
  index_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].token.empty()) throw Error(ErrorKind::kConsistency, "empty token at id " + std::to_string(i));
    if (!index_.emplace(entries_[i].token, i).second)
      throw Error(ErrorKind::kConsistency,
                  "duplicate token '" + entries_[i].token + "' at id " + std::to_string(i));
  }
}

std::optional<std::size_t> Vocabulary::id_of(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void Counter::add(const bpe::TokenizedCorpus& corpus, std::uint32_t corpus_index, std::size_t line_begin,
                  std::size_t line_end) {
  for (std::size_t l = line_begin; l < line_end; ++l) {
    const auto& line = corpus.lines[l];
    for (std::size_t t = 0; t < line.size(); ++t) {
      auto [it, inserted] = stats_.try_emplace(line[t]);
      const Position pos{corpus_index, l, static_cast<std::uint32_t>(t)};
      if (inserted || pos < it->second.first) it->second.first = pos;
      ++it->second.count;
    }
  }
}

void Counter::merge(const Counter& other) {
  for (const auto& [tok, st] : other.stats_) {
    auto [it, inserted] = stats_.try_emplace(tok, st);
    if (inserted) continue;
    it->second.count += st.count;
    it->second.first = std::min(it->second.first, st.first);
  }
}

Vocabulary Counter::finalize() const {
  std::vector<Entry> entries = specials_only();
  struct Ranked {
    const std::string* token;
    const Stat* stat;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(stats_.size());
  for (const auto& [tok, st] : stats_) {
    if (tok == kEndOfSentence)
      entries[0].count = st.count;
    else if (tok == kUnknown)
      entries[1].count = st.count;
    else
      ranked.push_back({&tok, &st});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.stat->count != b.stat->count) return a.stat->count > b.stat->count;
    return a.stat->first < b.stat->first;
  });
  entries.reserve(entries.size() + ranked.size());
  for (const auto& r : ranked) entries.push_back({*r.token, r.stat->count});
  return Vocabulary(std::move(entries));
}

Vocabulary extract(std::span<const bpe::TokenizedCorpus> corpora, std::size_t workers) {
  bool any = false;
  for (const auto& c : corpora) any |= c.token_count() > 0;
  if (!any) throw Error(ErrorKind::kInput, "extract_vocab: no tokens in input");

  Counter total;
  for (std::uint32_t ci = 0; ci < corpora.size(); ++ci) {
    const auto& corpus = corpora[ci];
    std::vector<Counter> shards(shard_count(corpus.lines.size(), workers));
    for_each_shard(corpus.lines.size(), workers, [&](std::size_t s, std::size_t begin, std::size_t end) {
      shards[s].add(corpus, ci, begin, end);
    });
    for (const auto& s : shards) total.merge(s);
  }
  return total.finalize();
}

Vocabulary extract(const bpe::TokenizedCorpus& corpus, std::size_t workers) {
  return extract(std::span<const bpe::TokenizedCorpus>(&corpus, 1), workers);
}

std::string quote_yaml(std::string_view token) {
  std::string out = "\"";
  for (char c : token) {
    const auto u = static_cast<unsigned char>(c);
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default:
        if (u < 0x20 || u == 0x7F) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\x%02X", u);
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
  return out;
}

std::string unquote_yaml(std::string_view quoted) {
  if (quoted.size() < 2 || quoted.front() != '"' || quoted.back() != '"')
    throw Error(ErrorKind::kParse, "expected a double-quoted token");
  std::string out;
  const std::string_view body = quoted.substr(1, quoted.size() - 2);
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c == '"') throw Error(ErrorKind::kParse, "unescaped quote inside token");
    if (c != '\\') {
      out.push_back(c);
      continue;
    }
    if (++i == body.size()) throw Error(ErrorKind::kParse, "dangling backslash");
    switch (body[i]) {
      case '"': out.push_back('"'); break;
      case '\\': out.push_back('\\'); break;
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      case 'x': {
        if (i + 2 >= body.size()) throw Error(ErrorKind::kParse, "short \\x escape");
        unsigned v = 0;
        auto hex = body.substr(i + 1, 2);
        auto [p, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), v, 16);
        if (ec != std::errc{} || p != hex.data() + 2) throw Error(ErrorKind::kParse, "bad \\x escape");
        out.push_back(static_cast<char>(v));
        i += 2;
        break;
      }
      default: throw Error(ErrorKind::kParse, std::string("unknown escape \\") + body[i]);
    }
  }
  return out;
}

std::string serialize(const Vocabulary& v, Format format) {
  std::string out;
  const auto& entries = v.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (format == Format::kCanonical) {
      out += io::escape_field(entries[i].token);
      out += '\t';
      out += std::to_string(i);
      out += '\t';
      out += std::to_string(entries[i].count);
    } else {
      out += quote_yaml(entries[i].token);
      out += ": ";
      out += std::to_string(i);
    }
    out += '\n';
  }
  return out;
}

void write(const Vocabulary& v, const std::filesystem::path& path, Format format, bool overwrite) {
  io::write_file(path, serialize(v, format), overwrite);
}

Vocabulary parse_canonical(std::string_view text) {
  std::vector<Entry> entries;
  std::unordered_map<std::string, std::size_t> seen;
  const auto lines = io::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    auto fields = io::split(lines[i], '\t');
    if (fields.size() != 3)
      throw Error(ErrorKind::kParse, "vocab line " + std::to_string(line_no) + ": expected token<TAB>id<TAB>count");
    std::string token;
    try {
      token = io::unescape_field(fields[0]);
    } catch (const Error& e) {
      throw Error(ErrorKind::kParse, "vocab line " + std::to_string(line_no) + ": " + e.what());
    }
    const auto id = parse_uint(fields[1], line_no, "id");
    const auto count = parse_uint(fields[2], line_no, "count");
    if (id != entries.size())
      throw Error(ErrorKind::kParse, "vocab line " + std::to_string(line_no) + ": id " + std::to_string(id) +
                                         " breaks the contiguous sequence (expected " +
                                         std::to_string(entries.size()) + ")");
    if (auto [it, inserted] = seen.emplace(token, line_no); !inserted)
      throw Error(ErrorKind::kParse, "vocab line " + std::to_string(line_no) + ": duplicate token '" + token +
                                         "' (first on line " + std::to_string(it->second) + ")");
    entries.push_back({std::move(token), count});
  }
  return build_checked(std::move(entries));
}

Vocabulary parse_compat(std::string_view text) {
  std::vector<Entry> entries;
  std::unordered_map<std::string, std::size_t> seen;
  const auto lines = io::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string_view line = lines[i];
    const std::size_t sep = line.rfind("\": ");
    if (sep == std::string_view::npos)
      throw Error(ErrorKind::kParse, "vocab line " + std::to_string(line_no) + ": expected \"token\": id");
    std::string token;
    try {
      token = unquote_yaml(line.substr(0, sep + 1));
    } catch (const Error& e) {
      throw Error(ErrorKind::kParse, "vocab line " + std::to_string(line_no) + ": " + e.what());
    }
    const auto id = parse_uint(line.substr(sep + 3), line_no, "id");
    if (id != entries.size())
      throw Error(ErrorKind::kParse, "vocab line " + std::to_string(line_no) + ": non-contiguous id");
    if (!seen.emplace(token, line_no).second)
      throw Error(ErrorKind::kParse, "vocab line " + std::to_string(line_no) + ": duplicate token '" + token + "'");
    entries.push_back({std::move(token), 0});
  }
  return build_checked(std::move(entries));
}

Vocabulary read(const std::filesystem::path& path) {
  try {
    const auto ext = path.extension().string();
    const auto text = io::read_file(path);
    return ext == ".yml" || ext == ".yaml" ? parse_compat(text) : parse_canonical(text);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kParse) throw Error(ErrorKind::kParse, path.string() + ": " + e.what());
    throw;
  }
}

}  // namespace vocablab::vocab
