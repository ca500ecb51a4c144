#include "vocablab/prefix.hpp"

#include <cctype>
#include <optional>
#include <vector>

#include "vocablab/error.hpp"
#include "vocablab/parallel.hpp"
#include "vocablab/utf8.hpp"

namespace vocablab::prefix {

namespace {

struct LineError {
  std::size_t line;
  std::string token;
};

// Maps fn over every line, shard by shard, and reports the earliest failing
// line regardless of how the work was split.
template <typename F>
bpe::TokenizedCorpus transform(const bpe::TokenizedCorpus& corpus, std::size_t workers, F&& fn,
                               std::optional<LineError>& error) {
  bpe::TokenizedCorpus out{corpus.language, {}};
  out.lines.resize(corpus.lines.size());
  const std::size_t shards = shard_count(corpus.lines.size(), workers);
  std::vector<std::optional<LineError>> errors(shards);
  for_each_shard(corpus.lines.size(), workers, [&](std::size_t shard, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto& dst = out.lines[i];
      dst.reserve(corpus.lines[i].size());
      for (const auto& tok : corpus.lines[i]) {
        std::optional<std::string> mapped = fn(tok);
        if (!mapped) {
          errors[shard] = LineError{i + 1, tok};
          return;
        }
        dst.push_back(std::move(*mapped));
      }
    }
  });
  for (auto& e : errors) {
    if (e) {
      error = std::move(e);
      break;
    }
  }
  return out;
}

}  // namespace

void PrefixRule::validate() const {
  if (prefix.empty()) throw Error(ErrorKind::kConfig, "prefix must not be empty");
  bool has_space = false;
  utf8::for_each_unit(prefix, [&](const utf8::Unit& u) { has_space |= u.valid && utf8::is_space(u.code_point); });
  if (has_space) throw Error(ErrorKind::kConfig, "prefix '" + prefix + "' contains whitespace");
  if (bpe::kWhitespaceMarker.starts_with(prefix))
    throw Error(ErrorKind::kConfig, "prefix '" + prefix + "' is a prefix of the whitespace marker");
}

std::string default_prefix(std::string_view language) {
  std::string out;
  for (char c : language) out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  out.push_back('_');
  return out;
}

bpe::TokenizedCorpus apply_prefix(const bpe::TokenizedCorpus& corpus, const PrefixRule& rule, std::size_t workers) {
  rule.validate();
  std::optional<LineError> error;
  auto out = transform(
      corpus, workers,
      [&](const std::string& tok) -> std::optional<std::string> {
        if (rule.exempt.contains(tok)) return tok;
        if (std::string_view(tok).starts_with(rule.prefix)) return std::nullopt;
        return rule.prefix + tok;
      },
      error);
  if (error)
    throw Error(ErrorKind::kCollision, "line " + std::to_string(error->line) + ": token '" + error->token +
                                           "' already starts with prefix '" + rule.prefix + "'");
  return out;
}

bpe::TokenizedCorpus strip_prefix(const bpe::TokenizedCorpus& corpus, const PrefixRule& rule, std::size_t workers) {
  rule.validate();
  std::optional<LineError> error;
  auto out = transform(
      corpus, workers,
      [&](const std::string& tok) -> std::optional<std::string> {
        if (rule.exempt.contains(tok)) return tok;
        if (!std::string_view(tok).starts_with(rule.prefix) || tok.size() == rule.prefix.size())
          return std::nullopt;
        return tok.substr(rule.prefix.size());
      },
      error);
  if (error)
    throw Error(ErrorKind::kFormat, "line " + std::to_string(error->line) + ": token '" + error->token +
                                        "' lacks prefix '" + rule.prefix + "'");
  return out;
}

}  // namespace vocablab::prefix
