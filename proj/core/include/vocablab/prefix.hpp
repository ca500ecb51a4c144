#pragma once

#include <set>
#include <string>
#include <string_view>

#include "vocablab/bpe.hpp"

namespace vocablab::prefix {

// Token-level prefix that keeps an auxiliary language's tokens apart from
// the source language's in a merged vocabulary.
struct PrefixRule {
  std::string prefix;
  std::set<std::string> exempt;

  // Throws kConfig when the prefix is empty, contains whitespace, or is a
  // prefix of the whitespace marker.
  void validate() const;
};

// Uppercase language code followed by '_', e.g. "sv" -> "SV_".
std::string default_prefix(std::string_view language);

// Errors with kCollision (and the 1-based line) if a token already carries
// the prefix.
bpe::TokenizedCorpus apply_prefix(const bpe::TokenizedCorpus& corpus, const PrefixRule& rule,
                                  std::size_t workers = 1);

// Errors with kFormat naming the first non-exempt token without the prefix.
bpe::TokenizedCorpus strip_prefix(const bpe::TokenizedCorpus& corpus, const PrefixRule& rule,
                                  std::size_t workers = 1);

}  // namespace vocablab::prefix
