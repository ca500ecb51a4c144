#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vocablab/vocab.hpp"

namespace vocablab::overlap {

// Pairwise overlap O = V_a ∩ V_b and its share of the joint vocabulary.
//
// When a joint vocabulary (extracted from the concatenated corpora) is
// supplied, |O| must equal |V_a| + |V_b| - |V_joint|; otherwise the union
// size stands in for |V_joint|.
struct Report {
  std::size_t size_a = 0;
  std::size_t size_b = 0;
  std::size_t size_joint = 0;
  bool joint_supplied = false;
  // Empty when the report was built from sizes alone.
  std::vector<std::string> overlap_tokens;
  bool tokens_known = true;
  std::size_t overlap_count = 0;
  double overlap_pct = 0.0;
  // Token length in code points -> number of overlapping tokens.
  std::map<std::size_t, std::size_t> token_length_histogram;
};

Report compute(const vocab::Vocabulary& a, const vocab::Vocabulary& b, const vocab::Vocabulary* joint = nullptr);

// Size-only form: |O| = size_a + size_b - size_joint.
Report compute_from_sizes(std::size_t size_a, std::size_t size_b, std::size_t size_joint);

struct TripleReport {
  std::vector<std::string> o_ab;
  std::vector<std::string> o_ac;
  std::vector<std::string> oo;
  std::size_t count_ab = 0;
  std::size_t count_ac = 0;
  std::size_t count_oo = 0;
  std::size_t unique_ab = 0;
  std::size_t unique_ac = 0;
  double share_ab = 0.0;
  double share_ac = 0.0;
  std::map<std::size_t, std::size_t> oo_length_histogram;
};

// o_ab = base ∩ aux1, o_ac = base ∩ aux2, oo = o_ab ∩ o_ac.
TripleReport compute_triple(const vocab::Vocabulary& base, const vocab::Vocabulary& aux1,
                            const vocab::Vocabulary& aux2);
TripleReport compute_triple_from_counts(std::size_t count_ab, std::size_t count_ac, std::size_t count_oo);

// Tokenizer target for a retrained auxiliary language: |V_joint| - |V_base|.
std::size_t complementary_size(std::size_t joint_size, std::size_t base_size);
std::size_t complementary_size(const vocab::Vocabulary& joint, const vocab::Vocabulary& base);

// One decimal, round half up; three decimals below 0.01 (e.g. "0.003").
std::string format_percentage(double pct);
// Integer percentage, round half up.
std::string format_share(double pct);

nlohmann::json to_json(const Report& r);
nlohmann::json to_json(const TripleReport& r);
Report report_from_json(const nlohmann::json& j);

// token<TAB>id_a<TAB>id_b per overlapping token.
std::string overlap_tsv(const Report& r, const vocab::Vocabulary& a, const vocab::Vocabulary& b);

}  // namespace vocablab::overlap
