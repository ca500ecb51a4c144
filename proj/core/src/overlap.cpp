#include "vocablab/overlap.hpp"

#include <cmath>
#include <cstdio>
#include <unordered_set>

#include <json.hpp>

#include "vocablab/error.hpp"
#include "vocablab/io.hpp"
#include "vocablab/utf8.hpp"

namespace vocablab::overlap {

namespace {

std::vector<std::string> intersect(const vocab::Vocabulary& a, const vocab::Vocabulary& b) {
  std::vector<std::string> out;
  for (const auto& e : a.entries())
    if (b.contains(e.token)) out.push_back(e.token);
  return out;
}

std::map<std::size_t, std::size_t> histogram(const std::vector<std::string>& tokens) {
  std::map<std::size_t, std::size_t> h;
  for (const auto& t : tokens) ++h[utf8::length(t)];
  return h;
}

double percent(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

// Half-up at `decimals` places; the small bias absorbs binary representation
// error of values such as 6.55.
std::string round_half_up(double x, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double r = std::floor(x * scale + 0.5 + 1e-9) / scale;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, r);
  return buf;
}

nlohmann::json histogram_json(const std::map<std::size_t, std::size_t>& h) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [len, n] : h) j[std::to_string(len)] = n;
  return j;
}

}  // namespace

Report compute(const vocab::Vocabulary& a, const vocab::Vocabulary& b, const vocab::Vocabulary* joint) {
  Report r;
  r.size_a = a.size();
  r.size_b = b.size();
  r.overlap_tokens = intersect(a, b);
  r.overlap_count = r.overlap_tokens.size();
  r.token_length_histogram = histogram(r.overlap_tokens);
  if (joint) {
    r.joint_supplied = true;
    r.size_joint = joint->size();
    if (r.size_a + r.size_b != r.size_joint + r.overlap_count)
      throw Error(ErrorKind::kConsistency,
                  "inclusion-exclusion violated: |V_a|=" + std::to_string(r.size_a) + " |V_b|=" +
                      std::to_string(r.size_b) + " |V_joint|=" + std::to_string(r.size_joint) +
                      " |O|=" + std::to_string(r.overlap_count) +
                      " (the joint vocabulary was not extracted from the merged corpora)");
  } else {
    r.size_joint = r.size_a + r.size_b - r.overlap_count;
  }
  r.overlap_pct = percent(r.overlap_count, r.size_joint);
  return r;
}

Report compute_from_sizes(std::size_t size_a, std::size_t size_b, std::size_t size_joint) {
  if (size_joint > size_a + size_b || size_joint < std::max(size_a, size_b))
    throw Error(ErrorKind::kConsistency, "joint size " + std::to_string(size_joint) +
                                             " is incompatible with component sizes " + std::to_string(size_a) +
                                             " and " + std::to_string(size_b));
  Report r;
  r.size_a = size_a;
  r.size_b = size_b;
  r.size_joint = size_joint;
  r.joint_supplied = true;
  r.tokens_known = false;
  r.overlap_count = size_a + size_b - size_joint;
  r.overlap_pct = percent(r.overlap_count, size_joint);
  return r;
}

TripleReport compute_triple(const vocab::Vocabulary& base, const vocab::Vocabulary& aux1,
                            const vocab::Vocabulary& aux2) {
  TripleReport r;
  r.o_ab = intersect(base, aux1);
  r.o_ac = intersect(base, aux2);
  const std::unordered_set<std::string> ac(r.o_ac.begin(), r.o_ac.end());
  for (const auto& t : r.o_ab)
    if (ac.contains(t)) r.oo.push_back(t);
  TripleReport counts = compute_triple_from_counts(r.o_ab.size(), r.o_ac.size(), r.oo.size());
  counts.o_ab = std::move(r.o_ab);
  counts.o_ac = std::move(r.o_ac);
  counts.oo = std::move(r.oo);
  counts.oo_length_histogram = histogram(counts.oo);
  return counts;
}

TripleReport compute_triple_from_counts(std::size_t count_ab, std::size_t count_ac, std::size_t count_oo) {
  if (count_oo > count_ab || count_oo > count_ac)
    throw Error(ErrorKind::kConsistency, "overlap of overlaps (" + std::to_string(count_oo) +
                                             ") exceeds a pairwise overlap (" + std::to_string(count_ab) + ", " +
                                             std::to_string(count_ac) + ")");
  TripleReport r;
  r.count_ab = count_ab;
  r.count_ac = count_ac;
  r.count_oo = count_oo;
  r.unique_ab = count_ab - count_oo;
  r.unique_ac = count_ac - count_oo;
  r.share_ab = percent(count_oo, count_ab);
  r.share_ac = percent(count_oo, count_ac);
  return r;
}

std::size_t complementary_size(std::size_t joint_size, std::size_t base_size) {
  if (joint_size <= base_size)
    throw Error(ErrorKind::kConfig, "joint vocabulary (" + std::to_string(joint_size) +
                                        ") must be larger than the base vocabulary (" + std::to_string(base_size) +
                                        ")");
  return joint_size - base_size;
}

std::size_t complementary_size(const vocab::Vocabulary& joint, const vocab::Vocabulary& base) {
  return complementary_size(joint.size(), base.size());
}

std::string format_percentage(double pct) {
  if (pct > 0.0 && pct < 0.01) return round_half_up(pct, 3) + "%";
  return round_half_up(pct, 1) + "%";
}

std::string format_share(double pct) { return round_half_up(pct, 0) + "%"; }

nlohmann::json to_json(const Report& r) {
  nlohmann::json j;
  j["size_a"] = r.size_a;
  j["size_b"] = r.size_b;
  j["size_joint"] = r.size_joint;
  j["joint_supplied"] = r.joint_supplied;
  j["overlap_count"] = r.overlap_count;
  j["overlap_pct"] = r.overlap_pct;
  j["overlap_pct_display"] = format_percentage(r.overlap_pct);
  if (r.tokens_known) {
    j["overlap_tokens"] = r.overlap_tokens;
    j["token_length_histogram"] = histogram_json(r.token_length_histogram);
  } else {
    j["overlap_tokens"] = nullptr;
    j["token_length_histogram"] = nullptr;
  }
  return j;
}

nlohmann::json to_json(const TripleReport& r) {
  nlohmann::json j;
  j["o_ab"] = r.o_ab;
  j["o_ac"] = r.o_ac;
  j["oo"] = r.oo;
  j["count_ab"] = r.count_ab;
  j["count_ac"] = r.count_ac;
  j["count_oo"] = r.count_oo;
  j["unique_ab"] = r.unique_ab;
  j["unique_ac"] = r.unique_ac;
  j["share_ab"] = r.share_ab;
  j["share_ac"] = r.share_ac;
  j["share_ab_display"] = format_share(r.share_ab);
  j["share_ac_display"] = format_share(r.share_ac);
  j["oo_length_histogram"] = histogram_json(r.oo_length_histogram);
  return j;
}

Report report_from_json(const nlohmann::json& j) {
  Report r;
  try {
    r.size_a = j.at("size_a").get<std::size_t>();
    r.size_b = j.at("size_b").get<std::size_t>();
    r.size_joint = j.at("size_joint").get<std::size_t>();
    r.joint_supplied = j.value("joint_supplied", true);
    r.overlap_count = j.at("overlap_count").get<std::size_t>();
    r.overlap_pct = j.at("overlap_pct").get<double>();
    if (j.at("overlap_tokens").is_null()) {
      r.tokens_known = false;
    } else {
      r.overlap_tokens = j.at("overlap_tokens").get<std::vector<std::string>>();
      for (const auto& [len, n] : j.at("token_length_histogram").items())
        r.token_length_histogram[std::stoull(len)] = n.get<std::size_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("overlap report: ") + e.what());
  }
  return r;
}

std::string overlap_tsv(const Report& r, const vocab::Vocabulary& a, const vocab::Vocabulary& b) {
  std::string out;
  for (const auto& t : r.overlap_tokens) {
    out += io::escape_field(t);
    out += '\t';
    out += std::to_string(*a.id_of(t));
    out += '\t';
    out += std::to_string(*b.id_of(t));
    out += '\n';
  }
  return out;
}

}  // namespace vocablab::overlap
