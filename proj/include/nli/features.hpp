#ifndef NLI_FEATURES_HPP
#define NLI_FEATURES_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nli/corpus.hpp"
#include "nli/error.hpp"
#include "nli/util.hpp"

namespace nli {

enum class Family { T, L, TN, LN, TP, LP, MS, P, D, WL, SL, DD };

inline constexpr std::array<Family, 12> kAllFamilies = {
    Family::T,  Family::L, Family::TN, Family::LN, Family::TP, Family::LP,
    Family::MS, Family::P, Family::D,  Family::WL, Family::SL, Family::DD};

inline std::string_view family_name(Family f) {
  switch (f) {
    case Family::T: return "T";
    case Family::L: return "L";
    case Family::TN: return "TN";
    case Family::LN: return "LN";
    case Family::TP: return "TP";
    case Family::LP: return "LP";
    case Family::MS: return "MS";
    case Family::P: return "P";
    case Family::D: return "D";
    case Family::WL: return "WL";
    case Family::SL: return "SL";
    case Family::DD: return "DD";
  }
  return "?";
}

inline std::optional<Family> family_from_name(std::string_view name) {
  for (auto f : kAllFamilies)
    if (family_name(f) == name) return f;
  return std::nullopt;
}

inline bool is_statistical(Family f) {
  return f == Family::WL || f == Family::SL || f == Family::DD;
}

// One of the 30 feature families: an n-gram family with order 1..3, or one
// of the statistical kinds (no order).
class FeatureSpec {
 public:
  static FeatureSpec make(Family family, std::optional<int> order = std::nullopt) {
    if (is_statistical(family)) {
      if (order) throw InvalidArgument(std::string(family_name(family)) + " takes no n-gram order");
    } else if (!order || *order < 1 || *order > 3) {
      throw InvalidArgument(std::string(family_name(family)) + " needs an order in 1..3");
    }
    return FeatureSpec(family, order);
  }

  // "T1", "MS3", "WL"...
  static FeatureSpec parse(std::string_view text) {
    const std::string t(trim(text));
    std::size_t split_at = t.size();
    while (split_at > 0 && t[split_at - 1] >= '0' && t[split_at - 1] <= '9') --split_at;
    const auto family = family_from_name(std::string_view(t).substr(0, split_at));
    if (!family) throw InvalidArgument("unknown feature family '" + t + "'");
    std::optional<int> order;
    if (split_at < t.size()) {
      if (t.size() - split_at != 1) throw InvalidArgument("bad feature spec '" + t + "'");
      order = t[split_at] - '0';
    }
    return make(*family, order);
  }

  Family family() const { return family_; }
  std::optional<int> order() const { return order_; }
  bool statistical() const { return is_statistical(family_); }

  std::string name() const {
    std::string n(family_name(family_));
    if (order_) n += static_cast<char>('0' + *order_);
    return n;
  }
  std::string prefix() const { return name() + ":"; }

  auto operator<=>(const FeatureSpec&) const = default;

 private:
  FeatureSpec(Family f, std::optional<int> o) : family_(f), order_(o) {}
  Family family_;
  std::optional<int> order_;
};

// The 30 families in the conventional reporting order.
inline std::vector<FeatureSpec> all_feature_specs() {
  std::vector<FeatureSpec> out;
  for (auto f : kAllFamilies) {
    if (is_statistical(f)) {
      out.push_back(FeatureSpec::make(f));
    } else {
      for (int n = 1; n <= 3; ++n) out.push_back(FeatureSpec::make(f, n));
    }
  }
  return out;
}

// Comma-separated list, or "all".
inline std::vector<FeatureSpec> parse_feature_specs(std::string_view text) {
  if (trim(text) == "all") return all_feature_specs();
  std::vector<FeatureSpec> out;
  for (const auto& part : split(text, ',')) {
    if (trim(part).empty()) continue;
    auto spec = FeatureSpec::parse(part);
    if (std::find(out.begin(), out.end(), spec) == out.end()) out.push_back(spec);
  }
  if (out.empty()) throw InvalidArgument("empty feature spec list");
  return out;
}

inline std::string specs_name(const std::vector<FeatureSpec>& specs) {
  std::vector<std::string> names;
  for (const auto& s : specs) names.push_back(s.name());
  return join(names, " ");
}

// Namespaced feature string -> (spec, n-gram body). Statistical features
// come back with their numeric value as the body.
inline std::pair<FeatureSpec, std::string> split_feature(std::string_view feature) {
  const auto colon = feature.find(':');
  if (colon == std::string_view::npos)
    throw InvalidArgument("feature '" + std::string(feature) + "' lacks a family prefix");
  return {FeatureSpec::parse(feature.substr(0, colon)), std::string(feature.substr(colon + 1))};
}

inline bool is_statistical_feature(std::string_view feature) {
  return feature.starts_with("WL:") || feature.starts_with("SL:") || feature.starts_with("DD:");
}

class SuffixLexicon {
 public:
  explicit SuffixLexicon(std::vector<std::string> suffixes) : suffixes_(std::move(suffixes)) {
    std::set<std::string> seen;
    for (const auto& s : suffixes_) {
      if (s.empty()) throw InvalidArgument("empty suffix in lexicon");
      if (to_lower_ascii(s) != s) throw InvalidArgument("suffix '" + s + "' is not lowercase");
      if (!seen.insert(s).second) throw InvalidArgument("duplicate suffix '" + s + "'");
    }
    // Longest first; ties in length resolve alphabetically.
    std::sort(suffixes_.begin(), suffixes_.end(), [](const auto& a, const auto& b) {
      return a.size() != b.size() ? a.size() > b.size() : a < b;
    });
  }

  const std::vector<std::string>& suffixes() const { return suffixes_; }

  // Longest lexicon entry that is a proper suffix of `word` (already
  // lowercased).
  std::optional<std::string_view> match(std::string_view word) const {
    for (const auto& s : suffixes_)
      if (s.size() < word.size() && word.ends_with(s)) return std::string_view(s);
    return std::nullopt;
  }

 private:
  std::vector<std::string> suffixes_;
};

inline const SuffixLexicon& default_suffix_lexicon() {
  static const SuffixLexicon lexicon({
      "able", "ably", "age",   "al",    "ally",  "ance", "ancy", "ant",   "ary",  "ate",
      "ation", "ction", "cy",  "dom",   "ed",    "ee",   "eer",  "en",    "ence", "ency",
      "ent",  "er",   "ery",   "es",    "est",   "ful",  "fully", "hood", "ial",  "ian",
      "ible", "ic",   "ical",  "ically", "ied",  "ier",  "ies",  "iest",  "ify",  "ily",
      "ing",  "ion",  "ious",  "ise",   "ish",   "ism",  "ist",  "ity",   "ive",  "ize",
      "less", "let",  "like",  "ling",  "ly",    "ment", "ness", "or",    "ory",  "ous",
      "ship", "sion", "some",  "tion",  "ty",    "ure",  "ward", "wise",
  });
  return lexicon;
}

struct ProjectionOptions {
  // MS units use universal (UPOS) tags instead of fine-grained ones.
  bool coarse_ms_tags = false;
  std::string entity_placeholder = "ENT";
};

// POS classes replaced by their tag in the TP/LP families.
inline bool is_masked_pos(std::string_view tag) {
  static constexpr std::array<std::string_view, 7> kMasked = {"ADD", "FW",  "NN", "NNP",
                                                              "NNPS", "NNS", "XX"};
  return std::find(kMasked.begin(), kMasked.end(), tag) != kMasked.end();
}

namespace detail {

inline void require_layer(const AnnotatedDocument& doc, Family family, std::string_view layer,
                          bool present) {
  if (!present)
    throw ValidationError("family " + std::string(family_name(family)) + " needs " +
                          std::string(layer) + " annotations, missing in document '" +
                          doc.doc_id + "'");
}

template <class Pred>
bool all_tokens(const AnnotatedDocument& doc, Pred pred) {
  for (const auto& s : doc.sentences)
    for (const auto& t : s)
      if (!pred(t)) return false;
  return true;
}

}  // namespace detail

// Maps each token of the document (in order, sentences concatenated) to the
// unit the family is built from.
inline std::vector<std::string> project_stream(const AnnotatedDocument& doc, Family family,
                                               const SuffixLexicon& lexicon = default_suffix_lexicon(),
                                               const ProjectionOptions& options = {}) {
  if (is_statistical(family))
    throw InvalidArgument("family " + std::string(family_name(family)) +
                          " has no unit stream; use encode_statistical");
  const bool uses_lemma = family == Family::L || family == Family::LN || family == Family::LP;
  const bool uses_pos = family == Family::TP || family == Family::LP || family == Family::MS ||
                        family == Family::P;
  const bool ms_coarse = family == Family::MS && options.coarse_ms_tags;
  if (uses_lemma)
    detail::require_layer(doc, family, "lemma",
                          detail::all_tokens(doc, [](const auto& t) { return !t.lemma.empty(); }));
  if (uses_pos) {
    if (ms_coarse) {
      detail::require_layer(doc, family, "universal POS", detail::all_tokens(doc, [](const auto& t) {
                              return !t.coarse_pos.empty();
                            }));
    } else {
      detail::require_layer(doc, family, "POS",
                            detail::all_tokens(doc, [](const auto& t) { return !t.pos.empty(); }));
    }
  }
  if (family == Family::D)
    detail::require_layer(doc, family, "dependency",
                          detail::all_tokens(doc, [](const auto& t) { return !t.dep_label.empty(); }));

  std::vector<std::string> units;
  units.reserve(doc.token_count());
  for (const auto& sentence : doc.sentences) {
    for (const auto& t : sentence) {
      switch (family) {
        case Family::T: units.push_back(t.surface); break;
        case Family::L: units.push_back(t.lemma); break;
        case Family::TN:
          units.push_back(t.ne_tag.empty() ? t.surface : options.entity_placeholder);
          break;
        case Family::LN:
          units.push_back(t.ne_tag.empty() ? t.lemma : options.entity_placeholder);
          break;
        case Family::TP: units.push_back(is_masked_pos(t.pos) ? t.pos : t.surface); break;
        case Family::LP: units.push_back(is_masked_pos(t.pos) ? t.pos : t.lemma); break;
        case Family::MS: {
          std::string unit = ms_coarse ? t.coarse_pos : t.pos;
          if (const auto suffix = lexicon.match(to_lower_ascii(t.surface))) {
            unit += '-';
            unit += *suffix;
          }
          units.push_back(std::move(unit));
          break;
        }
        case Family::P: units.push_back(t.pos); break;
        case Family::D: units.push_back(t.dep_label); break;
        default: break;
      }
    }
  }
  return units;
}

using CountMap = std::map<std::string, std::uint32_t>;

struct FeatureCounts {
  std::string doc_id;
  CountMap counts;

  std::uint64_t total() const {
    std::uint64_t n = 0;
    for (const auto& [f, c] : counts) n += c;
    return n;
  }
};

// Contiguous n-grams over the whole stream, joined by single spaces and
// prefixed with `prefix` + ':'. Adds into `out`.
inline void extract_ngrams(std::span<const std::string> units, int n, std::string_view prefix,
                           CountMap& out) {
  if (n < 1 || n > 3) throw InvalidArgument("n-gram order must be 1, 2 or 3");
  const auto order = static_cast<std::size_t>(n);
  if (units.size() < order) return;
  std::string key;
  for (std::size_t i = 0; i + order <= units.size(); ++i) {
    key.assign(prefix);
    key += ':';
    for (std::size_t j = 0; j < order; ++j) {
      if (j) key += ' ';
      key += units[i + j];
    }
    ++out[key];
  }
}

inline CountMap extract_ngrams(std::span<const std::string> units, int n, std::string_view prefix) {
  CountMap out;
  extract_ngrams(units, n, prefix, out);
  return out;
}

// Per-observation values of a statistical kind: word lengths (punctuation
// excluded), sentence lengths in tokens, or dependency depths.
inline std::vector<int> statistical_values(const AnnotatedDocument& doc, Family kind) {
  std::vector<int> values;
  switch (kind) {
    case Family::WL:
      for (const auto& s : doc.sentences)
        for (const auto& t : s)
          if (!t.is_punct) values.push_back(static_cast<int>(utf8_length(t.surface)));
      break;
    case Family::SL:
      for (const auto& s : doc.sentences) values.push_back(static_cast<int>(s.size()));
      break;
    case Family::DD: {
      detail::require_layer(doc, kind, "dependency",
                            detail::all_tokens(doc, [](const auto& t) { return !t.dep_label.empty(); }));
      for (const auto& s : doc.sentences) {
        std::vector<int> depth(s.size(), -1);
        for (std::size_t i = 0; i < s.size(); ++i) {
          // Climb until a token of known depth (or the root) is reached.
          std::vector<std::size_t> path;
          std::size_t cur = i;
          while (depth[cur] < 0 && s[cur].head) {
            path.push_back(cur);
            cur = *s[cur].head;
            if (path.size() > s.size())
              throw ValidationError("cyclic dependency tree in document '" + doc.doc_id + "'");
          }
          int d = depth[cur] < 0 ? 0 : depth[cur];
          depth[cur] = d;
          for (auto it = path.rbegin(); it != path.rend(); ++it) depth[*it] = ++d;
        }
        values.insert(values.end(), depth.begin(), depth.end());
      }
      break;
    }
    default:
      throw InvalidArgument("family " + std::string(family_name(kind)) + " is not statistical");
  }
  return values;
}

inline void encode_statistical(const AnnotatedDocument& doc, Family kind, CountMap& out) {
  const std::string prefix = std::string(family_name(kind)) + ":";
  for (int v : statistical_values(doc, kind)) ++out[prefix + std::to_string(v)];
}

inline CountMap encode_statistical(const AnnotatedDocument& doc, Family kind) {
  CountMap out;
  encode_statistical(doc, kind, out);
  return out;
}

inline FeatureCounts extract_features(const AnnotatedDocument& doc,
                                      std::span<const FeatureSpec> specs,
                                      const SuffixLexicon& lexicon = default_suffix_lexicon(),
                                      const ProjectionOptions& options = {}) {
  if (specs.empty()) throw InvalidArgument("extract_features: no feature specs");
  FeatureCounts fc;
  fc.doc_id = doc.doc_id;
  std::map<Family, std::vector<std::string>> streams;
  for (const auto& spec : specs) {
    if (spec.statistical()) {
      encode_statistical(doc, spec.family(), fc.counts);
      continue;
    }
    auto it = streams.find(spec.family());
    if (it == streams.end())
      it = streams.emplace(spec.family(), project_stream(doc, spec.family(), lexicon, options)).first;
    extract_ngrams(it->second, *spec.order(), spec.name(), fc.counts);
  }
  return fc;
}

inline std::vector<FeatureCounts> extract_dataset(const LabeledDataset& dataset,
                                                  std::span<const FeatureSpec> specs,
                                                  const SuffixLexicon& lexicon = default_suffix_lexicon(),
                                                  const ProjectionOptions& options = {},
                                                  unsigned workers = 1) {
  std::vector<FeatureCounts> out(dataset.size());
  parallel_for(dataset.size(), workers, [&](std::size_t i) {
    out[i] = extract_features(dataset[i], specs, lexicon, options);
  });
  return out;
}

// Sorted `feature<TAB>count` lines, counts summed over all inputs.
inline void write_feature_dump(std::ostream& out, std::span<const FeatureCounts> counts) {
  CountMap total;
  for (const auto& fc : counts)
    for (const auto& [f, c] : fc.counts) total[f] += c;
  for (const auto& [f, c] : total) out << f << '\t' << c << '\n';
}

}  // namespace nli

#endif  // NLI_FEATURES_HPP
