#ifndef NLI_CORPUS_HPP
#define NLI_CORPUS_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "nli/error.hpp"
#include "nli/util.hpp"

namespace nli {

struct TokenAnnotation {
  std::string surface;
  std::string lemma;
  std::string pos;         // fine-grained tag (CoNLL-U XPOS)
  std::string coarse_pos;  // universal tag (CoNLL-U UPOS), may be empty
  std::string ne_tag;      // BIO tag, empty = outside
  std::string dep_label;
  std::optional<std::size_t> head;  // 0-based; nullopt = ROOT or unparsed
  bool is_punct = false;

  bool operator==(const TokenAnnotation&) const = default;
};

using Sentence = std::vector<TokenAnnotation>;

struct AnnotatedDocument {
  std::string doc_id;
  std::vector<Sentence> sentences;
  std::string label;
  std::optional<int> proficiency;
  std::string source;
  std::size_t char_length = 0;

  std::size_t token_count() const {
    std::size_t n = 0;
    for (const auto& s : sentences) n += s.size();
    return n;
  }

  // True when at least one token carries a dependency relation.
  bool has_dependencies() const {
    for (const auto& s : sentences)
      for (const auto& t : s)
        if (!t.dep_label.empty()) return true;
    return false;
  }

  bool operator==(const AnnotatedDocument&) const = default;
};

// Checks the head links of one sentence. A sentence whose tokens carry no
// dependency relation at all is treated as unparsed and accepted.
inline void validate_tree(const Sentence& sentence, const std::string& doc_id,
                          std::size_t sentence_index) {
  const auto where = [&] {
    return "document '" + doc_id + "' sentence " +
           std::to_string(sentence_index + 1) + ": ";
  };
  bool parsed = false;
  for (const auto& t : sentence) parsed = parsed || !t.dep_label.empty();
  if (!parsed) {
    for (const auto& t : sentence)
      if (t.head) throw ValidationError(where() + "head without relation label");
    return;
  }
  const std::size_t n = sentence.size();
  std::size_t roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& h = sentence[i].head;
    if (sentence[i].dep_label.empty())
      throw ValidationError(where() + "token " + std::to_string(i + 1) +
                            " lacks a relation label");
    if (!h) {
      ++roots;
      continue;
    }
    if (*h >= n)
      throw ValidationError(where() + "head of token " + std::to_string(i + 1) +
                            " out of range");
    if (*h == i)
      throw ValidationError(where() + "token " + std::to_string(i + 1) +
                            " is its own head");
  }
  if (roots != 1)
    throw ValidationError(where() + "expected exactly one root, found " +
                          std::to_string(roots));
  // Walk each token towards the root; more than n steps means a cycle.
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t cur = i;
    std::size_t steps = 0;
    while (sentence[cur].head) {
      cur = *sentence[cur].head;
      if (++steps > n)
        throw ValidationError(where() + "cycle through token " +
                              std::to_string(i + 1));
    }
  }
}

inline void validate_document(const AnnotatedDocument& doc) {
  if (doc.doc_id.empty()) throw ValidationError("document with empty id");
  if (doc.label.empty())
    throw ValidationError("document '" + doc.doc_id + "' has no label");
  std::size_t surface_chars = 0;
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    const auto& sentence = doc.sentences[s];
    if (sentence.empty())
      throw ValidationError("document '" + doc.doc_id + "' has an empty sentence");
    for (const auto& t : sentence) {
      if (t.surface.empty())
        throw ValidationError("document '" + doc.doc_id + "' has an empty token");
      surface_chars += utf8_length(t.surface);
    }
    validate_tree(sentence, doc.doc_id, s);
  }
  if (doc.char_length < surface_chars)
    throw ValidationError("document '" + doc.doc_id +
                          "': char_length shorter than its tokens");
}

// A set of labelled documents with an ordered (lexicographic) label space.
class LabeledDataset {
 public:
  LabeledDataset() = default;

  // Label space is derived from the documents.
  explicit LabeledDataset(std::vector<AnnotatedDocument> docs)
      : documents_(std::move(docs)) {
    std::set<std::string> labels;
    for (const auto& d : documents_) labels.insert(d.label);
    label_space_.assign(labels.begin(), labels.end());
    check();
  }

  LabeledDataset(std::vector<AnnotatedDocument> docs,
                 std::vector<std::string> label_space)
      : documents_(std::move(docs)), label_space_(std::move(label_space)) {
    std::sort(label_space_.begin(), label_space_.end());
    if (std::adjacent_find(label_space_.begin(), label_space_.end()) !=
        label_space_.end())
      throw ValidationError("duplicate label in label space");
    check();
  }

  const std::vector<AnnotatedDocument>& documents() const { return documents_; }
  const std::vector<std::string>& label_space() const { return label_space_; }
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }
  const AnnotatedDocument& operator[](std::size_t i) const { return documents_[i]; }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(documents_.size());
    for (const auto& d : documents_) out.push_back(d.label);
    return out;
  }

  std::map<std::string, std::size_t> label_histogram() const {
    std::map<std::string, std::size_t> h;
    for (const auto& l : label_space_) h[l] = 0;
    for (const auto& d : documents_) ++h[d.label];
    return h;
  }

  // Keeps the documents selected by `indices` (in that order) under the
  // same label space.
  LabeledDataset subset(const std::vector<std::size_t>& indices) const {
    std::vector<AnnotatedDocument> docs;
    docs.reserve(indices.size());
    for (auto i : indices) docs.push_back(documents_.at(i));
    return LabeledDataset(std::move(docs), label_space_);
  }

  void require_trainable() const {
    if (label_space_.size() < 2)
      throw ValidationError("dataset needs at least two labels, has " +
                            std::to_string(label_space_.size()));
  }

 private:
  void check() const {
    std::unordered_set<std::string> ids;
    const std::set<std::string> labels(label_space_.begin(), label_space_.end());
    for (const auto& d : documents_) {
      if (!ids.insert(d.doc_id).second)
        throw ValidationError("duplicate doc_id '" + d.doc_id + "'");
      if (!labels.count(d.label))
        throw ValidationError("document '" + d.doc_id + "' has label '" +
                              d.label + "' outside the label space");
    }
  }

  std::vector<AnnotatedDocument> documents_;
  std::vector<std::string> label_space_;
};

namespace detail {

inline bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'A' && c <= 'Z') ||
         (c >= 'a' && c <= 'z') || c >= 0x80;
}

inline bool is_space_byte(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

}  // namespace detail

// Whitespace/punctuation tokenizer used when no annotated version of a text
// exists. Only the lexical layers (surface, lemma, is_punct) are filled.
inline AnnotatedDocument tokenize_plain(std::string_view text, std::string label,
                                        std::string doc_id = "doc") {
  if (trim(text).empty()) throw InvalidArgument("tokenize_plain: empty text");
  AnnotatedDocument doc;
  doc.doc_id = std::move(doc_id);
  doc.label = std::move(label);
  doc.source = "plain";
  doc.char_length = utf8_length(text);

  Sentence current;
  bool after_terminal = false;
  const auto push = [&](std::string surface, bool punct) {
    const bool terminal = punct && (surface == "." || surface == "!" || surface == "?");
    if (after_terminal && !terminal) {
      doc.sentences.push_back(std::move(current));
      current.clear();
    }
    TokenAnnotation tok;
    tok.lemma = to_lower_ascii(surface);
    tok.surface = std::move(surface);
    tok.is_punct = punct;
    current.push_back(std::move(tok));
    after_terminal = terminal;
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (detail::is_space_byte(c)) {
      ++i;
    } else if (detail::is_word_byte(c)) {
      std::size_t j = i;
      while (j < text.size() && detail::is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
      push(std::string(text.substr(i, j - i)), false);
      i = j;
    } else {
      push(std::string(1, text[i]), true);
      ++i;
    }
  }
  if (!current.empty()) doc.sentences.push_back(std::move(current));
  return doc;
}

// Draws exactly `per_label` documents of every label without replacement.
// Output is grouped by label (label-space order); within a label, documents
// keep their input order.
inline LabeledDataset sample_balanced(const LabeledDataset& dataset,
                                      std::size_t per_label, std::uint64_t seed) {
  if (per_label == 0) throw InvalidArgument("sample_balanced: per_label must be positive");
  std::map<std::string, std::vector<std::size_t>> by_label;
  for (const auto& l : dataset.label_space()) by_label[l];
  for (std::size_t i = 0; i < dataset.size(); ++i) by_label[dataset[i].label].push_back(i);
  for (const auto& [label, idx] : by_label) {
    if (idx.size() < per_label)
      throw ValidationError("label '" + label + "' has " + std::to_string(idx.size()) +
                            " documents, fewer than the " + std::to_string(per_label) +
                            " requested");
  }
  Rng rng(seed);
  std::vector<std::size_t> picked;
  for (auto& [label, idx] : by_label) {
    std::vector<std::size_t> pool = idx;
    rng.shuffle(pool);
    pool.resize(per_label);
    std::sort(pool.begin(), pool.end());
    picked.insert(picked.end(), pool.begin(), pool.end());
  }
  return dataset.subset(picked);
}

// Keeps documents strictly longer than `min_chars` characters.
inline LabeledDataset filter_min_chars(const LabeledDataset& dataset,
                                       std::size_t min_chars) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < dataset.size(); ++i)
    if (dataset[i].char_length > min_chars) keep.push_back(i);
  return dataset.subset(keep);
}

inline constexpr std::string_view kNativeLabel = "NATIVE";
inline constexpr std::string_view kNonNativeLabel = "NONNATIVE";

// Builds an L1-vs-native binary dataset. The native sample depends only on
// `seed` and the native dataset, so every L1 paired with the same seed sees
// the same native documents.
inline LabeledDataset pair_binary(const LabeledDataset& non_native,
                                  const LabeledDataset& native,
                                  const std::string& l1, std::size_t native_sample,
                                  std::uint64_t seed) {
  const auto& ls = non_native.label_space();
  if (!std::binary_search(ls.begin(), ls.end(), l1))
    throw ValidationError("pair_binary: unknown L1 '" + l1 + "'");
  if (native_sample == 0) throw InvalidArgument("pair_binary: native_sample must be positive");
  if (native.size() < native_sample)
    throw ValidationError("pair_binary: native corpus has " + std::to_string(native.size()) +
                          " documents, " + std::to_string(native_sample) + " requested");

  std::vector<AnnotatedDocument> docs;
  std::unordered_set<std::string> ids;
  for (const auto& d : non_native.documents()) {
    if (d.label != l1) continue;
    auto copy = d;
    copy.label = std::string(kNonNativeLabel);
    ids.insert(copy.doc_id);
    docs.push_back(std::move(copy));
  }
  std::vector<std::size_t> pool(native.size());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  Rng rng(seed);
  rng.shuffle(pool);
  pool.resize(native_sample);
  std::sort(pool.begin(), pool.end());
  for (auto i : pool) {
    auto copy = native[i];
    copy.label = std::string(kNativeLabel);
    if (ids.count(copy.doc_id))
      throw ValidationError("pair_binary: doc_id '" + copy.doc_id +
                            "' occurs in both corpora");
    docs.push_back(std::move(copy));
  }
  return LabeledDataset(std::move(docs),
                        {std::string(kNativeLabel), std::string(kNonNativeLabel)});
}

// Inclusive proficiency range; `hi` absent means open-ended ("13+").
struct ProficiencyBand {
  std::string name;
  int lo = 0;
  std::optional<int> hi;

  bool contains(int level) const { return level >= lo && (!hi || level <= *hi); }
};

// Parses "1-5", "13+" or "7" into a band named after the text.
inline ProficiencyBand parse_band(std::string_view text) {
  const std::string t(trim(text));
  ProficiencyBand band;
  band.name = t;
  try {
    if (!t.empty() && t.back() == '+') {
      band.lo = std::stoi(t.substr(0, t.size() - 1));
    } else if (const auto dash = t.find('-'); dash != std::string::npos && dash > 0) {
      band.lo = std::stoi(t.substr(0, dash));
      band.hi = std::stoi(t.substr(dash + 1));
    } else {
      band.lo = std::stoi(t);
      band.hi = band.lo;
    }
  } catch (const std::exception&) {
    throw InvalidArgument("bad proficiency band '" + t + "'");
  }
  if (band.hi && *band.hi < band.lo)
    throw InvalidArgument("empty proficiency band '" + t + "'");
  return band;
}

struct ProficiencyGroups {
  std::vector<std::pair<std::string, LabeledDataset>> bands;  // in band order
  std::size_t dropped = 0;
};

inline ProficiencyGroups group_by_proficiency(const LabeledDataset& dataset,
                                              const std::vector<ProficiencyBand>& bands) {
  for (std::size_t a = 0; a < bands.size(); ++a) {
    for (std::size_t b = a + 1; b < bands.size(); ++b) {
      const auto& x = bands[a];
      const auto& y = bands[b];
      const bool disjoint = (x.hi && *x.hi < y.lo) || (y.hi && *y.hi < x.lo);
      if (!disjoint)
        throw InvalidArgument("proficiency bands '" + x.name + "' and '" + y.name +
                              "' overlap");
    }
  }
  std::vector<std::vector<std::size_t>> members(bands.size());
  ProficiencyGroups out;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& p = dataset[i].proficiency;
    bool placed = false;
    if (p) {
      for (std::size_t b = 0; b < bands.size() && !placed; ++b) {
        if (bands[b].contains(*p)) {
          members[b].push_back(i);
          placed = true;
        }
      }
    }
    if (!placed) ++out.dropped;
  }
  for (std::size_t b = 0; b < bands.size(); ++b)
    out.bands.emplace_back(bands[b].name, dataset.subset(members[b]));
  return out;
}

}  // namespace nli

#endif  // NLI_CORPUS_HPP
