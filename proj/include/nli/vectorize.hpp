#ifndef NLI_VECTORIZE_HPP
#define NLI_VECTORIZE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "nli/error.hpp"
#include "nli/features.hpp"
#include "nli/util.hpp"

namespace nli {

struct VocabularyEntry {
  std::string feature;
  std::uint32_t document_frequency = 0;
  std::uint64_t total_count = 0;

  bool operator==(const VocabularyEntry&) const = default;
};

// Dense feature index space. Index = position in lexicographic feature
// order.
class FeatureVocabulary {
 public:
  FeatureVocabulary() = default;

  FeatureVocabulary(std::vector<VocabularyEntry> entries, std::size_t n_docs)
      : entries_(std::move(entries)), n_docs_(n_docs) {
    index_.reserve(entries_.size());
    idf_.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      if (i > 0 && !(entries_[i - 1].feature < e.feature))
        throw ValidationError("vocabulary entries not strictly sorted at '" + e.feature + "'");
      if (e.document_frequency > n_docs_)
        throw ValidationError("document frequency of '" + e.feature + "' exceeds n_docs");
      index_.emplace(e.feature, static_cast<std::uint32_t>(i));
      idf_.push_back(idf(e.document_frequency));
    }
  }

  std::size_t size() const { return entries_.size(); }
  std::size_t n_docs() const { return n_docs_; }
  const std::vector<VocabularyEntry>& entries() const { return entries_; }
  const VocabularyEntry& entry(std::size_t i) const { return entries_.at(i); }
  const std::string& feature(std::size_t i) const { return entries_.at(i).feature; }
  double idf_at(std::size_t i) const { return idf_[i]; }

  std::optional<std::uint32_t> find(const std::string& feature) const {
    const auto it = index_.find(feature);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Smoothed idf: ln((1 + n) / (1 + df)) + 1.
  double idf(std::uint64_t df) const {
    return std::log((1.0 + static_cast<double>(n_docs_)) / (1.0 + static_cast<double>(df))) + 1.0;
  }

  // Content hash over (n_docs, entries); identifies the vocabulary in model
  // files and leakage checks.
  std::string hash() const {
    Fnv1a h;
    h.update(std::to_string(n_docs_));
    h.update("\n");
    for (const auto& e : entries_) {
      h.update(e.feature);
      h.update("\t");
      h.update(std::to_string(e.document_frequency));
      h.update("\t");
      h.update(std::to_string(e.total_count));
      h.update("\n");
    }
    return h.hex();
  }

  bool operator==(const FeatureVocabulary& o) const {
    return n_docs_ == o.n_docs_ && entries_ == o.entries_;
  }

 private:
  std::vector<VocabularyEntry> entries_;
  std::size_t n_docs_ = 0;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<double> idf_;
};

inline constexpr std::uint64_t kMinFeatureCount = 2;

// Keeps n-gram features whose total count over the documents is at least
// two; statistical features are always kept.
inline FeatureVocabulary build_vocabulary(std::span<const FeatureCounts> all_counts) {
  if (all_counts.empty()) throw InvalidArgument("build_vocabulary: no documents");
  std::map<std::string, std::pair<std::uint32_t, std::uint64_t>> stats;
  for (const auto& fc : all_counts) {
    for (const auto& [f, c] : fc.counts) {
      auto& s = stats[f];
      ++s.first;
      s.second += c;
    }
  }
  std::vector<VocabularyEntry> entries;
  for (auto& [f, s] : stats) {
    if (s.second < kMinFeatureCount && !is_statistical_feature(f)) continue;
    entries.push_back({f, s.first, s.second});
  }
  return FeatureVocabulary(std::move(entries), all_counts.size());
}

struct SparseEntry {
  std::uint32_t index;
  double weight;

  bool operator==(const SparseEntry&) const = default;
};

// Sorted (index, weight) pairs.
struct SparseVector {
  std::vector<SparseEntry> entries;

  bool empty() const { return entries.empty(); }
  std::size_t nnz() const { return entries.size(); }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.weight * e.weight;
    return s;
  }

  double dot(std::span<const double> dense) const {
    double s = 0.0;
    for (const auto& e : entries) s += e.weight * dense[e.index];
    return s;
  }

  // One past the largest index, 0 when empty.
  std::size_t extent() const { return entries.empty() ? 0 : entries.back().index + 1; }

  bool operator==(const SparseVector&) const = default;
};

// Raw-count tf times smoothed idf, then L2 normalisation. Features outside
// the vocabulary are dropped.
inline SparseVector tfidf(const FeatureCounts& counts, const FeatureVocabulary& vocab) {
  SparseVector v;
  for (const auto& [f, c] : counts.counts) {
    const auto idx = vocab.find(f);
    if (!idx) continue;
    v.entries.push_back({*idx, static_cast<double>(c) * vocab.idf_at(*idx)});
  }
  std::sort(v.entries.begin(), v.entries.end(),
            [](const auto& a, const auto& b) { return a.index < b.index; });
  const double norm = std::sqrt(v.squared_norm());
  if (norm > 0.0)
    for (auto& e : v.entries) e.weight /= norm;
  return v;
}

inline std::vector<SparseVector> tfidf_all(std::span<const FeatureCounts> counts,
                                           const FeatureVocabulary& vocab) {
  std::vector<SparseVector> out;
  out.reserve(counts.size());
  for (const auto& c : counts) out.push_back(tfidf(c, vocab));
  return out;
}

// `feature<TAB>index<TAB>df<TAB>count` per line, index order. The first
// line is a `#n_docs<TAB>N` header.
inline void write_vocabulary(std::ostream& out, const FeatureVocabulary& vocab) {
  out << "#n_docs\t" << vocab.n_docs() << '\n';
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const auto& e = vocab.entry(i);
    out << e.feature << '\t' << i << '\t' << e.document_frequency << '\t' << e.total_count << '\n';
  }
}

inline FeatureVocabulary read_vocabulary(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t n_docs = 0;
  bool have_header = false;
  std::vector<VocabularyEntry> entries;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (!have_header) {
      if (fields.size() != 2 || fields[0] != "#n_docs")
        throw ParseError("vocabulary file must start with '#n_docs<TAB>N'", line_no);
      n_docs = std::stoull(fields[1]);
      have_header = true;
      continue;
    }
    if (fields.size() != 4) throw ParseError("expected 4 tab-separated fields", line_no);
    try {
      if (std::stoull(fields[1]) != entries.size())
        throw ParseError("non-dense index " + fields[1], line_no);
      entries.push_back({fields[0], static_cast<std::uint32_t>(std::stoul(fields[2])),
                         std::stoull(fields[3])});
    } catch (const std::logic_error&) {
      throw ParseError("bad number", line_no);
    }
  }
  if (!have_header) throw ParseError("empty vocabulary file");
  return FeatureVocabulary(std::move(entries), n_docs);
}

// One document per line: `index:weight` pairs separated by spaces.
inline void write_vectors(std::ostream& out, std::span<const SparseVector> vectors) {
  for (const auto& v : vectors) {
    for (std::size_t i = 0; i < v.entries.size(); ++i) {
      if (i) out << ' ';
      out << v.entries[i].index << ':' << format_double(v.entries[i].weight);
    }
    out << '\n';
  }
}

}  // namespace nli

#endif  // NLI_VECTORIZE_HPP
