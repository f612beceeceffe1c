#ifndef NLI_EXPLAIN_HPP
#define NLI_EXPLAIN_HPP

// Coefficient-based explanations: per-label overuse (positive weight) and
// underuse (negative weight) features, plus keyword-in-context lines that
// show where a feature is realised in the corpus.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "nli/corpus.hpp"
#include "nli/error.hpp"
#include "nli/features.hpp"
#include "nli/learn.hpp"
#include "nli/util.hpp"

namespace nli {

enum class Direction { Overuse, Underuse };

inline std::string_view direction_name(Direction d) {
  return d == Direction::Overuse ? "OVERUSE" : "UNDERUSE";
}

struct FeatureAttribution {
  std::string feature;
  double coefficient = 0.0;
  Direction direction = Direction::Overuse;
  std::size_t rank = 0;  // 1-based within its direction
};

struct RankedFeatures {
  std::vector<FeatureAttribution> overuse;
  std::vector<FeatureAttribution> underuse;
};

using FeatureFilter = std::function<bool(const std::string&)>;  // true = exclude

inline RankedFeatures rank_features(const MulticlassModel& model, const std::string& label,
                                    std::size_t top_k, const FeatureFilter& exclude = {}) {
  if (top_k < 1) throw InvalidArgument("top_k must be at least 1");
  if (!model.vocabulary) throw InvalidArgument("rank_features: model has no vocabulary attached");
  const auto& m = model.at(label);
  std::vector<FeatureAttribution> pos, neg;
  for (std::size_t i = 0; i < m.weights.size(); ++i) {
    const double w = m.weights[i];
    if (w == 0.0) continue;
    const auto& f = model.vocabulary->feature(i);
    if (exclude && exclude(f)) continue;
    (w > 0.0 ? pos : neg).push_back({f, w, w > 0.0 ? Direction::Overuse : Direction::Underuse, 0});
  }
  const auto finish = [top_k](std::vector<FeatureAttribution>& v) {
    const auto cmp = [](const FeatureAttribution& a, const FeatureAttribution& b) {
      const double x = std::abs(a.coefficient), y = std::abs(b.coefficient);
      return x != y ? x > y : a.feature < b.feature;
    };
    const auto keep = std::min(top_k, v.size());
    std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(keep), v.end(), cmp);
    v.resize(keep);
    for (std::size_t i = 0; i < v.size(); ++i) v[i].rank = i + 1;
  };
  finish(pos);
  finish(neg);
  return {std::move(pos), std::move(neg)};
}

// Excludes features realised by named-entity tokens of the dataset, and
// masked-family features that contain the entity placeholder.
inline FeatureFilter named_entity_filter(const LabeledDataset& dataset,
                                         const ProjectionOptions& options = {}) {
  auto forms = std::make_shared<std::unordered_set<std::string>>();
  for (const auto& d : dataset.documents())
    for (const auto& s : d.sentences)
      for (const auto& t : s)
        if (!t.ne_tag.empty()) {
          forms->insert(t.surface);
          if (!t.lemma.empty()) forms->insert(t.lemma);
        }
  const std::string placeholder = options.entity_placeholder;
  return [forms, placeholder](const std::string& feature) {
    if (is_statistical_feature(feature)) return false;
    const auto [spec, body] = split_feature(feature);
    const auto f = spec.family();
    for (const auto& unit : split(body, ' ')) {
      if ((f == Family::TN || f == Family::LN) && unit == placeholder) return true;
      if ((f == Family::T || f == Family::L || f == Family::TP || f == Family::LP) && forms->count(unit))
        return true;
    }
    return false;
  };
}

struct ConcordanceLine {
  std::string doc_id;
  std::size_t offset = 0;  // token position of the match in the document
  std::string left;
  std::string match;
  std::string right;
};

namespace detail {

inline std::vector<std::string> surface_stream(const AnnotatedDocument& doc) {
  std::vector<std::string> out;
  out.reserve(doc.token_count());
  for (const auto& s : doc.sentences)
    for (const auto& t : s) out.push_back(t.surface);
  return out;
}

inline std::string join_range(const std::vector<std::string>& v, std::size_t from, std::size_t to) {
  std::string out;
  for (std::size_t i = from; i < to; ++i) {
    if (i > from) out += ' ';
    out += v[i];
  }
  return out;
}

inline FeatureSpec kwic_spec(const std::string& feature, std::vector<std::string>& units) {
  const auto [spec, body] = split_feature(feature);
  if (spec.statistical())
    throw InvalidArgument("feature '" + feature + "' is statistical and has no surface realisation");
  units = split(body, ' ');
  if (units.size() != static_cast<std::size_t>(*spec.order()))
    throw InvalidArgument("feature '" + feature + "' does not have " + std::to_string(*spec.order()) +
                          " units");
  return spec;
}

inline void kwic_document(const AnnotatedDocument& doc, const std::vector<std::string>& stream,
                          const std::vector<std::string>& units, std::size_t window,
                          std::vector<ConcordanceLine>& out) {
  const auto n = units.size();
  if (stream.size() < n) return;
  std::vector<std::string> surface;
  for (std::size_t i = 0; i + n <= stream.size(); ++i) {
    if (!std::equal(units.begin(), units.end(), stream.begin() + static_cast<std::ptrdiff_t>(i))) continue;
    if (surface.empty()) surface = surface_stream(doc);
    const std::size_t lo = i >= window ? i - window : 0;
    const std::size_t hi = std::min(surface.size(), i + n + window);
    out.push_back({doc.doc_id, i, join_range(surface, lo, i), join_range(surface, i, i + n),
                   join_range(surface, i + n, hi)});
  }
}

inline void sort_lines(std::vector<ConcordanceLine>& lines) {
  std::sort(lines.begin(), lines.end(), [](const auto& a, const auto& b) {
    return a.doc_id != b.doc_id ? a.doc_id < b.doc_id : a.offset < b.offset;
  });
}

}  // namespace detail

// Every position whose family projection equals the feature's n-gram, with
// `window` surface tokens of context on each side; sorted by doc_id then
// offset.
inline std::vector<ConcordanceLine> kwic(const LabeledDataset& dataset, const std::string& feature,
                                         std::size_t window,
                                         const SuffixLexicon& lexicon = default_suffix_lexicon(),
                                         const ProjectionOptions& options = {}) {
  std::vector<std::string> units;
  const auto spec = detail::kwic_spec(feature, units);
  std::vector<ConcordanceLine> out;
  for (const auto& doc : dataset.documents())
    detail::kwic_document(doc, project_stream(doc, spec.family(), lexicon, options), units, window, out);
  detail::sort_lines(out);
  return out;
}

struct ReportOptions {
  std::size_t top_k = 10;
  std::size_t kwic_samples = 3;
  std::size_t window = 5;
  bool exclude_named_entities = false;
  ProjectionOptions projection;
};

struct LabelExplanation {
  std::string label;
  RankedFeatures ranked;
  std::map<std::string, std::vector<ConcordanceLine>> concordance;  // by feature
};

struct ExplainReport {
  std::vector<LabelExplanation> labels;
};

// Per label: ranked overuse/underuse tables and up to `kwic_samples`
// concordance lines per listed feature. Overuse examples come from the
// label's own documents, underuse examples from the other labels'.
inline ExplainReport report(const MulticlassModel& model, const LabeledDataset* dataset,
                            const ReportOptions& options,
                            const SuffixLexicon& lexicon = default_suffix_lexicon(), unsigned workers = 1) {
  FeatureFilter filter;
  if (options.exclude_named_entities && dataset) filter = named_entity_filter(*dataset, options.projection);

  const auto labels = model.labels();
  ExplainReport out;
  out.labels.resize(labels.size());

  // Projection cache shared by all labels: [family][doc].
  std::map<Family, std::vector<std::vector<std::string>>> cache;
  if (dataset && options.kwic_samples > 0) {
    std::set<Family> needed;
    for (const auto& l : labels) {
      const auto r = rank_features(model, l, options.top_k, filter);
      for (const auto* list : {&r.overuse, &r.underuse})
        for (const auto& a : *list)
          if (!is_statistical_feature(a.feature)) needed.insert(split_feature(a.feature).first.family());
    }
    for (auto f : needed) {
      auto& streams = cache[f];
      streams.resize(dataset->size());
      parallel_for(dataset->size(), workers, [&](std::size_t i) {
        streams[i] = project_stream((*dataset)[i], f, lexicon, options.projection);
      });
    }
  }

  parallel_for(labels.size(), workers, [&](std::size_t li) {
    auto& section = out.labels[li];
    section.label = labels[li];
    section.ranked = rank_features(model, labels[li], options.top_k, filter);
    if (!dataset || options.kwic_samples == 0) return;
    for (const auto* list : {&section.ranked.overuse, &section.ranked.underuse}) {
      for (const auto& a : *list) {
        if (is_statistical_feature(a.feature)) continue;
        std::vector<std::string> units;
        const auto spec = detail::kwic_spec(a.feature, units);
        const auto& streams = cache.at(spec.family());
        std::vector<ConcordanceLine> lines;
        for (std::size_t i = 0; i < dataset->size(); ++i) {
          const bool own = (*dataset)[i].label == labels[li];
          if (own != (a.direction == Direction::Overuse)) continue;
          detail::kwic_document((*dataset)[i], streams[i], units, options.window, lines);
        }
        detail::sort_lines(lines);
        if (lines.size() > options.kwic_samples) lines.resize(options.kwic_samples);
        section.concordance[a.feature] = std::move(lines);
      }
    }
  });
  return out;
}

inline nlohmann::json explain_to_json(const ExplainReport& r) {
  nlohmann::json j = nlohmann::json::object();
  auto& labels = j["labels"] = nlohmann::json::array();
  for (const auto& s : r.labels) {
    nlohmann::json section{{"label", s.label}};
    for (const auto* list : {&s.ranked.overuse, &s.ranked.underuse}) {
      auto arr = nlohmann::json::array();
      for (const auto& a : *list) {
        nlohmann::json e{{"rank", a.rank},
                         {"feature", a.feature},
                         {"coefficient", a.coefficient},
                         {"direction", direction_name(a.direction)}};
        if (const auto it = s.concordance.find(a.feature); it != s.concordance.end()) {
          auto lines = nlohmann::json::array();
          for (const auto& l : it->second)
            lines.push_back({{"doc_id", l.doc_id},
                             {"offset", l.offset},
                             {"left", l.left},
                             {"match", l.match},
                             {"right", l.right}});
          e["kwic"] = std::move(lines);
        }
        arr.push_back(std::move(e));
      }
      section[list == &s.ranked.overuse ? "overuse" : "underuse"] = std::move(arr);
    }
    labels.push_back(std::move(section));
  }
  return j;
}

inline void write_explain_text(std::ostream& out, const ExplainReport& r) {
  for (const auto& s : r.labels) {
    out << "== " << s.label << " ==\n";
    for (const auto* list : {&s.ranked.overuse, &s.ranked.underuse}) {
      const bool over = list == &s.ranked.overuse;
      out << (over ? "overuse" : "underuse") << '\n';
      if (list->empty()) out << "  (none)\n";
      std::size_t width = 7;
      for (const auto& a : *list) width = std::max(width, format_fixed(a.coefficient, 4).size());
      for (const auto& a : *list) {
        const auto coef = format_fixed(a.coefficient, 4);
        out << "  " << (a.rank < 10 ? " " : "") << a.rank << "  " << std::string(width - coef.size(), ' ')
            << coef << "  " << a.feature << '\n';
        if (const auto it = s.concordance.find(a.feature); it != s.concordance.end())
          for (const auto& l : it->second)
            out << "        " << l.doc_id << ": " << l.left << " [" << l.match << "] " << l.right << '\n';
      }
    }
    out << '\n';
  }
}

inline void write_kwic_tsv(std::ostream& out, const std::vector<ConcordanceLine>& lines) {
  out << "doc_id\toffset\tleft\tmatch\tright\n";
  for (const auto& l : lines)
    out << l.doc_id << '\t' << l.offset << '\t' << l.left << '\t' << l.match << '\t' << l.right << '\n';
}

}  // namespace nli

#endif  // NLI_EXPLAIN_HPP
