#ifndef NLI_STATS_HPP
#define NLI_STATS_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "nli/corpus.hpp"
#include "nli/error.hpp"
#include "nli/features.hpp"
#include "nli/util.hpp"

namespace nli {

inline constexpr std::string_view kAllGroup = "(All)";

struct StatSummary {
  std::string group;
  Family kind = Family::WL;
  double mean = 0.0;
  std::uint64_t count = 0;
};

struct StatHistogram {
  std::string group;
  Family kind = Family::WL;
  std::map<int, double> bins;  // value -> mass (raw count when unnormalised)
};

using NamedDatasets = std::vector<std::pair<std::string, LabeledDataset>>;

// Splits a dataset into one group per label (label-space order).
inline NamedDatasets groups_by_label(const LabeledDataset& dataset) {
  NamedDatasets out;
  for (const auto& label : dataset.label_space()) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < dataset.size(); ++i)
      if (dataset[i].label == label) idx.push_back(i);
    out.emplace_back(label, dataset.subset(idx));
  }
  return out;
}

namespace detail {

inline void require_statistical(Family kind) {
  if (!is_statistical(kind))
    throw InvalidArgument("family " + std::string(family_name(kind)) + " is not a statistical kind");
}

struct Pool {
  std::int64_t sum = 0;
  std::uint64_t count = 0;
  std::map<int, std::uint64_t> counts;

  void add(const LabeledDataset& d, Family kind) {
    for (const auto& doc : d.documents()) {
      for (int v : statistical_values(doc, kind)) {
        sum += v;
        ++count;
        ++counts[v];
      }
    }
  }
};

}  // namespace detail

// Mean per observation (token for WL/DD, sentence for SL) within each group,
// followed by an "(All)" row pooled over every group. Empty groups are
// skipped.
inline std::vector<StatSummary> mean_stat(const NamedDatasets& groups, Family kind) {
  detail::require_statistical(kind);
  std::vector<StatSummary> out;
  detail::Pool all;
  for (const auto& [name, d] : groups) {
    detail::Pool p;
    p.add(d, kind);
    all.sum += p.sum;
    all.count += p.count;
    if (p.count == 0) continue;
    out.push_back({name, kind, static_cast<double>(p.sum) / static_cast<double>(p.count), p.count});
  }
  if (all.count > 0)
    out.push_back({std::string(kAllGroup), kind,
                   static_cast<double>(all.sum) / static_cast<double>(all.count), all.count});
  return out;
}

inline std::vector<StatSummary> mean_stat(const LabeledDataset& dataset, Family kind) {
  return mean_stat(groups_by_label(dataset), kind);
}

// Integer-binned distribution per group, in group order.
inline std::vector<StatHistogram> histogram(const NamedDatasets& groups, Family kind, bool normalize) {
  detail::require_statistical(kind);
  std::vector<StatHistogram> out;
  for (const auto& [name, d] : groups) {
    detail::Pool p;
    p.add(d, kind);
    StatHistogram h{name, kind, {}};
    for (const auto& [v, c] : p.counts)
      h.bins[v] = normalize ? static_cast<double>(c) / static_cast<double>(p.count) : static_cast<double>(c);
    out.push_back(std::move(h));
  }
  return out;
}

inline std::vector<StatHistogram> histogram(const LabeledDataset& dataset, Family kind, bool normalize) {
  return histogram(groups_by_label(dataset), kind, normalize);
}

// `group,kind,value,mass`
inline void write_histogram_csv(std::ostream& out, const std::vector<StatHistogram>& hs) {
  out << "group,kind,value,mass\n";
  for (const auto& h : hs)
    for (const auto& [v, m] : h.bins)
      out << h.group << ',' << family_name(h.kind) << ',' << v << ',' << format_double(m) << '\n';
}

// `group,avgWL,avgSL,avgDD`. A kind that could not be computed (e.g. DD on
// unparsed text) is passed as nullopt and written as NA.
inline void write_means_csv(std::ostream& out, const std::optional<std::vector<StatSummary>>& wl,
                            const std::optional<std::vector<StatSummary>>& sl,
                            const std::optional<std::vector<StatSummary>>& dd) {
  std::vector<std::string> groups;
  std::map<std::string, std::map<Family, double>> table;
  for (const auto* col : {&wl, &sl, &dd}) {
    if (!*col) continue;
    for (const auto& s : **col) {
      if (std::find(groups.begin(), groups.end(), s.group) == groups.end()) groups.push_back(s.group);
      table[s.group][s.kind] = s.mean;
    }
  }
  // Keep "(All)" last.
  std::stable_partition(groups.begin(), groups.end(), [](const auto& g) { return g != kAllGroup; });
  out << "group,avgWL,avgSL,avgDD\n";
  for (const auto& g : groups) {
    out << g;
    for (auto k : {Family::WL, Family::SL, Family::DD}) {
      const auto& row = table[g];
      const auto it = row.find(k);
      out << ',' << (it == row.end() ? std::string("NA") : format_fixed(it->second, 2));
    }
    out << '\n';
  }
}

}  // namespace nli

#endif  // NLI_STATS_HPP
