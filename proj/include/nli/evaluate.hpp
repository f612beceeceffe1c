#ifndef NLI_EVALUATE_HPP
#define NLI_EVALUATE_HPP

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nli/corpus.hpp"
#include "nli/error.hpp"
#include "nli/features.hpp"
#include "nli/learn.hpp"
#include "nli/util.hpp"
#include "nli/vectorize.hpp"

namespace nli {

// cells[i][j] = documents predicted as labels[i] whose true label is labels[j].
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<std::string> labels)
      : labels_(std::move(labels)), cells_(labels_.size(), std::vector<std::uint64_t>(labels_.size(), 0)) {}
  ConfusionMatrix(std::vector<std::string> labels, std::vector<std::vector<std::uint64_t>> cells)
      : labels_(std::move(labels)), cells_(std::move(cells)) {
    if (cells_.size() != labels_.size()) throw InvalidArgument("confusion matrix shape mismatch");
    for (const auto& row : cells_)
      if (row.size() != labels_.size()) throw InvalidArgument("confusion matrix shape mismatch");
  }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::vector<std::uint64_t>>& cells() const { return cells_; }
  std::uint64_t at(std::size_t predicted, std::size_t truth) const { return cells_[predicted][truth]; }

  void add(const std::string& predicted, const std::string& truth) {
    ++cells_[index_of(predicted)][index_of(truth)];
  }

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& row : cells_)
      for (auto c : row) t += c;
    return t;
  }

  std::uint64_t trace() const {
    std::uint64_t t = 0;
    for (std::size_t i = 0; i < cells_.size(); ++i) t += cells_[i][i];
    return t;
  }

 private:
  std::size_t index_of(const std::string& label) const {
    const auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw InvalidArgument("label '" + label + "' not in confusion matrix");
    return static_cast<std::size_t>(it - labels_.begin());
  }

  std::vector<std::string> labels_;
  std::vector<std::vector<std::uint64_t>> cells_;
};

// Fraction of documents on the diagonal.
inline double accuracy(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) throw InvalidArgument("accuracy of an empty confusion matrix");
  return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

struct FoldPlan {
  std::vector<std::vector<std::size_t>> folds;  // each sorted ascending
  bool stratified = true;
  std::vector<std::string> warnings;
};

// Stratified k-fold split over document labels. Each label's documents are
// shuffled and dealt round-robin, the dealing position carrying over from
// one label to the next, so per-label and overall fold sizes differ by at
// most one. Falls back to a plain shuffled split (with a warning) when a
// label has fewer than k documents.
inline FoldPlan make_folds(const std::vector<std::string>& labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("k must be at least 2");
  if (k > labels.size())
    throw InvalidArgument("k = " + std::to_string(k) + " exceeds the " + std::to_string(labels.size()) +
                          " documents");
  FoldPlan plan;
  plan.folds.resize(k);
  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < labels.size(); ++i) by_label[labels[i]].push_back(i);
  for (const auto& [label, idx] : by_label) {
    if (idx.size() < k) {
      plan.stratified = false;
      plan.warnings.push_back("label '" + label + "' has " + std::to_string(idx.size()) +
                              " documents, fewer than k = " + std::to_string(k) +
                              "; folds are not stratified");
    }
  }
  Rng rng(seed);
  std::size_t slot = 0;
  if (plan.stratified) {
    for (auto& [label, idx] : by_label) {
      rng.shuffle(idx);
      for (auto i : idx) plan.folds[slot++ % k].push_back(i);
    }
  } else {
    std::vector<std::size_t> all(labels.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    rng.shuffle(all);
    for (auto i : all) plan.folds[slot++ % k].push_back(i);
  }
  for (auto& f : plan.folds) std::sort(f.begin(), f.end());
  return plan;
}

struct ExperimentConfig {
  std::string dataset_id;
  std::vector<FeatureSpec> specs;
  std::size_t k = 10;
  std::uint64_t seed = 42;
  SolverParams solver;
  ProjectionOptions projection;

  // Row name in grids; the full set of 30 families is "(All)".
  std::string feature_set_name() const {
    const std::set<FeatureSpec> distinct(specs.begin(), specs.end());
    if (distinct.size() == all_feature_specs().size()) return "(All)";
    return specs_name(specs);
  }

  void validate() const {
    if (k < 2) throw InvalidArgument("k must be at least 2");
    if (specs.empty()) throw InvalidArgument("experiment needs at least one feature spec");
  }
};

struct FoldResult {
  std::vector<std::size_t> test_indices;
  std::vector<std::string> predicted;  // aligned with test_indices
  double accuracy = 0.0;
  std::string vocabulary_hash;
  std::size_t vocabulary_size = 0;
  bool converged = true;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<FoldResult> folds;
  ConfusionMatrix pooled;
  double pooled_accuracy = 0.0;
  std::vector<std::string> warnings;
  std::size_t nonconverged_folds = 0;
  double wall_time_seconds = 0.0;

  std::vector<double> fold_accuracies() const {
    std::vector<double> out;
    for (const auto& f : folds) out.push_back(f.accuracy);
    return out;
  }
};

namespace detail {

inline FoldResult run_fold(const LabeledDataset& dataset, std::span<const FeatureCounts> counts,
                           const std::vector<std::size_t>& test, const ExperimentConfig& config,
                           std::vector<std::string>& warnings) {
  std::vector<char> is_test(dataset.size(), 0);
  for (auto i : test) is_test[i] = 1;
  std::vector<FeatureCounts> train_counts;
  std::vector<std::string> train_labels;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (is_test[i]) continue;
    train_counts.push_back(counts[i]);
    train_labels.push_back(dataset[i].label);
  }
  FoldResult fold;
  fold.test_indices = test;
  if (train_counts.empty()) throw InvalidArgument("fold leaves no training documents");

  auto vocab = std::make_shared<const FeatureVocabulary>(build_vocabulary(train_counts));
  fold.vocabulary_hash = vocab->hash();
  fold.vocabulary_size = vocab->size();

  const std::set<std::string> train_label_set(train_labels.begin(), train_labels.end());
  std::set<std::string> test_label_set;
  for (auto i : test) test_label_set.insert(dataset[i].label);
  if (test_label_set.size() == 1 && dataset.label_space().size() > 1)
    warnings.push_back("test fold holds a single label ('" + *test_label_set.begin() + "')");

  if (train_label_set.size() < 2) {
    warnings.push_back("training folds hold a single label; predicting it for every test document");
    fold.predicted.assign(test.size(), *train_label_set.begin());
  } else {
    const auto train_x = tfidf_all(train_counts, *vocab);
    const auto model = train_ovr(train_x, train_labels, vocab, config.solver, 1);
    fold.converged = model.all_converged();
    for (auto i : test) fold.predicted.push_back(predict(model, tfidf(counts[i], *vocab)).label);
  }
  std::size_t correct = 0;
  for (std::size_t t = 0; t < test.size(); ++t)
    if (fold.predicted[t] == dataset[test[t]].label) ++correct;
  fold.accuracy = test.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(test.size());
  return fold;
}

}  // namespace detail

// Cross-validation over an explicit fold plan. For every fold, vocabulary,
// idf and model are fit on the remaining folds only.
inline ExperimentReport cross_validate(const LabeledDataset& dataset, const FoldPlan& plan,
                                       const ExperimentConfig& config, unsigned workers = 1,
                                       const SuffixLexicon& lexicon = default_suffix_lexicon()) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.config = config;
  report.warnings = plan.warnings;

  const auto counts = extract_dataset(dataset, config.specs, lexicon, config.projection, workers);
  std::vector<FoldResult> folds(plan.folds.size());
  std::vector<std::vector<std::string>> fold_warnings(plan.folds.size());
  parallel_for(plan.folds.size(), workers, [&](std::size_t f) {
    folds[f] = detail::run_fold(dataset, counts, plan.folds[f], config, fold_warnings[f]);
  });

  report.pooled = ConfusionMatrix(dataset.label_space());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    for (const auto& w : fold_warnings[f]) report.warnings.push_back("fold " + std::to_string(f + 1) + ": " + w);
    if (!folds[f].converged) ++report.nonconverged_folds;
    for (std::size_t t = 0; t < folds[f].test_indices.size(); ++t)
      report.pooled.add(folds[f].predicted[t], dataset[folds[f].test_indices[t]].label);
  }
  report.folds = std::move(folds);
  report.pooled_accuracy = accuracy(report.pooled);
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

inline ExperimentReport cross_validate(const LabeledDataset& dataset, const ExperimentConfig& config,
                                       unsigned workers = 1,
                                       const SuffixLexicon& lexicon = default_suffix_lexicon()) {
  config.validate();
  return cross_validate(dataset, make_folds(dataset.labels(), config.k, config.seed), config, workers,
                        lexicon);
}

inline nlohmann::json report_to_json(const ExperimentReport& r, bool include_timing = false) {
  nlohmann::json j;
  std::vector<std::string> features;
  for (const auto& s : r.config.specs) features.push_back(s.name());
  j["config"] = {{"dataset", r.config.dataset_id},
                 {"features", features},
                 {"k", r.config.k},
                 {"seed", r.config.seed},
                 {"c", r.config.solver.c},
                 {"tol", r.config.solver.tol},
                 {"max_epochs", r.config.solver.max_epochs},
                 {"coarse_ms_tags", r.config.projection.coarse_ms_tags}};
  auto& folds = j["folds"] = nlohmann::json::array();
  for (const auto& f : r.folds)
    folds.push_back({{"size", f.test_indices.size()},
                     {"accuracy", f.accuracy},
                     {"vocabulary_hash", f.vocabulary_hash},
                     {"vocabulary_size", f.vocabulary_size},
                     {"converged", f.converged}});
  j["confusion"] = {{"labels", r.pooled.labels()}, {"cells", r.pooled.cells()}};
  j["accuracy"] = r.pooled_accuracy;
  j["warnings"] = r.warnings;
  j["nonconverged_folds"] = r.nonconverged_folds;
  if (include_timing) j["wall_time_seconds"] = r.wall_time_seconds;
  return j;
}

struct GridCell {
  std::optional<ExperimentReport> report;
  std::string error;
  std::string mark;  // "top", "bottom" or empty
};

// Rows are feature sets, columns datasets, both in order of first
// appearance in the config list.
struct GridResult {
  std::vector<std::string> rows;
  std::vector<std::string> columns;
  std::vector<std::vector<GridCell>> cells;  // [row][column]

  bool any_failed() const {
    for (const auto& row : cells)
      for (const auto& c : row)
        if (!c.error.empty()) return true;
    return false;
  }
};

inline constexpr std::size_t kGridMarkCount = 5;

// Runs every config; a failing config is recorded and the grid carries on.
// Per column, the five best rows are marked "top" and the five worst
// "bottom" (ties resolved by row order).
inline GridResult run_grid(const std::vector<ExperimentConfig>& configs,
                           const std::map<std::string, const LabeledDataset*>& datasets,
                           unsigned workers = 1,
                           const SuffixLexicon& lexicon = default_suffix_lexicon()) {
  GridResult grid;
  std::vector<std::pair<std::size_t, std::size_t>> pos;
  for (const auto& c : configs) {
    const auto name = c.feature_set_name();
    auto r = std::find(grid.rows.begin(), grid.rows.end(), name);
    if (r == grid.rows.end()) r = grid.rows.insert(grid.rows.end(), name);
    auto col = std::find(grid.columns.begin(), grid.columns.end(), c.dataset_id);
    if (col == grid.columns.end()) col = grid.columns.insert(grid.columns.end(), c.dataset_id);
    pos.emplace_back(r - grid.rows.begin(), col - grid.columns.begin());
  }
  grid.cells.assign(grid.rows.size(), std::vector<GridCell>(grid.columns.size()));
  for (auto& row : grid.cells)
    for (auto& cell : row) cell.error = "not run";

  std::vector<GridCell> results(configs.size());
  parallel_for(configs.size(), workers, [&](std::size_t i) {
    try {
      const auto it = datasets.find(configs[i].dataset_id);
      if (it == datasets.end() || !it->second)
        throw InvalidArgument("unknown dataset '" + configs[i].dataset_id + "'");
      results[i].report = cross_validate(*it->second, configs[i], 1, lexicon);
    } catch (const std::exception& e) {
      results[i].error = e.what();
    }
  });
  for (std::size_t i = 0; i < configs.size(); ++i)
    grid.cells[pos[i].first][pos[i].second] = std::move(results[i]);

  for (std::size_t col = 0; col < grid.columns.size(); ++col) {
    std::vector<std::size_t> ok;
    for (std::size_t r = 0; r < grid.rows.size(); ++r)
      if (grid.cells[r][col].report) ok.push_back(r);
    std::stable_sort(ok.begin(), ok.end(), [&](auto a, auto b) {
      return grid.cells[a][col].report->pooled_accuracy > grid.cells[b][col].report->pooled_accuracy;
    });
    for (std::size_t i = 0; i < ok.size() && i < kGridMarkCount; ++i) grid.cells[ok[i]][col].mark = "top";
    for (std::size_t i = 0; i < ok.size() && i < kGridMarkCount; ++i) {
      auto& cell = grid.cells[ok[ok.size() - 1 - i]][col];
      if (cell.mark.empty()) cell.mark = "bottom";
    }
  }
  return grid;
}

// Accuracy table, rows = feature sets, columns = datasets. With `marked`,
// top cells are wrapped in ** and bottom cells in _.
inline void write_grid_tsv(std::ostream& out, const GridResult& grid, bool marked = false) {
  out << "features";
  for (const auto& c : grid.columns) out << '\t' << c;
  out << '\n';
  for (std::size_t r = 0; r < grid.rows.size(); ++r) {
    out << grid.rows[r];
    for (std::size_t c = 0; c < grid.columns.size(); ++c) {
      const auto& cell = grid.cells[r][c];
      out << '\t';
      if (!cell.report) {
        out << "ERR";
        continue;
      }
      const auto v = format_fixed(cell.report->pooled_accuracy, 4);
      if (marked && cell.mark == "top") {
        out << "**" << v << "**";
      } else if (marked && cell.mark == "bottom") {
        out << '_' << v << '_';
      } else {
        out << v;
      }
    }
    out << '\n';
  }
}

inline nlohmann::json grid_to_json(const GridResult& grid, bool include_timing = false) {
  nlohmann::json j;
  j["rows"] = grid.rows;
  j["columns"] = grid.columns;
  auto& cells = j["cells"] = nlohmann::json::array();
  for (std::size_t r = 0; r < grid.rows.size(); ++r) {
    for (std::size_t c = 0; c < grid.columns.size(); ++c) {
      const auto& cell = grid.cells[r][c];
      nlohmann::json e{{"row", grid.rows[r]}, {"column", grid.columns[c]}, {"mark", cell.mark}};
      if (cell.report) {
        e["accuracy"] = cell.report->pooled_accuracy;
        e["report"] = report_to_json(*cell.report, include_timing);
      } else {
        e["error"] = cell.error;
      }
      cells.push_back(std::move(e));
    }
  }
  return j;
}

}  // namespace nli

#endif  // NLI_EVALUATE_HPP
