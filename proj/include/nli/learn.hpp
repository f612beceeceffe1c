#ifndef NLI_LEARN_HPP
#define NLI_LEARN_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "nli/error.hpp"
#include "nli/platt.hpp"
#include "nli/svm.hpp"
#include "nli/util.hpp"
#include "nli/vectorize.hpp"

namespace nli {

struct BinaryLinearModel {
  std::string positive_label;
  std::vector<double> weights;
  double bias = 0.0;
  PlattParams platt;
  int epochs = 0;
  bool converged = true;
  bool calibration_fallback = false;  // Platt fit on in-sample scores

  double probability(double score) const { return platt.probability(score); }
};

inline double decision_score(const BinaryLinearModel& model, const SparseVector& v) {
  if (v.extent() > model.weights.size())
    throw InvalidArgument("decision_score: vector dimension exceeds model dimension");
  return v.dot(model.weights) + model.bias;
}

// One calibrated binary model per label, sorted by label.
struct MulticlassModel {
  std::vector<BinaryLinearModel> models;
  std::size_t dimension = 0;
  std::string vocabulary_hash;
  std::shared_ptr<const FeatureVocabulary> vocabulary;  // may be null

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& m : models) out.push_back(m.positive_label);
    return out;
  }

  const BinaryLinearModel& at(const std::string& label) const {
    for (const auto& m : models)
      if (m.positive_label == label) return m;
    throw InvalidArgument("model has no label '" + label + "'");
  }

  bool all_converged() const {
    return std::all_of(models.begin(), models.end(), [](const auto& m) { return m.converged; });
  }
};

namespace detail {

inline constexpr int kCalibrationFolds = 3;

// Splits [0, n) into `k` folds, dealing positives and negatives round-robin
// after a seeded shuffle of each group.
inline std::vector<int> inner_fold_assignment(std::span<const int> y, int k, std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] > 0 ? pos : neg).push_back(i);
  Rng rng(seed);
  rng.shuffle(pos);
  rng.shuffle(neg);
  std::vector<int> fold(y.size(), 0);
  std::size_t slot = 0;
  for (auto i : pos) fold[i] = static_cast<int>(slot++ % k);
  for (auto i : neg) fold[i] = static_cast<int>(slot++ % k);
  return fold;
}

inline BinaryLinearModel train_calibrated(std::span<const SparseVector> x, std::span<const int> y,
                                          std::size_t dim, const SolverParams& params,
                                          std::string label) {
  BinaryLinearModel model;
  model.positive_label = std::move(label);
  auto full = train_binary(x, y, dim, params);
  model.weights = std::move(full.weights);
  model.bias = full.bias;
  model.epochs = full.epochs;
  model.converged = full.converged;

  // Out-of-fold scores for calibration. A fold whose training part lacks
  // one of the signs is scored by the full model instead.
  std::vector<double> scores(x.size());
  const auto fold = inner_fold_assignment(y, kCalibrationFolds, params.seed ^ 0x5bd1e995ULL);
  for (int f = 0; f < kCalibrationFolds; ++f) {
    std::vector<SparseVector> train_x;
    std::vector<int> train_y;
    std::vector<std::size_t> held;
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (fold[i] == f) {
        held.push_back(i);
      } else {
        train_x.push_back(x[i]);
        train_y.push_back(y[i]);
        (y[i] > 0 ? pos : neg) = true;
      }
    }
    if (held.empty()) continue;
    if (!pos || !neg) {
      model.calibration_fallback = true;
      for (auto i : held) scores[i] = decision_score(model, x[i]);
      continue;
    }
    const auto part = train_binary(train_x, train_y, dim, params);
    model.converged = model.converged && part.converged;
    for (auto i : held) scores[i] = x[i].dot(part.weights) + part.bias;
  }
  model.platt = fit_platt(scores, y);
  return model;
}

}  // namespace detail

// One-vs-rest: for each label, its documents are positives and all others
// negatives. Labels are those present in `labels`.
inline MulticlassModel train_ovr(std::span<const SparseVector> x, std::span<const std::string> labels,
                                 std::size_t dim, const SolverParams& params = {},
                                 unsigned workers = 1) {
  if (x.size() != labels.size()) throw InvalidArgument("train_ovr: vector and label counts differ");
  const std::set<std::string> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) throw InvalidArgument("train_ovr: at least two labels are required");
  const std::vector<std::string> space(distinct.begin(), distinct.end());

  MulticlassModel model;
  model.dimension = dim;
  model.models.resize(space.size());
  parallel_for(space.size(), workers, [&](std::size_t l) {
    std::vector<int> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == space[l] ? 1 : -1;
    model.models[l] = detail::train_calibrated(x, y, dim, params, space[l]);
  });
  return model;
}

inline MulticlassModel train_ovr(std::span<const SparseVector> x, std::span<const std::string> labels,
                                 std::shared_ptr<const FeatureVocabulary> vocabulary,
                                 const SolverParams& params = {}, unsigned workers = 1) {
  auto model = train_ovr(x, labels, vocabulary->size(), params, workers);
  model.vocabulary_hash = vocabulary->hash();
  model.vocabulary = std::move(vocabulary);
  return model;
}

struct Prediction {
  std::string label;
  std::map<std::string, double> probabilities;
  std::map<std::string, double> scores;
  bool tie = false;  // another label reached the same probability
};

// Highest calibrated probability wins; equal probabilities resolve to the
// lexicographically first label.
inline Prediction predict(const MulticlassModel& model, const SparseVector& v) {
  if (model.models.empty()) throw InvalidArgument("predict: empty model");
  if (v.extent() > model.dimension) throw InvalidArgument("predict: vector dimension exceeds model");
  Prediction out;
  double best = -1.0;
  for (const auto& m : model.models) {
    const double s = decision_score(m, v);
    const double p = m.probability(s);
    out.scores[m.positive_label] = s;
    out.probabilities[m.positive_label] = p;
    if (p > best) {
      best = p;
      out.label = m.positive_label;
      out.tie = false;
    } else if (p == best) {
      out.tie = true;
    }
  }
  return out;
}

}  // namespace nli

#endif  // NLI_LEARN_HPP
