#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "test_support.hpp"

namespace nli {
namespace {

SparseVector sv(std::vector<SparseEntry> e) { return SparseVector{std::move(e)}; }

TEST(TrainBinary, TwoPointMaxMargin) {
  const std::vector<SparseVector> x = {sv({{0, 1.0}}), sv({{0, -1.0}})};
  const std::vector<int> y = {1, -1};
  SolverParams p;
  p.c = 1e6;
  const auto sol = train_binary(x, y, 2, p);
  EXPECT_TRUE(sol.converged);
  EXPECT_NEAR(sol.weights[0], 1.0, 1e-3);
  EXPECT_NEAR(sol.weights[1], 0.0, 1e-3);
  EXPECT_NEAR(sol.bias, 0.0, 1e-3);
}

TEST(TrainBinary, ConflictingDuplicatesStayBounded) {
  const std::vector<SparseVector> x = {sv({{0, 1.0}}), sv({{0, 1.0}}), sv({{0, 1.0}}), sv({{1, 1.0}})};
  const std::vector<int> y = {1, -1, 1, -1};
  SolverParams p;
  p.c = 10;
  const auto sol = train_binary(x, y, 2, p);
  for (double a : sol.alpha) {
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, p.c);
  }
  for (double w : sol.weights) EXPECT_TRUE(std::isfinite(w));
  EXPECT_LT(std::abs(sol.weights[0]) + std::abs(sol.weights[1]) + std::abs(sol.bias), 4 * p.c * 2);
}

TEST(TrainBinary, RejectsBadProblems) {
  const std::vector<SparseVector> x = {sv({{0, 1.0}}), sv({{3, 1.0}})};
  EXPECT_THROW(train_binary(x, std::vector<int>{1, 1}, 4), InvalidArgument);
  EXPECT_THROW(train_binary(x, std::vector<int>{1, 0}, 4), InvalidArgument);
  EXPECT_THROW(train_binary(x, std::vector<int>{1, -1}, 2), InvalidArgument);
  EXPECT_THROW(train_binary(x, std::vector<int>{1}, 4), InvalidArgument);
}

TEST(TrainBinary, MatchesReferenceDualSolver) {
  Rng rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    const auto pts = oracle::random_points(rng, 10);
    const auto x = oracle::as_sparse(pts);
    const auto y = oracle::targets_of(pts);
    SolverParams p;
    p.seed = static_cast<std::uint64_t>(trial);
    const auto sol = train_binary(x, y, 2, p);
    ASSERT_TRUE(sol.converged);
    const double ours = primal_objective(sol.weights, sol.bias, x, y, p.c);
    const double ref = oracle::primal_2d(oracle::reference_svm_2d(pts, p.c), pts, p.c);
    EXPECT_NEAR(ours, ref, 1e-4 * ref) << "trial " << trial;
    // independent evaluation of the objective agrees with the library's
    EXPECT_NEAR(ours, oracle::primal_2d({sol.weights[0], sol.weights[1], sol.bias}, pts, p.c), 1e-12);
  }
}

TEST(TrainBinary, DualityGapAndKkt) {
  Rng rng(8);
  for (int trial = 0; trial < 25; ++trial) {
    const auto pts = oracle::random_points(rng, 10 + trial);
    const auto x = oracle::as_sparse(pts);
    const auto y = oracle::targets_of(pts);
    SolverParams p;
    p.c = 0.1 + trial * 0.2;
    const auto sol = train_binary(x, y, 2, p);
    ASSERT_TRUE(sol.converged);
    const double primal = primal_objective(sol.weights, sol.bias, x, y, p.c);
    const double dual = dual_objective(sol.alpha, x, y, 2);
    EXPECT_GE(primal, dual - 1e-12);
    EXPECT_LT(primal - dual, 1e-3 * std::abs(primal));
    EXPECT_LT(kkt_violation(sol.alpha, sol.weights, sol.bias, x, y, p.c), p.tol);
  }
}

TEST(TrainBinary, DeterministicAndAntisymmetricUnderLabelFlip) {
  Rng rng(2);
  const auto pts = oracle::random_points(rng, 30);
  const auto x = oracle::as_sparse(pts);
  auto y = oracle::targets_of(pts);
  const auto a = train_binary(x, y, 2);
  const auto b = train_binary(x, y, 2);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.bias, b.bias);
  for (auto& t : y) t = -t;
  const auto flipped = train_binary(x, y, 2);
  ASSERT_EQ(flipped.weights.size(), a.weights.size());
  for (std::size_t i = 0; i < a.weights.size(); ++i) EXPECT_EQ(flipped.weights[i], -a.weights[i]);
  EXPECT_EQ(flipped.bias, -a.bias);
}

TEST(DecisionScore, Examples) {
  BinaryLinearModel m;
  m.weights = {0.5, -2.0, 0.0};
  m.bias = 0.25;
  EXPECT_EQ(decision_score(m, SparseVector{}), 0.25);
  EXPECT_EQ(decision_score(m, sv({{1, 1.0}})), -1.75);
  BinaryLinearModel zero;
  zero.weights.assign(3, 0.0);
  zero.bias = -0.5;
  EXPECT_EQ(decision_score(zero, sv({{0, 3.0}, {2, 1.0}})), -0.5);
  EXPECT_THROW(decision_score(m, sv({{3, 1.0}})), InvalidArgument);
}

TEST(Platt, ExampleIsIncreasingAboveHalf) {
  const std::vector<double> s = {-2, -1, 1, 2};
  const std::vector<int> y = {-1, -1, 1, 1};
  const auto p = fit_platt(s, y);
  EXPECT_LT(p.a, 0.0);
  EXPECT_GT(p.probability(2), p.probability(1));
  EXPECT_GT(p.probability(1), 0.5);
  const auto [ra, rb] = oracle::reference_platt(s, y);
  EXPECT_NEAR(p.a, ra, 1e-4);
  EXPECT_NEAR(p.b, rb, 1e-4);
}

TEST(Platt, ConstantScoresGiveSmoothedRate) {
  const std::vector<double> s = {0.3, 0.3, 0.3, 0.3, 0.3};
  const std::vector<int> y = {1, -1, -1, 1, -1};
  const auto p = fit_platt(s, y);
  // smoothed targets 3/4 for the 2 positives, 1/5 for the 3 negatives
  const double rate = (2 * 0.75 + 3 * 0.2) / 5;
  for (double q : {-10.0, 0.0, 0.3, 7.0}) EXPECT_NEAR(p.probability(q), rate, 1e-12);
}

TEST(Platt, AgreesWithReferenceAndIsMonotone) {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const auto [s, y] = oracle::random_scores(rng, 12 + 3 * trial);
    const auto p = fit_platt(s, y);
    const auto [ra, rb] = oracle::reference_platt(s, y);
    EXPECT_NEAR(p.a, ra, 1e-4);
    EXPECT_NEAR(p.b, rb, 1e-4);
    EXPECT_LE(platt_nll(s, y, p), platt_nll(s, y, {ra, rb}) + 1e-9);
    double last = 0;
    for (double q = -5; q <= 5; q += 0.01) {
      const double prob = p.probability(q);
      EXPECT_GE(prob, last);
      EXPECT_GT(prob, 0.0);
      EXPECT_LT(prob, 1.0);
      last = prob;
    }
  }
}

TEST(Platt, SingleSignRejected) {
  EXPECT_THROW(fit_platt(std::vector<double>{1, 2}, std::vector<int>{1, 1}), InvalidArgument);
}

TEST(TrainOvr, TwoLabelsPartitionPositives) {
  const auto ds = synthetic::make_planted({2, 20, 60, 0.05, 200, 1});
  const auto v = test::vectorize(ds);
  const auto model = train_ovr(v.x, v.labels, v.vocabulary);
  EXPECT_EQ(model.labels(), (std::vector<std::string>{"ARA", "CHI"}));
  EXPECT_EQ(model.dimension, v.vocabulary->size());
  EXPECT_EQ(model.vocabulary_hash, v.vocabulary->hash());
  EXPECT_TRUE(model.all_converged());
}

TEST(TrainOvr, PlantedModelsScoreOwnDocumentsHigher) {
  const auto ds = synthetic::make_planted({11, 15, 80, 0.05, 300, 3});
  const auto v = test::vectorize(ds);
  const auto model = train_ovr(v.x, v.labels, v.vocabulary);
  for (const auto& m : model.models) {
    double own = 0, foreign = 0;
    std::size_t n_own = 0, n_foreign = 0;
    for (std::size_t i = 0; i < v.x.size(); ++i) {
      const double s = decision_score(m, v.x[i]);
      if (v.labels[i] == m.positive_label) {
        own += s;
        ++n_own;
      } else {
        foreign += s;
        ++n_foreign;
      }
    }
    EXPECT_GT(own / n_own, foreign / n_foreign) << m.positive_label;
  }
  // a training document is predicted as its own label
  for (std::size_t i = 0; i < v.x.size(); i += 7) EXPECT_EQ(predict(model, v.x[i]).label, v.labels[i]);
}

TEST(TrainOvr, SingleDocumentLabelIsTrainable) {
  auto docs = synthetic::make_planted({2, 10, 40, 0.05, 100, 4}).documents();
  docs[0].label = "ZZZ";
  const LabeledDataset ds(docs);
  const auto v = test::vectorize(ds);
  const auto model = train_ovr(v.x, v.labels, v.vocabulary);
  EXPECT_EQ(model.models.size(), 3u);
  const auto& lone = model.at("ZZZ");
  EXPECT_TRUE(std::isfinite(lone.platt.a) && std::isfinite(lone.platt.b));
  EXPECT_TRUE(lone.calibration_fallback);
}

TEST(Predict, ZeroVectorIsDeterministicAndFollowsBiasTerms) {
  const auto ds = synthetic::make_planted({3, 12, 50, 0.05, 150, 9});
  const auto v = test::vectorize(ds);
  const auto model = train_ovr(v.x, v.labels, v.vocabulary);
  const auto a = predict(model, SparseVector{});
  const auto b = predict(model, SparseVector{});
  EXPECT_EQ(a.label, b.label);
  std::string best;
  double best_p = -1;
  for (const auto& m : model.models) {
    const double p = m.platt.probability(m.bias);
    if (p > best_p) {
      best_p = p;
      best = m.positive_label;
    }
  }
  EXPECT_EQ(a.label, best);
}

TEST(Predict, MirroredModelsTieToFirstLabel) {
  MulticlassModel model;
  model.dimension = 2;
  BinaryLinearModel a, b;
  a.positive_label = "B";
  a.weights = {1.0, -1.0};
  a.platt = {-1.0, 0.0};
  b.positive_label = "A";
  b.weights = {-1.0, 1.0};
  b.platt = {-1.0, 0.0};
  model.models = {b, a};
  const auto p = predict(model, sv({{0, 0.5}, {1, 0.5}}));
  EXPECT_EQ(p.label, "A");
  EXPECT_TRUE(p.tie);
  EXPECT_EQ(predict(model, sv({{0, 1.0}})).label, "B");
  EXPECT_FALSE(predict(model, sv({{0, 1.0}})).tie);
  EXPECT_THROW(predict(model, sv({{2, 1.0}})), InvalidArgument);
}

TEST(Predict, ScalingInputsWithMatchingCKeepsTrainingArgmax) {
  const auto ds = synthetic::make_planted({3, 15, 60, 0.08, 150, 21});
  const auto v = test::vectorize(ds);
  const double gamma = 2.0;
  std::vector<SparseVector> scaled = v.x;
  for (auto& x : scaled)
    for (auto& e : x.entries) e.weight *= gamma;
  SolverParams base, adjusted;
  adjusted.c = base.c / (gamma * gamma);
  const auto m1 = train_ovr(v.x, v.labels, v.vocabulary->size(), base);
  const auto m2 = train_ovr(scaled, v.labels, v.vocabulary->size(), adjusted);
  for (std::size_t i = 0; i < v.x.size(); ++i)
    EXPECT_EQ(predict(m1, v.x[i]).label, predict(m2, scaled[i]).label) << i;
}

TEST(ModelIo, RoundTripAndHashRefusal) {
  const auto ds = synthetic::make_planted({3, 10, 50, 0.05, 150, 5});
  const auto v = test::vectorize(ds);
  const auto model = train_ovr(v.x, v.labels, v.vocabulary);
  std::stringstream ss;
  write_model(ss, model);
  const auto back = read_model(ss, v.vocabulary);
  ASSERT_EQ(back.models.size(), model.models.size());
  for (std::size_t l = 0; l < model.models.size(); ++l) {
    EXPECT_EQ(back.models[l].weights, model.models[l].weights);
    EXPECT_EQ(back.models[l].bias, model.models[l].bias);
    EXPECT_EQ(back.models[l].platt.a, model.models[l].platt.a);
    EXPECT_EQ(back.models[l].platt.b, model.models[l].platt.b);
  }
  for (std::size_t i = 0; i < v.x.size(); ++i)
    EXPECT_EQ(predict(back, v.x[i]).probabilities, predict(model, v.x[i]).probabilities);

  const auto other = test::vectorize(synthetic::make_planted({3, 10, 50, 0.05, 150, 6}));
  std::stringstream again;
  write_model(again, model);
  EXPECT_THROW(read_model(again, other.vocabulary), ValidationError);
}

}  // namespace
}  // namespace nli
