#ifndef NLI_SVM_HPP
#define NLI_SVM_HPP

// L2-regularised L1-hinge linear SVM trained by dual coordinate descent.
//
//   min_w  1/2 |w|^2 + C sum_i max(0, 1 - y_i w.x_i)
//   dual:  min_a 1/2 a'Qa - sum a_i,  0 <= a_i <= C,  Q_ij = y_i y_j x_i.x_j
//
// The bias is an extra weight on a constant feature of value 1, so it is
// regularised together with w.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "nli/error.hpp"
#include "nli/util.hpp"
#include "nli/vectorize.hpp"

namespace nli {

struct SolverParams {
  double c = 1.0;
  double tol = 1e-4;
  int max_epochs = 1000;
  std::uint64_t seed = 1;
};

struct BinarySolution {
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> alpha;
  int epochs = 0;
  bool converged = false;
  double max_violation = 0.0;  // largest projected gradient in the last epoch
};

namespace detail {

inline void check_binary_problem(std::span<const SparseVector> x, std::span<const int> y,
                                 std::size_t dim) {
  if (x.size() != y.size()) throw InvalidArgument("vector and target counts differ");
  bool pos = false;
  bool neg = false;
  for (int t : y) {
    if (t == 1) {
      pos = true;
    } else if (t == -1) {
      neg = true;
    } else {
      throw InvalidArgument("targets must be +1 or -1");
    }
  }
  if (!pos || !neg) throw InvalidArgument("training needs both positive and negative targets");
  for (const auto& v : x)
    if (v.extent() > dim) throw InvalidArgument("vector index exceeds model dimension");
}

inline double margin(const SparseVector& v, std::span<const double> w, double b) {
  return v.dot(w) + b;
}

}  // namespace detail

// Largest projected-gradient magnitude at (alpha, w, b): zero exactly at a
// KKT point of the box-constrained dual.
inline double kkt_violation(std::span<const double> alpha, std::span<const double> w, double b,
                            std::span<const SparseVector> x, std::span<const int> y, double c) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double g = y[i] * detail::margin(x[i], w, b) - 1.0;
    double pg = g;
    if (alpha[i] <= 0.0) {
      pg = std::min(g, 0.0);
    } else if (alpha[i] >= c) {
      pg = std::max(g, 0.0);
    }
    worst = std::max(worst, std::abs(pg));
  }
  return worst;
}

inline BinarySolution train_binary(std::span<const SparseVector> x, std::span<const int> y,
                                   std::size_t dim, const SolverParams& params = {}) {
  detail::check_binary_problem(x, y, dim);
  if (!(params.c > 0.0)) throw InvalidArgument("C must be positive");
  if (!(params.tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (params.max_epochs < 1) throw InvalidArgument("max_epochs must be at least 1");

  const std::size_t n = x.size();
  const double c = params.c;
  BinarySolution sol;
  sol.weights.assign(dim, 0.0);
  sol.alpha.assign(n, 0.0);
  std::vector<double> qii(n);
  for (std::size_t i = 0; i < n; ++i) qii[i] = x[i].squared_norm() + 1.0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(params.seed);
  auto& w = sol.weights;
  double& b = sol.bias;

  for (int epoch = 1; epoch <= params.max_epochs; ++epoch) {
    rng.shuffle(order);
    double max_pg = 0.0;
    for (std::size_t i : order) {
      const double yi = y[i];
      const double g = yi * detail::margin(x[i], w, b) - 1.0;
      double& a = sol.alpha[i];
      double pg = g;
      if (a <= 0.0) {
        pg = std::min(g, 0.0);
      } else if (a >= c) {
        pg = std::max(g, 0.0);
      }
      max_pg = std::max(max_pg, std::abs(pg));
      if (pg == 0.0) continue;
      const double updated = std::clamp(a - g / qii[i], 0.0, c);
      const double step = (updated - a) * yi;
      a = updated;
      if (step == 0.0) continue;
      for (const auto& e : x[i].entries) w[e.index] += step * e.weight;
      b += step;
    }
    sol.epochs = epoch;
    sol.max_violation = max_pg;
    if (max_pg < params.tol) {
      // The sweep saw gradients before its own updates; confirm at the
      // final point so converged solutions satisfy the tolerance exactly.
      sol.max_violation = kkt_violation(sol.alpha, w, b, x, y, c);
      if (sol.max_violation < params.tol) {
        sol.converged = true;
        break;
      }
    }
  }
  return sol;
}

inline double primal_objective(std::span<const double> w, double b, std::span<const SparseVector> x,
                               std::span<const int> y, double c) {
  double reg = b * b;
  for (double v : w) reg += v * v;
  double loss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    loss += std::max(0.0, 1.0 - y[i] * detail::margin(x[i], w, b));
  return 0.5 * reg + c * loss;
}

// Dual objective (to be maximised) of an alpha vector; w is rebuilt from
// alpha, not taken from the solver.
inline double dual_objective(std::span<const double> alpha, std::span<const SparseVector> x,
                             std::span<const int> y, std::size_t dim) {
  std::vector<double> w(dim, 0.0);
  double b = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += alpha[i];
    for (const auto& e : x[i].entries) w[e.index] += alpha[i] * y[i] * e.weight;
    b += alpha[i] * y[i];
  }
  double sq = b * b;
  for (double v : w) sq += v * v;
  return sum - 0.5 * sq;
}

}  // namespace nli

#endif  // NLI_SVM_HPP
