#ifndef NLI_PLATT_HPP
#define NLI_PLATT_HPP

#include <cmath>
#include <cstddef>
#include <span>

#include "nli/error.hpp"

namespace nli {

// Sigmoid calibration p(s) = 1 / (1 + exp(a*s + b)). A model whose scores
// grow with the positive class gets a < 0.
struct PlattParams {
  double a = 0.0;
  double b = 0.0;

  double probability(double score) const {
    const double z = a * score + b;
    // Evaluate on the side that cannot overflow.
    if (z >= 0.0) {
      const double e = std::exp(-z);
      return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
  }
};

struct PlattTargets {
  double positive;  // (N+ + 1) / (N+ + 2)
  double negative;  // 1 / (N- + 2)
};

inline PlattTargets platt_targets(std::span<const int> targets) {
  double np = 0.0;
  double nn = 0.0;
  for (int t : targets) (t > 0 ? np : nn) += 1.0;
  return {(np + 1.0) / (np + 2.0), 1.0 / (nn + 2.0)};
}

// Negative log-likelihood of the smoothed targets under (a, b).
inline double platt_nll(std::span<const double> scores, std::span<const int> targets,
                        const PlattParams& p) {
  const auto tg = platt_targets(targets);
  double f = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double t = targets[i] > 0 ? tg.positive : tg.negative;
    const double z = p.a * scores[i] + p.b;
    f += z >= 0.0 ? t * z + std::log1p(std::exp(-z)) : (t - 1.0) * z + std::log1p(std::exp(z));
  }
  return f;
}

// Newton iteration with backtracking line search on the two-parameter NLL.
inline PlattParams fit_platt(std::span<const double> scores, std::span<const int> targets) {
  if (scores.size() != targets.size()) throw InvalidArgument("fit_platt: size mismatch");
  std::size_t np = 0;
  std::size_t nn = 0;
  for (int t : targets) {
    if (t == 1) {
      ++np;
    } else if (t == -1) {
      ++nn;
    } else {
      throw InvalidArgument("fit_platt: targets must be +1 or -1");
    }
  }
  if (np == 0 || nn == 0) throw InvalidArgument("fit_platt: both target signs are required");

  const auto tg = platt_targets(targets);
  bool constant = true;
  for (double s : scores) constant = constant && s == scores[0];
  if (constant) {
    // No information in the scores: every input gets the smoothed rate.
    const double rate = (static_cast<double>(np) * tg.positive +
                         static_cast<double>(nn) * tg.negative) /
                        static_cast<double>(np + nn);
    return {0.0, std::log((1.0 - rate) / rate)};
  }

  constexpr int kMaxIter = 200;
  constexpr double kMinStep = 1e-12;
  constexpr double kSigma = 1e-12;  // Hessian ridge
  constexpr double kGradTol = 1e-11;

  PlattParams p{0.0, std::log((static_cast<double>(nn) + 1.0) / (static_cast<double>(np) + 1.0))};
  double fval = platt_nll(scores, targets, p);
  for (int iter = 0; iter < kMaxIter; ++iter) {
    double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const double t = targets[i] > 0 ? tg.positive : tg.negative;
      const double prob = p.probability(scores[i]);
      const double d2 = prob * (1.0 - prob);
      h11 += scores[i] * scores[i] * d2;
      h22 += d2;
      h21 += scores[i] * d2;
      const double d1 = t - prob;
      g1 += scores[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < kGradTol && std::abs(g2) < kGradTol) break;
    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    bool moved = false;
    while (step >= kMinStep) {
      const PlattParams cand{p.a + step * da, p.b + step * db};
      const double f = platt_nll(scores, targets, cand);
      if (f <= fval + 1e-4 * step * gd) {
        moved = cand.a != p.a || cand.b != p.b;
        p = cand;
        fval = f;
        break;
      }
      step /= 2.0;
    }
    if (!moved) break;
  }
  if (!std::isfinite(p.a) || !std::isfinite(p.b)) throw Error("fit_platt: non-finite parameters");
  return p;
}

}  // namespace nli

#endif  // NLI_PLATT_HPP
