#pragma once

#include <cmath>
#include <vector>

#include "algebra.hpp"
#include "random.hpp"

namespace gnslab::oracle {

/// Lower bound for ||s1 - s2|| = sup_{||A|| <= 1} |(s1 - s2)(A)|, found by
/// sampling block unitaries and hill-climbing from the best sample. Uses
/// only `evaluate`, never a singular value decomposition.
inline double sampled_dual_norm(const State& s1, const State& s2, Rng& rng, int samples, int climb_steps) {
  const CStarAlgebra& alg = s1.algebra();
  auto value = [&](const std::vector<CMatrix>& blocks) {
    const AlgebraElement a(alg, blocks);
    return std::abs(evaluate(s1, a) - evaluate(s2, a));
  };
  auto random_element = [&] {
    std::vector<CMatrix> b;
    for (int n : alg.block_dims()) b.push_back(rng.unitary(n));
    return b;
  };

  std::vector<CMatrix> best = random_element();
  double best_value = value(best);
  for (int s = 1; s < samples; ++s) {
    auto cand = random_element();
    const double v = value(cand);
    if (v > best_value) {
      best_value = v;
      best = std::move(cand);
    }
  }

  // (1+1) evolution strategy with the one-fifth success rule.
  double step = 0.5;
  for (int it = 0; it < climb_steps && step > 1e-9; ++it) {
    std::vector<CMatrix> cand = best;
    for (auto& u : cand) {
      CMatrix h = rng.hermitian(u.rows());
      h /= std::max(1e-300, h.norm());
      u = matrix_exp(cplx(0.0, step) * h) * u;
    }
    const double v = value(cand);
    if (v > best_value) {
      best_value = v;
      best = std::move(cand);
      step *= 1.5;
    } else {
      step *= 0.9;
    }
  }
  return best_value;
}

/// exp(t delta)(A) by the truncated series sum_k (t delta)^k (A) / k!.
inline AlgebraElement derivation_series(const Derivation& d, double t, const AlgebraElement& a, int terms) {
  AlgebraElement term = a;
  AlgebraElement sum = a;
  for (int k = 1; k < terms; ++k) {
    term = cplx(t / k) * d.apply(term);
    sum = sum + term;
  }
  return sum;
}

}  // namespace gnslab::oracle
