#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "crest/decision.hpp"
#include "crest/gram.hpp"

namespace crest {

/// One iterate of batch gradient descent on the decision layer.
/// `diverged` is set once a step produces a non-finite weight; the iterate
/// is kept as-is for inspection.
struct GDState {
  DecisionWeights weights;
  std::int64_t iteration = 0;
  double alpha = 0.0;
  bool diverged = false;
};

enum class Regime { Divergent, Oscillatory, Convergent, Stalled };

struct RegimeReport {
  Regime regime;
  double alpha_lambda_max = 0.0;
  double alpha_lambda_min = 0.0;
};

/// One step of the plain recursion w <- [I - alpha YY'] w + alpha M.
GDState gd_step(const GDState &state, const GramSystem &gs,
                const ClassSums &ms);

/// The n-th iterate of the plain recursion, evaluated directly through the
/// eigendecomposition of the Gram matrix instead of by iterating.
DecisionWeights closed_form_trajectory(const DecisionWeights &w0,
                                       const GramSystem &gs,
                                       const ClassSums &ms, double alpha,
                                       std::int64_t n);

/// Learning-rate regime from the eigenvalue extremes: divergent when
/// alpha*lambda_max > 2, oscillatory in (1, 2], stalled when
/// alpha*lambda_min <= 0.0025, convergent otherwise.
RegimeReport classify_regime(const SpectralSummary &ss, double alpha);

/// One step of the rho-preconditioned recursion
/// w <- w + alpha * rho [M - YY' w], realized as a solve against the cached
/// factorization. The error contracts by exactly (1 - alpha) per step,
/// independent of conditioning.
GDState modified_gd_step(const GDState &state, const GramSystem &gs,
                         const ClassSums &ms);

const char *regime_name(Regime r);

}  // namespace crest
