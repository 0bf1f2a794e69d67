#include "crest/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <string>

#include "crest/errors.hpp"

namespace crest {

namespace {

void check_dims(const GDState &state, const GramSystem &gs,
                const ClassSums &ms) {
  if (state.weights.columns.rows() != gs.dim() ||
      ms.columns.rows() != gs.dim() ||
      state.weights.columns.cols() != ms.columns.cols()) {
    throw DimensionError("gradient-descent state, Gram system, and class "
                         "sums have inconsistent dimensions");
  }
}

}  // namespace

GDState gd_step(const GDState &state, const GramSystem &gs,
                const ClassSums &ms) {
  check_dims(state, gs, ms);
  GDState next = state;
  next.weights.columns +=
      state.alpha * (ms.columns - gs.gram() * state.weights.columns);
  next.iteration = state.iteration + 1;
  if (!next.weights.columns.allFinite()) {
    next.diverged = true;
  }
  return next;
}

DecisionWeights closed_form_trajectory(const DecisionWeights &w0,
                                       const GramSystem &gs,
                                       const ClassSums &ms, double alpha,
                                       std::int64_t n) {
  if (n == 0) {
    return w0;
  }
  const Eigen::MatrixXd equilibrium = gs.solve(ms.columns);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gs.gram());
  if (es.info() != Eigen::Success) {
    throw Error("eigendecomposition of the Gram matrix did not converge");
  }
  Eigen::ArrayXd decay =
      (1.0 - alpha * es.eigenvalues().array()).pow(static_cast<double>(n));

  const Eigen::MatrixXd offset = w0.columns - equilibrium;
  Eigen::MatrixXd result =
      equilibrium + es.eigenvectors() *
                        (decay.matrix().asDiagonal() *
                         (es.eigenvectors().transpose() * offset));
  return DecisionWeights{std::move(result)};
}

RegimeReport classify_regime(const SpectralSummary &ss, double alpha) {
  if (!ss.lambda_max.has_value() || !ss.lambda_min.has_value()) {
    throw Error("regime classification needs exact eigen-extremes");
  }
  RegimeReport rep;
  rep.alpha_lambda_max = alpha * *ss.lambda_max;
  rep.alpha_lambda_min = alpha * *ss.lambda_min;
  if (rep.alpha_lambda_max > 2.0) {
    rep.regime = Regime::Divergent;
  } else if (rep.alpha_lambda_max > 1.0) {
    rep.regime = Regime::Oscillatory;
  } else if (rep.alpha_lambda_min <= 0.0025) {
    rep.regime = Regime::Stalled;
  } else {
    rep.regime = Regime::Convergent;
  }
  return rep;
}

GDState modified_gd_step(const GDState &state, const GramSystem &gs,
                         const ClassSums &ms) {
  check_dims(state, gs, ms);
  GDState next = state;
  next.weights.columns +=
      state.alpha *
      gs.solve(ms.columns - gs.gram() * state.weights.columns);
  next.iteration = state.iteration + 1;
  if (!next.weights.columns.allFinite()) {
    next.diverged = true;
  }
  return next;
}

const char *regime_name(Regime r) {
  switch (r) {
    case Regime::Divergent:
      return "divergent";
    case Regime::Oscillatory:
      return "oscillatory";
    case Regime::Convergent:
      return "convergent";
    case Regime::Stalled:
      return "stalled";
  }
  return "?";
}

}  // namespace crest
