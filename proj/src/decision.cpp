#include "crest/decision.hpp"

#include <cmath>
#include <string>

#include "crest/errors.hpp"

namespace crest {

namespace {

void check_dims(const DecisionWeights &w, const LabeledDataset &ds) {
  if (w.columns.rows() != ds.dim()) {
    throw DimensionError("decision weights expect dimension " +
                         std::to_string(w.columns.rows()) + ", dataset has " +
                         std::to_string(ds.dim()));
  }
  if (w.columns.cols() != ds.num_classes) {
    throw DimensionError("decision weights cover " +
                         std::to_string(w.columns.cols()) +
                         " classes, dataset has " +
                         std::to_string(ds.num_classes));
  }
}

}  // namespace

int predict(const DecisionWeights &w, const Eigen::VectorXd &y) {
  if (w.columns.rows() != y.size()) {
    throw DimensionError("predict: feature vector of size " +
                         std::to_string(y.size()) + ", weights expect " +
                         std::to_string(w.columns.rows()));
  }
  int best = 0;
  double best_z = w.columns.col(0).dot(y);
  for (Eigen::Index i = 1; i < w.columns.cols(); ++i) {
    const double z = w.columns.col(i).dot(y);
    if (z > best_z) {
      best_z = z;
      best = static_cast<int>(i);
    }
  }
  return best;
}

double accuracy(const DecisionWeights &w, const LabeledDataset &ds) {
  check_dims(w, ds);
  // Matches per-sample predict(): column argmax with smallest-index ties.
  const Eigen::MatrixXd z = w.columns.transpose() * ds.features;
  Eigen::Index hits = 0;
  for (Eigen::Index j = 0; j < ds.size(); ++j) {
    int best = 0;
    for (Eigen::Index i = 1; i < z.rows(); ++i) {
      if (z(i, j) > z(best, j)) {
        best = static_cast<int>(i);
      }
    }
    if (best == ds.labels[static_cast<std::size_t>(j)]) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(ds.size());
}

Eigen::VectorXd softmax_posteriors(const Eigen::VectorXd &z) {
  const double shift = z.maxCoeff();
  Eigen::VectorXd p = (z.array() - shift).exp();
  return p / p.sum();
}

LossAndGrad loss_and_grad(LossKind kind, const DecisionWeights &w,
                          const LabeledDataset &ds) {
  check_dims(w, ds);
  const Eigen::MatrixXd m = class_sums(ds).columns;
  const Eigen::MatrixXd z = w.columns.transpose() * ds.features;  // K x |X|

  double correct_term = 0.0;
  for (Eigen::Index j = 0; j < ds.size(); ++j) {
    correct_term += z(ds.labels[static_cast<std::size_t>(j)], j);
  }

  LossAndGrad out;
  if (kind == LossKind::Quadratic) {
    out.loss = -(correct_term - 0.5 * z.squaredNorm());
    out.grad = -(m - ds.features * z.transpose());
  } else {
    double f_sum = 0.0;
    Eigen::MatrixXd p(z.rows(), z.cols());
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      const double shift = z.col(j).maxCoeff();
      Eigen::ArrayXd e = (z.col(j).array() - shift).exp();
      const double denom = e.sum();
      f_sum += shift + std::log(denom);
      p.col(j) = e / denom;
    }
    out.loss = -(correct_term - f_sum);
    out.grad = -(m - ds.features * p.transpose());
  }
  return out;
}

DecisionWeights computed_weights(const GramSystem &gs, const ClassSums &ms) {
  return DecisionWeights{gs.solve(ms.columns)};
}

double lagrangian_Z(const GramSystem &gs, const ClassSums &ms) {
  const Eigen::MatrixXd r = gs.solve(ms.columns);
  const double z_sq = (ms.columns.array() * r.array()).sum();
  return std::sqrt(std::max(z_sq, 0.0));
}

LagrangianSolution lagrangian_solve(const GramSystem &gs, const ClassSums &ms,
                                    double sigma) {
  if (!(sigma > 0.0)) {
    throw Error("sigma must be positive");
  }
  const Eigen::MatrixXd r = gs.solve(ms.columns);
  const double z_sq = (ms.columns.array() * r.array()).sum();
  const double z = std::sqrt(std::max(z_sq, 0.0));
  if (z == 0.0) {
    throw DegenerateObjectiveError(
        "degenerate objective: every class-sum vector is zero");
  }

  LagrangianSolution sol;
  sol.weights.columns = (sigma / z) * r;
  sol.Z = z;
  sol.sigma = sigma;
  sol.lambda = z / (2.0 * sigma);
  sol.objective = (sol.weights.columns.array() * ms.columns.array()).sum();
  return sol;
}

}  // namespace crest
