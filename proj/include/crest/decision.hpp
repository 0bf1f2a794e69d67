#pragma once

#include <Eigen/Dense>

#include "crest/dataset.hpp"
#include "crest/gram.hpp"

namespace crest {

/// Decision-layer weights, one column per class. The decision variable for
/// class i on feature vector y is z_i = columns.col(i).dot(y); the
/// predicted class is the argmax.
struct DecisionWeights {
  Eigen::MatrixXd columns;  // N x K
};

/// Stationary point of the sphere-constrained maximization of the total
/// correct-class decision value. `objective` is the attained maximum,
/// equal to sigma * Z.
struct LagrangianSolution {
  DecisionWeights weights;
  double Z = 0.0;
  double lambda = 0.0;
  double sigma = 1.0;
  double objective = 0.0;
};

enum class LossKind { CrossEntropy, Quadratic };

struct LossAndGrad {
  double loss = 0.0;
  Eigen::MatrixXd grad;  // N x K, column i = gradient w.r.t. w_i
};

/// Argmax class of the decision variables; ties resolve to the smallest
/// class index.
int predict(const DecisionWeights &w, const Eigen::VectorXd &y);

/// Fraction of dataset samples whose predicted class matches the label.
double accuracy(const DecisionWeights &w, const LabeledDataset &ds);

/// Softmax of a decision-variable vector, computed max-shifted so that it
/// is finite for any finite input.
Eigen::VectorXd softmax_posteriors(const Eigen::VectorXd &z);

/// Batch loss and its gradient with respect to each weight column.
///
/// Both losses have the form l(x) = -[z_c(x) - f(z)], so well-fit samples
/// drive the loss NEGATIVE; minimizing the loss maximizes the correct-class
/// margin term. For the quadratic loss, f = 0.5 * sum_i z_i^2 and the
/// gradient column is -[M_i - (YY')w_i]; for cross entropy, f = logsumexp
/// and the gradient column is -sum_x [delta_ic(x) - p_i(x)] y(x).
LossAndGrad loss_and_grad(LossKind kind, const DecisionWeights &w,
                          const LabeledDataset &ds);

/// Closed-form decision weights w_i = rho * M_i, computed by factorized
/// solve. This is the stationary point of the batch quadratic loss.
DecisionWeights computed_weights(const GramSystem &gs, const ClassSums &ms);

/// The constrained maximum sum_{i} M_i' rho M_i under sum z^2 = sigma^2.
/// Shared with the network objective.
double lagrangian_Z(const GramSystem &gs, const ClassSums &ms);

/// Full solution of the constrained maximization: weights (sigma/Z) rho M_i,
/// multiplier Z/(2 sigma), and the attained objective sigma * Z.
LagrangianSolution lagrangian_solve(const GramSystem &gs, const ClassSums &ms,
                                    double sigma = 1.0);

}  // namespace crest
