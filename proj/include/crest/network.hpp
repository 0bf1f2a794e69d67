#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "crest/dataset.hpp"
#include "crest/decision.hpp"
#include "crest/gram.hpp"
#include "crest/trajectory.hpp"

namespace crest {

/// Feed-forward stack of weight matrices with hyperbolic-tangent
/// activation and no bias terms. layers[m] maps the layer-m input space
/// (rows = output width, cols = input width); the first layer's input
/// width must equal the data dimension.
struct LayerStack {
  std::vector<Eigen::MatrixXd> layers;

  Eigen::Index input_dim() const {
    return layers.empty() ? -1 : layers.front().cols();
  }
  Eigen::Index output_dim() const {
    return layers.empty() ? -1 : layers.back().rows();
  }
};

/// Activations of a stack over a whole dataset. inputs[m] holds the
/// layer-(m+1) input columns, so inputs[0] is the raw data and
/// inputs[num_layers] (= outputs()) is the feature matrix fed to the
/// decision layer. preactivations[m] holds layers[m] * inputs[m].
struct ForwardTrace {
  std::vector<Eigen::MatrixXd> inputs;
  std::vector<Eigen::MatrixXd> preactivations;

  const Eigen::MatrixXd &outputs() const { return inputs.back(); }
};

/// Per-layer quantities of linearized backpropagation: the decision
/// weights pulled back through transposed layer matrices, and the
/// residual-weighted input class vectors.
struct LinBPWorkspace {
  std::vector<Eigen::MatrixXd> equivalent_weights;  // [m]: out_m x K
  std::vector<Eigen::MatrixXd> class_vectors;       // [m]: in_m x K
  Eigen::MatrixXd z_values;                         // K x |X|
};

enum class TrainStatus { Completed, Diverged, SingularGram };

struct TrainResult {
  Trajectory trajectory;
  LayerStack stack;
  TrainStatus status = TrainStatus::Completed;
  std::string message;
};

/// Seeded uniform(-scale, +scale) stack over the given output widths.
/// scale <= 0 selects the default per-layer scale 1/sqrt(fan_in).
LayerStack random_stack(Eigen::Index data_dim,
                        const std::vector<Eigen::Index> &widths,
                        std::uint64_t seed, double scale = 0.0);

/// Run every sample through the stack: x^(m+1) = tanh(U^(m) x^(m)).
ForwardTrace forward(const LayerStack &stack, const LabeledDataset &ds);

/// The constrained maximum Z = sqrt(sum_i M_i' rho M_i) of the decision
/// layer built on the given feature matrix (class structure from `ds`).
double objective_Z(const Eigen::MatrixXd &features, const LabeledDataset &ds,
                   RidgePolicy policy = RidgePolicy::auto_ridge());

/// Convenience overload on a forward trace's outputs.
double objective_Z(const ForwardTrace &trace, const LabeledDataset &ds,
                   RidgePolicy policy = RidgePolicy::auto_ridge());

/// Exact gradient of Z with respect to every layer weight matrix:
/// dZ/du = (1/Z) sum_{i,x} [delta_ic(x) - (rho M_i)'y(x)] (rho M_i)' dy/du,
/// with dy/du obtained by exact backpropagation through tanh.
std::vector<Eigen::MatrixXd> exact_grad_Z(
    const LayerStack &stack, const LabeledDataset &ds,
    RidgePolicy policy = RidgePolicy::auto_ridge());

/// Equivalent decision weights w^(m) = (U^(m+1))' w^(m+1) (w at the top),
/// input class vectors mu_i^(m) = sum_x [delta_ic(x) - z_i(x)] x^(m)(x),
/// and the decision variables z, built from the closed-form decision
/// weights rho M_i on the trace outputs. With that weight choice the
/// outer-product gradient below is exactly the gradient of Z with the
/// activation derivative replaced by 1, up to the positive factor Z.
LinBPWorkspace linbp_workspace(const LayerStack &stack,
                               const ForwardTrace &trace,
                               const LabeledDataset &ds,
                               RidgePolicy policy = RidgePolicy::auto_ridge());

/// Workspace from already-computed decision weights (possibly stale when
/// the training loop refreshes them only every few iterations). Skips the
/// Gram factorization entirely.
LinBPWorkspace linbp_workspace(const LayerStack &stack,
                               const ForwardTrace &trace,
                               const LabeledDataset &ds,
                               const DecisionWeights &weights);

/// Linearized per-layer gradient of Z: the outer product w^(m) (mu^(m))'.
/// Each matrix has rank at most K.
std::vector<Eigen::MatrixXd> linearized_gradient(const LinBPWorkspace &ws);

/// Train the stack by repeated linearized-gradient ascent steps
/// U^(m) += beta * w^(m) (mu^(m))', recomputing the decision solution
/// every `refresh_interval` iterations. Records one trajectory row per
/// iteration, including the initial evaluation at iteration 0.
TrainResult train_linbp(const LayerStack &stack, const LabeledDataset &train,
                        const LabeledDataset &test, double beta,
                        std::int64_t iterations,
                        std::int64_t refresh_interval = 1,
                        RidgePolicy policy = RidgePolicy::auto_ridge());

}  // namespace crest
