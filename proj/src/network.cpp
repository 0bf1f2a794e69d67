#include "crest/network.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include "crest/errors.hpp"

namespace crest {

namespace {

void check_stack(const LayerStack &stack, Eigen::Index data_dim) {
  for (std::size_t m = 0; m < stack.layers.size(); ++m) {
    const Eigen::Index expect =
        m == 0 ? data_dim : stack.layers[m - 1].rows();
    if (stack.layers[m].cols() != expect) {
      throw DimensionError("layer " + std::to_string(m + 1) + " expects " +
                           std::to_string(stack.layers[m].cols()) +
                           " inputs but receives " + std::to_string(expect));
    }
    if (!stack.layers[m].allFinite()) {
      throw Error("layer " + std::to_string(m + 1) +
                  " contains non-finite weights");
    }
  }
}

struct DecisionContext {
  GramSystem gs;
  ClassSums ms;
  Eigen::MatrixXd rho_m;  // rho * M, N x K
  double z;
};

DecisionContext decision_context(const Eigen::MatrixXd &features,
                                 const LabeledDataset &ds,
                                 RidgePolicy policy) {
  LabeledDataset fds = ds.with_features(features);
  GramSystem gs = build_gram(fds, policy);
  ClassSums ms = class_sums(fds);
  Eigen::MatrixXd rho_m = gs.solve(ms.columns);
  const double z_sq = (ms.columns.array() * rho_m.array()).sum();
  return {std::move(gs), std::move(ms), std::move(rho_m),
          std::sqrt(std::max(z_sq, 0.0))};
}

}  // namespace

LayerStack random_stack(Eigen::Index data_dim,
                        const std::vector<Eigen::Index> &widths,
                        std::uint64_t seed, double scale) {
  if (data_dim < 1) {
    throw DimensionError("random_stack needs a positive data dimension");
  }
  std::mt19937_64 rng(seed);
  LayerStack stack;
  Eigen::Index in = data_dim;
  for (Eigen::Index width : widths) {
    if (width < 1) {
      throw DimensionError("layer widths must be positive");
    }
    const double half =
        scale > 0.0 ? scale : 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> uni(-half, half);
    Eigen::MatrixXd u(width, in);
    for (Eigen::Index r = 0; r < width; ++r) {
      for (Eigen::Index c = 0; c < in; ++c) {
        u(r, c) = uni(rng);
      }
    }
    stack.layers.push_back(std::move(u));
    in = width;
  }
  return stack;
}

ForwardTrace forward(const LayerStack &stack, const LabeledDataset &ds) {
  check_stack(stack, ds.dim());
  ForwardTrace trace;
  trace.inputs.reserve(stack.layers.size() + 1);
  trace.preactivations.reserve(stack.layers.size());
  trace.inputs.push_back(ds.features);
  for (const Eigen::MatrixXd &u : stack.layers) {
    trace.preactivations.push_back(u * trace.inputs.back());
    trace.inputs.push_back(trace.preactivations.back().array().tanh());
  }
  return trace;
}

double objective_Z(const Eigen::MatrixXd &features, const LabeledDataset &ds,
                   RidgePolicy policy) {
  DecisionContext ctx = decision_context(features, ds, policy);
  if (ctx.z == 0.0) {
    throw DegenerateObjectiveError(
        "degenerate objective: every class-sum vector is zero");
  }
  return ctx.z;
}

double objective_Z(const ForwardTrace &trace, const LabeledDataset &ds,
                   RidgePolicy policy) {
  return objective_Z(trace.outputs(), ds, policy);
}

std::vector<Eigen::MatrixXd> exact_grad_Z(const LayerStack &stack,
                                          const LabeledDataset &ds,
                                          RidgePolicy policy) {
  ForwardTrace trace = forward(stack, ds);
  DecisionContext ctx = decision_context(trace.outputs(), ds, policy);
  if (ctx.z == 0.0) {
    throw DegenerateObjectiveError(
        "degenerate objective: every class-sum vector is zero");
  }

  // Cotangent of Z at the network outputs:
  //   g(x) = (1/Z) sum_i [delta_ic(x) - (rho M_i)'y(x)] rho M_i.
  const Eigen::MatrixXd delta = indicator_matrix(ds);
  const Eigen::MatrixXd v = ctx.rho_m.transpose() * trace.outputs();
  Eigen::MatrixXd cot = (ctx.rho_m * (delta - v)) / ctx.z;

  // Exact reverse pass through tanh (derivative 1 - tanh^2).
  const std::size_t num_layers = stack.layers.size();
  std::vector<Eigen::MatrixXd> grads(num_layers);
  for (std::size_t m = num_layers; m-- > 0;) {
    const Eigen::MatrixXd pre_cot =
        (cot.array() * (1.0 - trace.inputs[m + 1].array().square())).matrix();
    grads[m] = pre_cot * trace.inputs[m].transpose();
    if (m > 0) {
      cot = stack.layers[m].transpose() * pre_cot;
    }
  }
  return grads;
}

LinBPWorkspace linbp_workspace(const LayerStack &stack,
                               const ForwardTrace &trace,
                               const LabeledDataset &ds, RidgePolicy policy) {
  LabeledDataset fds = ds.with_features(trace.outputs());
  const GramSystem gs = build_gram(fds, policy);
  return linbp_workspace(stack, trace, ds,
                         computed_weights(gs, class_sums(fds)));
}

LinBPWorkspace linbp_workspace(const LayerStack &stack,
                               const ForwardTrace &trace,
                               const LabeledDataset &ds,
                               const DecisionWeights &weights) {
  if (stack.layers.empty()) {
    throw DimensionError("linearized backpropagation needs at least one "
                         "pre-decision layer");
  }
  if (weights.columns.rows() != trace.outputs().rows()) {
    throw DimensionError("decision weights do not match the trace outputs");
  }

  const std::size_t num_layers = stack.layers.size();
  LinBPWorkspace ws;
  ws.z_values = weights.columns.transpose() * trace.outputs();

  ws.equivalent_weights.resize(num_layers);
  ws.equivalent_weights[num_layers - 1] = weights.columns;
  for (std::size_t m = num_layers - 1; m-- > 0;) {
    ws.equivalent_weights[m] =
        stack.layers[m + 1].transpose() * ws.equivalent_weights[m + 1];
  }

  const Eigen::MatrixXd residual = indicator_matrix(ds) - ws.z_values;
  ws.class_vectors.resize(num_layers);
  for (std::size_t m = 0; m < num_layers; ++m) {
    ws.class_vectors[m] = trace.inputs[m] * residual.transpose();
  }
  return ws;
}

std::vector<Eigen::MatrixXd> linearized_gradient(const LinBPWorkspace &ws) {
  if (ws.equivalent_weights.size() != ws.class_vectors.size()) {
    throw DimensionError("workspace layer counts disagree");
  }
  std::vector<Eigen::MatrixXd> grads(ws.equivalent_weights.size());
  for (std::size_t m = 0; m < grads.size(); ++m) {
    grads[m] = ws.equivalent_weights[m] * ws.class_vectors[m].transpose();
  }
  return grads;
}

TrainResult train_linbp(const LayerStack &stack, const LabeledDataset &train,
                        const LabeledDataset &test, double beta,
                        std::int64_t iterations, std::int64_t refresh_interval,
                        RidgePolicy policy) {
  if (!(beta > 0.0)) {
    throw Error("beta must be positive");
  }
  if (iterations < 0) {
    throw Error("iterations must be non-negative");
  }
  if (refresh_interval < 1) {
    throw Error("refresh_interval must be at least 1");
  }
  check_stack(stack, train.dim());
  if (train.dim() != test.dim() || train.num_classes != test.num_classes) {
    throw DimensionError("train and test sets are incompatible");
  }

  const auto start = std::chrono::steady_clock::now();
  auto wall_ms = [&start]() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start)
        .count();
  };

  TrainResult result;
  result.stack = stack;
  DecisionWeights dec;  // rho * M, refreshed every refresh_interval iterations
  double z = 0.0;

  for (std::int64_t it = 0; it <= iterations; ++it) {
    ForwardTrace trace = forward(result.stack, train);
    LabeledDataset train_features = train.with_features(trace.outputs());

    if (it % refresh_interval == 0) {
      try {
        const GramSystem gs = build_gram(train_features, policy);
        const ClassSums ms = class_sums(train_features);
        dec = computed_weights(gs, ms);
        const double z_sq = (ms.columns.array() * dec.columns.array()).sum();
        if (!(z_sq > 0.0)) {
          throw DegenerateObjectiveError(
              "degenerate objective: every class-sum vector is zero");
        }
        z = std::sqrt(z_sq);
      } catch (const Error &e) {
        result.status = TrainStatus::SingularGram;
        result.message = std::string("decision refresh failed at iteration ") +
                         std::to_string(it) + ": " + e.what();
        return result;
      }
    }

    TrajectoryRow row;
    row.iteration = it;
    row.train_accuracy = accuracy(dec, train_features);
    row.test_accuracy =
        accuracy(dec, test.with_features(forward(result.stack, test).outputs()));
    row.objective = z;
    row.wall_ms = wall_ms();
    result.trajectory.rows.push_back(row);

    if (it == iterations) {
      break;
    }

    // Weight change for every layer simultaneously (ascent on Z).
    const LinBPWorkspace ws = linbp_workspace(result.stack, trace, train, dec);
    const std::vector<Eigen::MatrixXd> grads = linearized_gradient(ws);
    bool finite = true;
    for (std::size_t m = 0; m < result.stack.layers.size(); ++m) {
      result.stack.layers[m] += beta * grads[m];
      finite = finite && result.stack.layers[m].allFinite();
    }
    if (!finite) {
      result.status = TrainStatus::Diverged;
      result.message = "non-finite layer weights after iteration " +
                       std::to_string(it + 1);
      return result;
    }
  }
  return result;
}

}  // namespace crest
