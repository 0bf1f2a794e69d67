#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>
#include <random>

#include "crest/dataset.hpp"
#include "crest/decision.hpp"
#include "crest/errors.hpp"
#include "crest/network.hpp"
#include "oracle_helpers.hpp"

using namespace crest;
using namespace crest_test;

namespace {

LabeledDataset random_instance(Eigen::Index dim, Eigen::Index samples, int k,
                               std::mt19937_64 &rng) {
  std::uniform_int_distribution<int> lab(0, k - 1);
  Eigen::MatrixXd f = random_gaussian(dim, samples, rng);
  std::vector<int> labels(static_cast<std::size_t>(samples));
  for (auto &l : labels) {
    l = lab(rng);
  }
  return LabeledDataset(std::move(f), std::move(labels), k);
}

// Central finite differences of objective_Z over every weight of every
// layer: the independent route that adjudicates the gradient algebra.
std::vector<Eigen::MatrixXd> fd_stack_gradient(const LayerStack &stack,
                                               const LabeledDataset &ds,
                                               double h) {
  std::vector<Eigen::MatrixXd> grads;
  LayerStack probe = stack;
  for (std::size_t m = 0; m < stack.layers.size(); ++m) {
    Eigen::MatrixXd g(stack.layers[m].rows(), stack.layers[m].cols());
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
      for (Eigen::Index c = 0; c < g.cols(); ++c) {
        const double u = stack.layers[m](r, c);
        probe.layers[m](r, c) = u + h;
        const double up = objective_Z(forward(probe, ds), ds);
        probe.layers[m](r, c) = u - h;
        const double down = objective_Z(forward(probe, ds), ds);
        probe.layers[m](r, c) = u;
        g(r, c) = (up - down) / (2.0 * h);
      }
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

double cosine(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b) {
  return (a.array() * b.array()).sum() / (a.norm() * b.norm());
}

}  // namespace

TEST_SUITE("network") {

TEST_CASE("zero weights map everything to zero") {
  std::mt19937_64 rng(3);
  LabeledDataset ds = random_instance(4, 10, 2, rng);
  LayerStack stack;
  stack.layers.push_back(Eigen::MatrixXd::Zero(5, 4));
  stack.layers.push_back(Eigen::MatrixXd::Zero(3, 5));
  ForwardTrace trace = forward(stack, ds);
  CHECK(trace.outputs().isZero(0.0));
}

TEST_CASE("scalar layer evaluates tanh exactly") {
  Eigen::MatrixXd f(1, 1);
  f << 0.5;
  LabeledDataset ds(f, {0}, 1);
  LayerStack stack;
  stack.layers.push_back(Eigen::MatrixXd::Ones(1, 1));
  ForwardTrace trace = forward(stack, ds);
  CHECK(trace.outputs()(0, 0) == std::tanh(0.5));
  CHECK(trace.outputs()(0, 0) ==
        doctest::Approx(0.46211715726000974).epsilon(1e-15));
  CHECK(trace.preactivations[0](0, 0) == 0.5);
}

TEST_CASE("outputs stay inside the tanh range") {
  std::mt19937_64 rng(5);
  LabeledDataset ds = random_instance(6, 40, 3, rng);
  LayerStack stack = random_stack(6, {8, 8}, 11, 2.0);  // saturating scale
  ForwardTrace trace = forward(stack, ds);
  CHECK((trace.outputs().array().abs() < 1.0).all());
}

TEST_CASE("tiny weights reduce the stack to its linear composition") {
  std::mt19937_64 rng(7);
  LabeledDataset ds = random_instance(5, 12, 2, rng);
  LayerStack stack = random_stack(5, {6, 7, 4}, 13, 1e-6);

  const Eigen::MatrixXd linear =
      stack.layers[2] * stack.layers[1] * stack.layers[0] * ds.features;
  const ForwardTrace trace = forward(stack, ds);
  CHECK(max_rel_err(trace.outputs(), linear) < 1e-9);
}

TEST_CASE("forward rejects invalid stacks") {
  std::mt19937_64 rng(9);
  LabeledDataset ds = random_instance(4, 6, 2, rng);
  LayerStack mismatched;
  mismatched.layers.push_back(Eigen::MatrixXd::Zero(5, 3));  // expects dim 3
  CHECK_THROWS_AS(forward(mismatched, ds), DimensionError);
}

TEST_CASE("objective on orthonormal one-per-class features is sqrt(K)") {
  const int k = 4;
  LabeledDataset ds(Eigen::MatrixXd::Identity(k, k), {0, 1, 2, 3}, k);
  CHECK(objective_Z(ds.features, ds) ==
        doctest::Approx(std::sqrt(4.0)).epsilon(1e-12));
}

TEST_CASE("objective is invariant under orthogonal output rotation") {
  std::mt19937_64 rng(15);
  LabeledDataset ds = random_instance(6, 25, 3, rng);
  const double plain = objective_Z(ds.features, ds);
  const Eigen::MatrixXd q = random_orthogonal(6, rng);
  const double rotated = objective_Z((q * ds.features).eval(), ds);
  CHECK(rel_err(plain, rotated) < 1e-8);
}

TEST_CASE("objective agrees with the constrained-solution Z field") {
  std::mt19937_64 rng(17);
  LabeledDataset ds = random_instance(5, 20, 3, rng);
  GramSystem gs = build_gram(ds);
  LagrangianSolution sol = lagrangian_solve(gs, class_sums(ds), 1.0);
  CHECK(objective_Z(ds.features, ds) == doctest::Approx(sol.Z).epsilon(1e-14));
}

TEST_CASE("objective with all-zero class sums is degenerate") {
  Eigen::MatrixXd f(1, 2);
  f << 2.0, -2.0;
  LabeledDataset ds(f, {0, 0}, 1);
  CHECK_THROWS_AS(objective_Z(f, ds), DegenerateObjectiveError);
}

TEST_CASE("gradient vanishes when the features fit the indicators") {
  // Two linearly independent feature columns in two dimensions fit any
  // target exactly, so the residual bracket is zero.
  std::mt19937_64 rng(21);
  LabeledDataset ds = random_instance(2, 2, 2, rng);
  ds.labels = {0, 1};
  LayerStack stack = random_stack(2, {2}, 23, 0.8);
  const std::vector<Eigen::MatrixXd> grads = exact_grad_Z(stack, ds);
  CHECK(grads.size() == 1);
  CHECK(grads[0].cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("exact gradient matches finite differences of the objective") {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 3; ++trial) {
    LabeledDataset ds = random_instance(6, 30, 3, rng);
    LayerStack stack = random_stack(6, {8, 8}, 100 + trial);
    const std::vector<Eigen::MatrixXd> exact = exact_grad_Z(stack, ds);
    const std::vector<Eigen::MatrixXd> fd = fd_stack_gradient(stack, ds, 1e-5);
    for (std::size_t m = 0; m < exact.size(); ++m) {
      CHECK(grad_discrepancy(exact[m], fd[m]) < 1e-4);
    }
  }
}

TEST_CASE("near-linear regime: exact and linearized gradients align") {
  // Widths must not expand here: an expanding near-linear stack leaves the
  // feature Gram rank-deficient up to tanh curvature, which poisons the
  // comparison numerically.
  std::mt19937_64 rng(27);
  for (double scale : {1e-3, 1e-6}) {
    LabeledDataset ds = random_instance(5, 150, 3, rng);
    LayerStack stack = random_stack(5, {4, 3}, 29, scale);
    const std::vector<Eigen::MatrixXd> exact = exact_grad_Z(stack, ds);
    const LinBPWorkspace ws = linbp_workspace(stack, forward(stack, ds), ds);
    const std::vector<Eigen::MatrixXd> lin = linearized_gradient(ws);
    REQUIRE(exact.size() == lin.size());
    for (std::size_t m = 0; m < exact.size(); ++m) {
      CHECK(cosine(exact[m], lin[m]) > 0.99);
    }
  }
}

TEST_CASE("identity layers leave the equivalent weights untouched") {
  std::mt19937_64 rng(31);
  LabeledDataset ds = random_instance(4, 16, 2, rng);
  LayerStack stack;
  for (int m = 0; m < 3; ++m) {
    stack.layers.push_back(Eigen::MatrixXd::Identity(4, 4));
  }
  ForwardTrace trace = forward(stack, ds);
  LinBPWorkspace ws = linbp_workspace(stack, trace, ds);
  for (const Eigen::MatrixXd &w : ws.equivalent_weights) {
    CHECK(w == ws.equivalent_weights.back());
  }
}

TEST_CASE("a scaled top layer scales the pulled-back weights") {
  std::mt19937_64 rng(33);
  LabeledDataset ds = random_instance(4, 14, 2, rng);
  LayerStack stack;
  stack.layers.push_back(random_gaussian(4, 4, rng));
  stack.layers.push_back(2.0 * Eigen::MatrixXd::Identity(4, 4));
  ForwardTrace trace = forward(stack, ds);
  LinBPWorkspace ws = linbp_workspace(stack, trace, ds);
  CHECK((ws.equivalent_weights[0] - 2.0 * ws.equivalent_weights[1])
            .cwiseAbs()
            .maxCoeff() <= 1e-14 * ws.equivalent_weights[1].norm());
}

TEST_CASE("equivalent weights equal the direct transpose chain") {
  std::mt19937_64 rng(35);
  LabeledDataset ds = random_instance(5, 20, 3, rng);
  LayerStack stack = random_stack(5, {6, 7, 5}, 37);
  ForwardTrace trace = forward(stack, ds);
  LinBPWorkspace ws = linbp_workspace(stack, trace, ds);

  const Eigen::MatrixXd direct = stack.layers[1].transpose() *
                                 stack.layers[2].transpose() *
                                 ws.equivalent_weights[2];
  CHECK(max_rel_err(ws.equivalent_weights[0], direct) < 1e-12);
}

TEST_CASE("indicator-perfect decision variables freeze the update") {
  // Inject weights solving W'Y = indicator exactly; every class vector and
  // hence every linearized gradient must vanish.
  std::mt19937_64 rng(39);
  LabeledDataset ds = random_instance(2, 2, 2, rng);
  ds.labels = {0, 1};
  LayerStack stack = random_stack(2, {2}, 41, 0.7);
  ForwardTrace trace = forward(stack, ds);

  const Eigen::MatrixXd delta = indicator_matrix(ds);
  const Eigen::MatrixXd w =
      trace.outputs().transpose().fullPivLu().solve(delta.transpose());
  LinBPWorkspace ws = linbp_workspace(stack, trace, ds, DecisionWeights{w});
  CHECK((ws.z_values - delta).cwiseAbs().maxCoeff() <= 1e-10);
  for (const Eigen::MatrixXd &mu : ws.class_vectors) {
    CHECK(mu.cwiseAbs().maxCoeff() <= 1e-9);
  }
  for (const Eigen::MatrixXd &g : linearized_gradient(ws)) {
    CHECK(g.cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("single-sample constrained solution is its own fixed point") {
  // With one sample the sigma = 1 solution satisfies z = delta exactly.
  Eigen::MatrixXd f(3, 1);
  f << 0.3, -0.2, 0.9;
  LabeledDataset ds(f, {0}, 1);
  LayerStack stack = random_stack(3, {3}, 43);
  ForwardTrace trace = forward(stack, ds);
  LinBPWorkspace ws = linbp_workspace(stack, trace, ds);
  CHECK((ws.z_values - indicator_matrix(ds)).cwiseAbs().maxCoeff() <= 1e-10);
  for (const Eigen::MatrixXd &mu : ws.class_vectors) {
    CHECK(mu.cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("linearized gradients have rank at most K") {
  std::mt19937_64 rng(47);
  LabeledDataset ds = random_instance(6, 40, 3, rng);
  LayerStack stack = random_stack(6, {9, 8}, 49);
  LinBPWorkspace ws = linbp_workspace(stack, forward(stack, ds), ds);
  for (const Eigen::MatrixXd &g : linearized_gradient(ws)) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
    const Eigen::VectorXd sv = svd.singularValues();
    for (Eigen::Index i = 3; i < sv.size(); ++i) {
      CHECK(sv(i) <= 1e-10 * sv(0));
    }
  }
}

TEST_CASE("a small enough exact-gradient step increases the objective") {
  std::mt19937_64 rng(51);
  LabeledDataset ds = random_instance(5, 24, 3, rng);
  LayerStack stack = random_stack(5, {6, 6}, 53);
  const double before = objective_Z(forward(stack, ds), ds);
  const std::vector<Eigen::MatrixXd> grads = exact_grad_Z(stack, ds);

  double beta = 1e-2;
  bool increased = false;
  for (int attempt = 0; attempt < 60 && !increased; ++attempt, beta *= 0.5) {
    LayerStack moved = stack;
    for (std::size_t m = 0; m < moved.layers.size(); ++m) {
      moved.layers[m] += beta * grads[m];
    }
    increased = objective_Z(forward(moved, ds), ds) > before;
  }
  CHECK(increased);
}

TEST_CASE("training for zero iterations only evaluates") {
  std::mt19937_64 rng(55);
  LabeledDataset ds = random_instance(6, 60, 3, rng);
  auto [train, test] = split(ds, 57, 0.3);
  LayerStack stack = random_stack(6, {8}, 59);
  TrainResult tr = train_linbp(stack, train, test, 1e-3, 0);
  CHECK(tr.status == TrainStatus::Completed);
  CHECK(tr.trajectory.rows.size() == 1);
  CHECK(tr.trajectory.rows[0].iteration == 0);
  CHECK(tr.stack.layers[0] == stack.layers[0]);
}

TEST_CASE("training is deterministic for a fixed configuration") {
  std::mt19937_64 rng(61);
  LabeledDataset ds = random_instance(5, 80, 3, rng);
  auto [train, test] = split(ds, 63, 0.25);
  LayerStack stack = random_stack(5, {7, 7}, 65);
  TrainResult a = train_linbp(stack, train, test, 5e-4, 20);
  TrainResult b = train_linbp(stack, train, test, 5e-4, 20);
  REQUIRE(a.trajectory.rows.size() == b.trajectory.rows.size());
  for (std::size_t i = 0; i < a.trajectory.rows.size(); ++i) {
    CHECK(a.trajectory.rows[i].train_accuracy ==
          b.trajectory.rows[i].train_accuracy);
    CHECK(a.trajectory.rows[i].test_accuracy ==
          b.trajectory.rows[i].test_accuracy);
    CHECK(a.trajectory.rows[i].objective == b.trajectory.rows[i].objective);
  }
  for (std::size_t m = 0; m < a.stack.layers.size(); ++m) {
    CHECK(a.stack.layers[m] == b.stack.layers[m]);
  }
}

TEST_CASE("a modest run raises the objective") {
  LabeledDataset ds = generate_synthetic(67, 3, 10, 40, 0.8);
  auto [train, test] = split(ds, 69, 0.25);
  LayerStack stack = random_stack(10, {10, 10}, 71);
  TrainResult tr = train_linbp(stack, train, test, 1e-4, 40);
  REQUIRE(tr.status == TrainStatus::Completed);
  CHECK(tr.trajectory.rows.size() == 41);
  CHECK(tr.trajectory.rows.back().objective >
        tr.trajectory.rows.front().objective);
}

TEST_CASE("stale refresh intervals still record every iteration") {
  LabeledDataset ds = generate_synthetic(73, 3, 8, 30, 0.8);
  auto [train, test] = split(ds, 75, 0.25);
  LayerStack stack = random_stack(8, {8}, 77);
  TrainResult tr = train_linbp(stack, train, test, 1e-4, 12, 5);
  REQUIRE(tr.status == TrainStatus::Completed);
  CHECK(tr.trajectory.rows.size() == 13);
  // The recorded objective only moves on refresh iterations.
  CHECK(tr.trajectory.rows[1].objective == tr.trajectory.rows[0].objective);
  CHECK(tr.trajectory.rows[4].objective == tr.trajectory.rows[0].objective);
  CHECK(tr.trajectory.rows[5].objective != tr.trajectory.rows[0].objective);
}

TEST_CASE("an absurd step size aborts with the partial trajectory") {
  // Divergence to non-finite needs the equivalent-weight chain to compound
  // the exploded layers, hence three of them.
  LabeledDataset ds = generate_synthetic(79, 3, 8, 30, 0.8);
  auto [train, test] = split(ds, 81, 0.25);
  LayerStack stack = random_stack(8, {8, 8, 8}, 83);
  TrainResult tr = train_linbp(stack, train, test, 1e150, 50);
  CHECK(tr.status == TrainStatus::Diverged);
  CHECK(tr.trajectory.rows.size() >= 1);
  CHECK(tr.trajectory.rows.size() < 51);
  CHECK(tr.message.find("iteration") != std::string::npos);
}

TEST_CASE("a feature row collapsing to zero aborts as singular") {
  LabeledDataset ds = generate_synthetic(85, 3, 8, 30, 0.8);
  auto [train, test] = split(ds, 87, 0.25);
  LayerStack stack = random_stack(8, {8}, 89);
  stack.layers[0].row(3).setZero();  // one dead output unit
  TrainResult tr = train_linbp(stack, train, test, 1e-4, 10, 1,
                               RidgePolicy::none());
  CHECK(tr.status == TrainStatus::SingularGram);
  CHECK(tr.message.find("iteration 0") != std::string::npos);
}

TEST_CASE("parameter validation") {
  LabeledDataset ds = generate_synthetic(91, 2, 4, 10, 0.5);
  auto [train, test] = split(ds, 93, 0.3);
  LayerStack stack = random_stack(4, {4}, 95);
  CHECK_THROWS_AS(train_linbp(stack, train, test, 0.0, 5), Error);
  CHECK_THROWS_AS(train_linbp(stack, train, test, 1e-3, -1), Error);
  CHECK_THROWS_AS(train_linbp(stack, train, test, 1e-3, 5, 0), Error);

  LayerStack empty;
  CHECK_THROWS_AS(linbp_workspace(empty, forward(empty, train), train),
                  DimensionError);
}

}  // TEST_SUITE
