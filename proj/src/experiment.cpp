#include "crest/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "crest/dataset.hpp"
#include "crest/decision.hpp"
#include "crest/dynamics.hpp"
#include "crest/errors.hpp"
#include "crest/model_io.hpp"
#include "crest/network.hpp"
#include "crest/trajectory.hpp"

namespace crest {

namespace {

// Independent deterministic streams derived from the run seed.
constexpr std::uint64_t kSplitSeedOffset = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kStackSeedOffset = 0xbf58476d1ce4e5b9ULL;
constexpr std::uint64_t kInitSeedOffset = 0x94d049bb133111ebULL;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

LabeledDataset load_dataset(const ExperimentConfig &cfg) {
  if (!cfg.data_csv.empty()) {
    return load_csv(cfg.data_csv, cfg.num_classes);
  }
  return generate_synthetic(cfg.seed, cfg.synth_classes, cfg.synth_dim,
                            cfg.synth_per_class, cfg.synth_spread);
}

DecisionWeights random_weights(Eigen::Index dim, Eigen::Index k,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double half = 1.0 / std::sqrt(static_cast<double>(dim));
  std::uniform_real_distribution<double> uni(-half, half);
  Eigen::MatrixXd w(dim, k);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) {
      w(r, c) = uni(rng);
    }
  }
  return DecisionWeights{std::move(w)};
}

std::string join_path(const std::string &dir, const std::string &name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_text(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("cannot open file for writing: " + path);
  }
  out << text;
  if (!out) {
    throw IoError("failed writing file: " + path);
  }
}

struct ScenarioData {
  LabeledDataset train;
  LabeledDataset test;
};

ScenarioData split_dataset(const ExperimentConfig &cfg) {
  LabeledDataset full = load_dataset(cfg);
  auto [train, test] = split(full, cfg.seed + kSplitSeedOffset,
                             cfg.test_fraction);
  return {std::move(train), std::move(test)};
}

RunResult run_sweep(const ExperimentConfig &cfg) {
  ScenarioData data = split_dataset(cfg);
  const Eigen::Index dim = data.train.dim();
  std::vector<Eigen::Index> widths(static_cast<std::size_t>(cfg.sweep_layers),
                                   dim);
  LayerStack stack = random_stack(dim, widths, cfg.seed + kStackSeedOffset,
                                  cfg.init_scale);
  ForwardTrace train_trace = forward(stack, data.train);
  ForwardTrace test_trace = forward(stack, data.test);

  std::ostringstream csv;
  csv << "layers,train_acc,test_acc\n";
  std::ostringstream summary;
  summary << "scenario = " << scenario_name(cfg.scenario) << "\n"
          << "seed = " << cfg.seed << "\n";

  for (int layers = 0; layers <= cfg.sweep_layers; ++layers) {
    LabeledDataset train_features = data.train.with_features(
        train_trace.inputs[static_cast<std::size_t>(layers)]);
    LabeledDataset test_features = data.test.with_features(
        test_trace.inputs[static_cast<std::size_t>(layers)]);
    GramSystem gs = build_gram(train_features, cfg.ridge_policy);
    DecisionWeights w = computed_weights(gs, class_sums(train_features));
    const double train_acc = accuracy(w, train_features);
    const double test_acc = accuracy(w, test_features);
    csv << layers << ',' << fmt(train_acc) << ',' << fmt(test_acc) << "\n";
    summary << "layers_" << layers << " = " << fmt(train_acc) << " / "
            << fmt(test_acc) << "\n";
  }

  RunResult result;
  const std::string csv_path = join_path(cfg.out_dir, "sweep.csv");
  write_text(csv_path, csv.str());
  result.artifacts.push_back(csv_path);
  result.summary = summary.str();
  return result;
}

struct GdOutcome {
  Trajectory trajectory;
  bool diverged = false;
  std::int64_t aborted_at = -1;
};

GdOutcome run_gd_trajectory(const ScenarioData &features, const GramSystem &gs,
                            const ClassSums &ms, const DecisionWeights &w0,
                            double alpha, std::int64_t iterations,
                            bool preconditioned) {
  const auto start = std::chrono::steady_clock::now();
  auto wall_ms = [&start]() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start)
        .count();
  };

  GdOutcome out;
  GDState state{w0, 0, alpha, false};
  for (std::int64_t it = 0; it <= iterations; ++it) {
    TrajectoryRow row;
    row.iteration = it;
    row.train_accuracy = accuracy(state.weights, features.train);
    row.test_accuracy = accuracy(state.weights, features.test);
    row.objective =
        loss_and_grad(LossKind::Quadratic, state.weights, features.train).loss;
    row.wall_ms = wall_ms();
    out.trajectory.rows.push_back(row);
    if (it == iterations) {
      break;
    }
    state = preconditioned ? modified_gd_step(state, gs, ms)
                           : gd_step(state, gs, ms);
    if (state.diverged) {
      out.diverged = true;
      out.aborted_at = state.iteration;
      break;
    }
  }
  return out;
}

RunResult run_gd(const ExperimentConfig &cfg, bool preconditioned) {
  ScenarioData data = split_dataset(cfg);

  // Optional frozen random layers in front of the decision layer.
  if (!cfg.layer_widths.empty()) {
    LayerStack stack = random_stack(data.train.dim(), cfg.layer_widths,
                                    cfg.seed + kStackSeedOffset,
                                    cfg.init_scale);
    data.train =
        data.train.with_features(forward(stack, data.train).outputs());
    data.test = data.test.with_features(forward(stack, data.test).outputs());
  }

  GramSystem gs = build_gram(data.train, cfg.ridge_policy);
  ClassSums ms = class_sums(data.train);
  DecisionWeights w0 = random_weights(data.train.dim(), data.train.num_classes,
                                      cfg.seed + kInitSeedOffset);

  std::vector<double> alphas;
  if (cfg.alpha > 0.0) {
    alphas.push_back(cfg.alpha);
  } else if (preconditioned) {
    alphas.push_back(0.5);
  } else {
    // Plain GD learning rates are hard to pick in advance; sweep a
    // logarithmic range instead of guessing one value.
    alphas = {1e-9, 1e-8, 1e-7, 1e-6, 1e-5};
  }

  std::ostringstream summary;
  summary << "scenario = " << scenario_name(cfg.scenario) << "\n"
          << "seed = " << cfg.seed << "\n"
          << "ridge = " << fmt(gs.ridge()) << "\n";

  const SpectralSummary ss = spectral_summary(gs, SpectralMethod::Exact);
  summary << "lambda_max = " << fmt(*ss.lambda_max) << "\n"
          << "lambda_min = " << fmt(*ss.lambda_min) << "\n";

  RunResult result;
  bool any_diverged = false;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    const double alpha = alphas[a];
    GdOutcome out = run_gd_trajectory(data, gs, ms, w0, alpha, cfg.iterations,
                                      preconditioned);
    std::string name = "trajectory.csv";
    if (alphas.size() > 1) {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "trajectory_alpha_%.0e.csv", alpha);
      name = buf;
    }
    const std::string path = join_path(cfg.out_dir, name);
    emit_trajectory(out.trajectory, path);
    result.artifacts.push_back(path);

    summary << "alpha_" << a << " = " << fmt(alpha) << "\n";
    if (!preconditioned) {
      const RegimeReport regime = classify_regime(ss, alpha);
      summary << "regime_" << a << " = " << regime_name(regime.regime) << "\n";
    }
    if (out.diverged) {
      any_diverged = true;
      summary << "aborted_" << a << " = divergence at iteration "
              << out.aborted_at << "\n";
    } else {
      const TrajectoryRow &last = out.trajectory.rows.back();
      summary << "final_acc_" << a << " = " << fmt(last.train_accuracy)
              << " / " << fmt(last.test_accuracy) << "\n";
    }
  }

  // A single requested learning rate that diverges is a numerical abort;
  // in sweep mode divergent rates are findings, not failures.
  if (any_diverged && alphas.size() == 1) {
    result.exit_code = 3;
  }
  result.summary = summary.str();
  return result;
}

RunResult run_train(const ExperimentConfig &cfg) {
  ScenarioData data = split_dataset(cfg);
  LayerStack stack = random_stack(data.train.dim(), cfg.layer_widths,
                                  cfg.seed + kStackSeedOffset,
                                  cfg.init_scale);

  TrainResult tr =
      train_linbp(stack, data.train, data.test, cfg.beta, cfg.iterations,
                  cfg.refresh_interval, cfg.ridge_policy);

  RunResult result;
  const std::string traj_path = join_path(cfg.out_dir, "trajectory.csv");
  emit_trajectory(tr.trajectory, traj_path);
  result.artifacts.push_back(traj_path);

  std::ostringstream summary;
  summary << "scenario = " << scenario_name(cfg.scenario) << "\n"
          << "seed = " << cfg.seed << "\n"
          << "beta = " << fmt(cfg.beta) << "\n"
          << "iterations = " << cfg.iterations << "\n"
          << "status = ";
  switch (tr.status) {
    case TrainStatus::Completed:
      summary << "completed\n";
      break;
    case TrainStatus::Diverged:
      summary << "diverged\n";
      result.exit_code = 3;
      break;
    case TrainStatus::SingularGram:
      summary << "singular-gram\n";
      result.exit_code = 3;
      break;
  }
  if (!tr.message.empty()) {
    summary << "message = " << tr.message << "\n";
  }

  if (tr.status == TrainStatus::Completed) {
    // Persist the trained stack with freshly computed decision weights.
    LabeledDataset train_features =
        data.train.with_features(forward(tr.stack, data.train).outputs());
    GramSystem gs = build_gram(train_features, cfg.ridge_policy);
    LagrangianSolution sol =
        lagrangian_solve(gs, class_sums(train_features), cfg.sigma);
    const std::string model_path = join_path(cfg.out_dir, "model.txt");
    save_model(tr.stack, sol.weights, model_path);
    result.artifacts.push_back(model_path);

    const TrajectoryRow &last = tr.trajectory.rows.back();
    summary << "final_train_acc = " << fmt(last.train_accuracy) << "\n"
            << "final_test_acc = " << fmt(last.test_accuracy) << "\n"
            << "final_objective = " << fmt(last.objective) << "\n";
  }
  result.summary = summary.str();
  return result;
}

RunResult run_diagnose(const ExperimentConfig &cfg) {
  // Diagnosis concerns the Gram spectrum of the full training material;
  // no split is taken.
  LabeledDataset ds = load_dataset(cfg);
  if (!cfg.layer_widths.empty()) {
    LayerStack stack = random_stack(ds.dim(), cfg.layer_widths,
                                    cfg.seed + kStackSeedOffset,
                                    cfg.init_scale);
    ds = ds.with_features(forward(stack, ds).outputs());
  }

  GramSystem gs = build_gram(ds, cfg.ridge_policy);
  const SpectralSummary ss = spectral_summary(
      gs, cfg.exact_spectrum ? SpectralMethod::Exact
                             : SpectralMethod::TraceOnly);
  const LearnabilityReport report = learnability_verdict(ss);

  std::ostringstream summary;
  summary << "scenario = diagnose\n"
          << "seed = " << cfg.seed << "\n"
          << "samples = " << ds.size() << "\n"
          << "dim = " << ds.dim() << "\n"
          << "ridge = " << fmt(gs.ridge()) << "\n"
          << "trace_gram = " << fmt(gs.trace_gram()) << "\n"
          << "trace_rho = " << fmt(gs.trace_rho()) << "\n"
          << "trace_bound = " << fmt(ss.trace_bound) << "\n";
  if (ss.lambda_max.has_value()) {
    summary << "lambda_max = " << fmt(*ss.lambda_max) << "\n"
            << "lambda_min = " << fmt(*ss.lambda_min) << "\n"
            << "ratio = " << fmt(*ss.ratio) << "\n";
  }
  summary << "verdict = " << verdict_name(report.verdict) << "\n"
          << "rationale = " << report.rationale << "\n";

  RunResult result;
  result.summary = summary.str();
  return result;
}

}  // namespace

RunResult run(const ExperimentConfig &cfg) {
  std::filesystem::create_directories(cfg.out_dir);

  RunResult result;
  switch (cfg.scenario) {
    case Scenario::SweepRandomLayers:
      result = run_sweep(cfg);
      break;
    case Scenario::GdDecision:
      result = run_gd(cfg, /*preconditioned=*/false);
      break;
    case Scenario::ModifiedGd:
      result = run_gd(cfg, /*preconditioned=*/true);
      break;
    case Scenario::TrainLinBP:
      result = run_train(cfg);
      break;
    case Scenario::Diagnose:
      result = run_diagnose(cfg);
      break;
  }

  const std::string summary_path = join_path(cfg.out_dir, "summary.txt");
  write_text(summary_path, result.summary);
  result.artifacts.push_back(summary_path);
  return result;
}

}  // namespace crest
