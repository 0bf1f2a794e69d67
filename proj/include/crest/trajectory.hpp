#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace crest {

/// One recorded training iteration. `objective` is the quantity the run
/// tracks (constrained maximum Z for pre-decision training, batch loss for
/// decision-layer descent). `wall_ms` is informative only and excluded
/// from determinism comparisons.
struct TrajectoryRow {
  std::int64_t iteration = 0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double objective = 0.0;
  std::int64_t wall_ms = 0;
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;
};

/// Write `iteration,train_acc,test_acc,objective,wall_ms` CSV with
/// round-trip-safe 17-significant-digit decimals.
void emit_trajectory(const Trajectory &traj, const std::string &path);

/// Parse a file produced by emit_trajectory.
Trajectory load_trajectory(const std::string &path);

}  // namespace crest
