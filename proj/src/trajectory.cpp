#include "crest/trajectory.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "crest/errors.hpp"

namespace crest {

namespace {

constexpr const char *kHeader = "iteration,train_acc,test_acc,objective,wall_ms";

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void emit_trajectory(const Trajectory &traj, const std::string &path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("cannot open trajectory file for writing: " + path);
  }
  out << kHeader << "\n";
  for (const TrajectoryRow &r : traj.rows) {
    out << r.iteration << ',' << format_double(r.train_accuracy) << ','
        << format_double(r.test_accuracy) << ','
        << format_double(r.objective) << ',' << r.wall_ms << "\n";
  }
  if (!out) {
    throw IoError("failed writing trajectory file: " + path);
  }
}

Trajectory load_trajectory(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open trajectory file: " + path);
  }
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw IoError("trajectory file missing expected header: " + path);
  }
  Trajectory traj;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    std::stringstream ss(line);
    std::string field;
    TrajectoryRow row;
    int col = 0;
    while (std::getline(ss, field, ',')) {
      char *end = nullptr;
      switch (col) {
        case 0:
          row.iteration = std::strtoll(field.c_str(), &end, 10);
          break;
        case 1:
          row.train_accuracy = std::strtod(field.c_str(), &end);
          break;
        case 2:
          row.test_accuracy = std::strtod(field.c_str(), &end);
          break;
        case 3:
          row.objective = std::strtod(field.c_str(), &end);
          break;
        case 4:
          row.wall_ms = std::strtoll(field.c_str(), &end, 10);
          break;
        default:
          throw IoError("trajectory row " + std::to_string(line_no) +
                        " has too many fields");
      }
      if (end == field.c_str() || *end != '\0') {
        throw IoError("trajectory row " + std::to_string(line_no) +
                      ": unparsable field '" + field + "'");
      }
      ++col;
    }
    if (col != 5) {
      throw IoError("trajectory row " + std::to_string(line_no) +
                    " has " + std::to_string(col) + " fields, expected 5");
    }
    traj.rows.push_back(row);
  }
  return traj;
}

}  // namespace crest
