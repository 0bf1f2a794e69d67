#include "crest/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <string>

#include "crest/errors.hpp"

namespace crest {

namespace {

constexpr const char *kMagic = "CREST-MODEL v1";

void write_matrix(std::ofstream &out, const Eigen::MatrixXd &m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  char buf[32];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(r, c));
      out << buf << (c + 1 == m.cols() ? '\n' : ' ');
    }
  }
}

Eigen::MatrixXd read_matrix(std::ifstream &in, const std::string &what) {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  if (!(in >> rows >> cols) || rows < 1 || cols < 1) {
    throw IoError("model file truncated or invalid at " + what +
                  " dimension line");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!(in >> m(r, c))) {
        throw IoError("model file truncated inside " + what);
      }
    }
  }
  return m;
}

}  // namespace

void save_model(const LayerStack &stack, const DecisionWeights &w,
                const std::string &path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("cannot open model file for writing: " + path);
  }
  out << kMagic << '\n';
  out << stack.layers.size() << '\n';
  for (const Eigen::MatrixXd &u : stack.layers) {
    write_matrix(out, u);
  }
  write_matrix(out, w.columns);
  if (!out) {
    throw IoError("failed writing model file: " + path);
  }
}

std::pair<LayerStack, DecisionWeights> load_model(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open model file: " + path);
  }
  std::string magic;
  std::getline(in, magic);
  if (magic != kMagic) {
    throw IoError("model file version mismatch: expected '" +
                  std::string(kMagic) + "', got '" + magic + "'");
  }
  std::size_t num_layers = 0;
  if (!(in >> num_layers)) {
    throw IoError("model file truncated at layer count");
  }

  LayerStack stack;
  stack.layers.reserve(num_layers);
  for (std::size_t m = 0; m < num_layers; ++m) {
    Eigen::MatrixXd u =
        read_matrix(in, "layer " + std::to_string(m + 1) + " of " +
                            std::to_string(num_layers));
    if (m > 0 && u.cols() != stack.layers.back().rows()) {
      throw IoError("model file layer " + std::to_string(m + 1) +
                    " does not compose with layer " + std::to_string(m));
    }
    stack.layers.push_back(std::move(u));
  }

  DecisionWeights w{read_matrix(in, "decision weights")};
  if (!stack.layers.empty() && w.columns.rows() != stack.layers.back().rows()) {
    throw IoError("model file decision weights do not match the final "
                  "layer width");
  }
  return {std::move(stack), std::move(w)};
}

}  // namespace crest
