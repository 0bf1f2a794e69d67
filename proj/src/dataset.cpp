#include "crest/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "crest/errors.hpp"

namespace crest {

namespace {

void validate(const LabeledDataset &ds) {
  if (ds.features.cols() < 1) {
    throw DataError("dataset is empty");
  }
  if (ds.features.cols() != static_cast<Eigen::Index>(ds.labels.size())) {
    throw DataError("feature column count (" +
                    std::to_string(ds.features.cols()) +
                    ") does not match label count (" +
                    std::to_string(ds.labels.size()) + ")");
  }
  if (ds.num_classes < 1) {
    throw DataError("num_classes must be positive");
  }
  for (std::size_t j = 0; j < ds.labels.size(); ++j) {
    if (ds.labels[j] < 0 || ds.labels[j] >= ds.num_classes) {
      throw DataError("label " + std::to_string(ds.labels[j]) + " at sample " +
                      std::to_string(j) + " outside [0, " +
                      std::to_string(ds.num_classes) + ")");
    }
  }
  if (!ds.features.allFinite()) {
    throw DataError("dataset contains non-finite feature values");
  }
}

}  // namespace

LabeledDataset::LabeledDataset(Eigen::MatrixXd feats, std::vector<int> labs,
                               int k)
    : features(std::move(feats)), labels(std::move(labs)), num_classes(k) {
  validate(*this);
}

LabeledDataset LabeledDataset::with_features(Eigen::MatrixXd feats) const {
  return LabeledDataset(std::move(feats), labels, num_classes);
}

LabeledDataset load_csv(const std::string &path, int num_classes_override) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open dataset file: " + path);
  }

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  int line_no = 0;
  int max_label = -1;
  std::size_t width = 0;  // feature count, fixed by the first row

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    std::stringstream ss(line);
    std::string field;
    std::vector<double> feats;
    bool first = true;
    while (std::getline(ss, field, ',')) {
      const char *begin = field.c_str();
      char *end = nullptr;
      if (first) {
        long lab = std::strtol(begin, &end, 10);
        if (end == begin || *end != '\0') {
          throw DataError("row " + std::to_string(line_no) +
                          ": non-integer label '" + field + "'");
        }
        if (lab < 0) {
          throw DataError("row " + std::to_string(line_no) +
                          ": negative label " + std::to_string(lab));
        }
        labels.push_back(static_cast<int>(lab));
        max_label = std::max(max_label, static_cast<int>(lab));
        first = false;
      } else {
        double v = std::strtod(begin, &end);
        if (end == begin || *end != '\0') {
          throw DataError("row " + std::to_string(line_no) +
                          ": unparsable feature '" + field + "'");
        }
        if (!std::isfinite(v)) {
          throw DataError("row " + std::to_string(line_no) +
                          ": non-finite feature '" + field + "'");
        }
        feats.push_back(v);
      }
    }
    if (first) {
      throw DataError("row " + std::to_string(line_no) + ": no label field");
    }
    if (feats.empty()) {
      throw DataError("row " + std::to_string(line_no) + ": no feature fields");
    }
    if (rows.empty()) {
      width = feats.size();
    } else if (feats.size() != width) {
      throw DataError("row " + std::to_string(line_no) + ": expected " +
                      std::to_string(width) + " features, got " +
                      std::to_string(feats.size()));
    }
    rows.push_back(std::move(feats));
  }
  if (rows.empty()) {
    throw DataError("dataset file has no rows: " + path);
  }

  int k = max_label + 1;
  if (num_classes_override > 0) {
    if (num_classes_override < k) {
      throw DataError("declared num_classes " +
                      std::to_string(num_classes_override) +
                      " smaller than max label + 1 (" + std::to_string(k) +
                      ")");
    }
    k = num_classes_override;
  }

  Eigen::MatrixXd feats(static_cast<Eigen::Index>(width),
                        static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t i = 0; i < width; ++i) {
      feats(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[j][i];
    }
  }
  return LabeledDataset(std::move(feats), std::move(labels), k);
}

LabeledDataset generate_synthetic(std::uint64_t seed, int num_classes, int dim,
                                  int per_class, double spread) {
  if (num_classes < 1 || dim < 1 || per_class < 1) {
    throw DataError("synthetic generator needs positive class count, "
                    "dimension, and per-class count");
  }
  if (!(spread > 0.0)) {
    throw DataError("synthetic spread must be positive");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::MatrixXd means(dim, num_classes);
  for (int i = 0; i < num_classes; ++i) {
    Eigen::VectorXd v(dim);
    do {
      for (int r = 0; r < dim; ++r) {
        v(r) = gauss(rng);
      }
    } while (v.norm() == 0.0);
    means.col(i) = v / v.norm();
  }

  const Eigen::Index n = static_cast<Eigen::Index>(num_classes) * per_class;
  Eigen::MatrixXd feats(dim, n);
  std::vector<int> labels(static_cast<std::size_t>(n));
  Eigen::Index col = 0;
  for (int i = 0; i < num_classes; ++i) {
    for (int s = 0; s < per_class; ++s, ++col) {
      for (int r = 0; r < dim; ++r) {
        feats(r, col) = means(r, i) + spread * gauss(rng);
      }
      labels[static_cast<std::size_t>(col)] = i;
    }
  }
  return LabeledDataset(std::move(feats), std::move(labels), num_classes);
}

ClassSums class_sums(const LabeledDataset &ds) {
  Eigen::MatrixXd sums =
      Eigen::MatrixXd::Zero(ds.features.rows(), ds.num_classes);
  for (Eigen::Index j = 0; j < ds.features.cols(); ++j) {
    sums.col(ds.labels[static_cast<std::size_t>(j)]) += ds.features.col(j);
  }
  return ClassSums{std::move(sums)};
}

Eigen::MatrixXd indicator_matrix(const LabeledDataset &ds) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(ds.num_classes, ds.size());
  for (Eigen::Index j = 0; j < ds.size(); ++j) {
    d(ds.labels[static_cast<std::size_t>(j)], j) = 1.0;
  }
  return d;
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset &ds,
                                                std::uint64_t seed,
                                                double test_fraction) {
  if (!(test_fraction > 0.0) || !(test_fraction < 1.0)) {
    throw DataError("test_fraction must lie strictly between 0 and 1");
  }
  const Eigen::Index n = ds.size();
  if (n < 2) {
    throw DataError("cannot split a dataset with fewer than 2 samples");
  }

  Eigen::Index n_test = static_cast<Eigen::Index>(
      std::floor(static_cast<double>(n) * test_fraction));
  n_test = std::clamp<Eigen::Index>(n_test, 1, n - 1);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  auto take = [&](Eigen::Index from, Eigen::Index count) {
    Eigen::MatrixXd feats(ds.dim(), count);
    std::vector<int> labs(static_cast<std::size_t>(count));
    for (Eigen::Index j = 0; j < count; ++j) {
      const Eigen::Index src = order[static_cast<std::size_t>(from + j)];
      feats.col(j) = ds.features.col(src);
      labs[static_cast<std::size_t>(j)] =
          ds.labels[static_cast<std::size_t>(src)];
    }
    return LabeledDataset(std::move(feats), std::move(labs), ds.num_classes);
  };

  return {take(0, n - n_test), take(n - n_test, n_test)};
}

}  // namespace crest
