#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace crest {

/// Labeled feature vectors, one column per sample.
///
/// `features` is N x |X| (feature dimension by sample count); `labels[j]`
/// is the class of column j, an integer in [0, num_classes). Classes may be
/// empty: num_classes can exceed the largest observed label.
struct LabeledDataset {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  int num_classes = 0;

  LabeledDataset() = default;
  LabeledDataset(Eigen::MatrixXd feats, std::vector<int> labs, int k);

  Eigen::Index dim() const { return features.rows(); }
  Eigen::Index size() const { return features.cols(); }

  /// Same labels and class count over a replacement feature matrix
  /// (used when a network maps raw inputs to new features).
  LabeledDataset with_features(Eigen::MatrixXd feats) const;
};

/// Per-class sums of feature vectors: column i is the sum of all columns
/// of the dataset labeled i. Empty classes yield zero columns.
struct ClassSums {
  Eigen::MatrixXd columns;  // N x K
};

/// Parse a headerless CSV where each row is `label,f1,...,fN`.
/// `num_classes_override` > 0 declares K explicitly (must cover every
/// observed label); 0 means K = max label + 1.
LabeledDataset load_csv(const std::string &path, int num_classes_override = 0);

/// K Gaussian clusters in `dim` dimensions with unit-norm random mean
/// directions and isotropic noise of standard deviation `spread`.
/// Deterministic for a fixed seed. Samples are ordered class-major.
LabeledDataset generate_synthetic(std::uint64_t seed, int num_classes, int dim,
                                  int per_class, double spread);

/// Sum the feature columns of each class.
ClassSums class_sums(const LabeledDataset &ds);

/// K x |X| Kronecker-delta matrix: entry (i, x) is 1 iff c(x) = i.
Eigen::MatrixXd indicator_matrix(const LabeledDataset &ds);

/// Seed-deterministic shuffle split into (train, test). The test part gets
/// floor(size * test_fraction) samples, clamped so neither part is empty.
std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset &ds,
                                                std::uint64_t seed,
                                                double test_fraction);

}  // namespace crest
