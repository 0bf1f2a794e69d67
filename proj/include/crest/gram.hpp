#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <optional>
#include <string>

#include "crest/dataset.hpp"

namespace crest {

/// How to regularize the Gram matrix before factorization.
///
/// `Auto` tries the matrix as-is and, if the SPD factorization fails, adds
/// a scale-relative ridge of 1e-10 * trace / N. `None` never adds a ridge.
/// `Fixed` always adds the given epsilon.
struct RidgePolicy {
  enum class Kind { Auto, None, Fixed };
  Kind kind = Kind::Auto;
  double epsilon = 0.0;  // used only when kind == Fixed

  static RidgePolicy auto_ridge() { return {Kind::Auto, 0.0}; }
  static RidgePolicy none() { return {Kind::None, 0.0}; }
  static RidgePolicy fixed(double eps) { return {Kind::Fixed, eps}; }
};

/// The Gram matrix Y*Y' of a feature set, its (possibly ridge-regularized)
/// inverse, the cached SPD factorization used for all solves against it,
/// and the two traces used by the learnability bound.
class GramSystem {
 public:
  /// Build from an explicit symmetric PSD matrix.
  GramSystem(Eigen::MatrixXd gram, RidgePolicy policy);

  const Eigen::MatrixXd &gram() const { return gram_; }
  const Eigen::MatrixXd &rho() const { return rho_; }
  double ridge() const { return ridge_; }
  double trace_gram() const { return trace_gram_; }
  double trace_rho() const { return trace_rho_; }
  Eigen::Index dim() const { return gram_.rows(); }

  /// Solve (gram + ridge*I) x = b column-by-column via the cached
  /// factorization. Preferred over multiplying by rho().
  Eigen::MatrixXd solve(const Eigen::MatrixXd &rhs) const;

 private:
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd rho_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double ridge_ = 0.0;
  double trace_gram_ = 0.0;
  double trace_rho_ = 0.0;
};

/// Eigenvalue extremes of a Gram matrix plus the trace-product lower bound
/// on lambda_max / lambda_min. The eigen fields are absent when only the
/// bound was requested.
struct SpectralSummary {
  std::optional<double> lambda_max;
  std::optional<double> lambda_min;
  std::optional<double> ratio;
  double trace_bound = 0.0;
};

enum class SpectralMethod { Exact, TraceOnly };

enum class Verdict { Learnable, Marginal, Unlearnable };

struct LearnabilityReport {
  Verdict verdict;
  std::string rationale;
};

/// Gram matrix of the dataset's feature columns.
GramSystem build_gram(const LabeledDataset &ds,
                      RidgePolicy policy = RidgePolicy::auto_ridge());

/// Eigen-extremes (Exact) and/or the cheap trace bound
/// (1/N^2) * Trace(YY') * Trace(rho).
SpectralSummary spectral_summary(const GramSystem &gs, SpectralMethod method);

/// Classify whether plain gradient descent on the decision layer can learn
/// effectively: the eigenvalue ratio must stay below 500.
LearnabilityReport learnability_verdict(const SpectralSummary &ss);

const char *verdict_name(Verdict v);

}  // namespace crest
