#include "crest/gram.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "crest/errors.hpp"

namespace crest {

namespace {

// The effective-learning products on alpha*lambda, and the eigenvalue
// ratio limit they motivate.
constexpr double kAlphaLambdaMaxLimit = 0.25;
constexpr double kAlphaLambdaMinFloor = 0.0025;
constexpr double kRatioLimit = 500.0;

}  // namespace

GramSystem::GramSystem(Eigen::MatrixXd gram, RidgePolicy policy)
    : gram_(std::move(gram)) {
  if (gram_.rows() != gram_.cols()) {
    throw DimensionError("Gram matrix must be square");
  }
  const Eigen::Index n = gram_.rows();
  const double sym_err = (gram_ - gram_.transpose()).cwiseAbs().maxCoeff();
  const double scale = gram_.cwiseAbs().maxCoeff();
  if (scale > 0.0 && sym_err > 1e-12 * scale) {
    throw DimensionError("Gram matrix is not symmetric");
  }
  trace_gram_ = gram_.trace();

  auto attempt = [&](double eps) {
    Eigen::MatrixXd a = gram_;
    if (eps > 0.0) {
      a.diagonal().array() += eps;
    }
    llt_.compute(a);
    return llt_.info() == Eigen::Success;
  };

  switch (policy.kind) {
    case RidgePolicy::Kind::None:
      ridge_ = 0.0;
      if (!attempt(0.0)) {
        throw SingularGramError("singular Gram", trace_gram_);
      }
      break;
    case RidgePolicy::Kind::Fixed:
      ridge_ = policy.epsilon;
      if (!attempt(ridge_)) {
        throw SingularGramError("singular Gram", trace_gram_);
      }
      break;
    case RidgePolicy::Kind::Auto:
      if (attempt(0.0)) {
        ridge_ = 0.0;
      } else {
        ridge_ = 1e-10 * trace_gram_ / static_cast<double>(n);
        if (!(ridge_ > 0.0) || !attempt(ridge_)) {
          throw SingularGramError("singular Gram even after ridge fallback",
                                  trace_gram_);
        }
      }
      break;
  }

  rho_ = llt_.solve(Eigen::MatrixXd::Identity(n, n));
  // Solving against I need not return an exactly symmetric matrix;
  // rho is symmetric by definition, so symmetrize.
  rho_ = ((rho_ + rho_.transpose()) * 0.5).eval();
  trace_rho_ = rho_.trace();
}

Eigen::MatrixXd GramSystem::solve(const Eigen::MatrixXd &rhs) const {
  if (rhs.rows() != gram_.rows()) {
    throw DimensionError("solve: right-hand side has " +
                         std::to_string(rhs.rows()) + " rows, Gram has " +
                         std::to_string(gram_.rows()));
  }
  return llt_.solve(rhs);
}

GramSystem build_gram(const LabeledDataset &ds, RidgePolicy policy) {
  Eigen::MatrixXd g = ds.features * ds.features.transpose();
  return GramSystem(std::move(g), policy);
}

SpectralSummary spectral_summary(const GramSystem &gs, SpectralMethod method) {
  SpectralSummary ss;
  const double n = static_cast<double>(gs.dim());
  ss.trace_bound = gs.trace_gram() * gs.trace_rho() / (n * n);

  if (method == SpectralMethod::Exact) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gs.gram());
    if (es.info() != Eigen::Success) {
      throw Error("eigendecomposition of the Gram matrix did not converge");
    }
    const double lmin = std::max(es.eigenvalues().minCoeff(), 0.0);
    const double lmax = es.eigenvalues().maxCoeff();
    ss.lambda_max = lmax;
    ss.lambda_min = lmin;
    ss.ratio = lmax / lmin;  // +inf when the matrix is exactly singular
  }
  return ss;
}

LearnabilityReport learnability_verdict(const SpectralSummary &ss) {
  std::ostringstream why;
  why.precision(4);
  why << "effective learning needs alpha*lambda_max < " << kAlphaLambdaMaxLimit
      << " and alpha*lambda_min > " << kAlphaLambdaMinFloor
      << ", i.e. lambda_max/lambda_min < " << kRatioLimit << "; ";

  Verdict v;
  if (ss.ratio.has_value() && *ss.ratio < kRatioLimit) {
    why << "exact ratio " << *ss.ratio << " is below the limit";
    v = Verdict::Learnable;
  } else if (ss.trace_bound >= kRatioLimit) {
    why << "trace bound " << ss.trace_bound
        << " already puts the ratio at or above the limit";
    v = Verdict::Unlearnable;
  } else {
    why << "trace bound " << ss.trace_bound << " is below the limit but the ";
    if (ss.ratio.has_value()) {
      why << "exact ratio " << *ss.ratio << " is not";
    } else {
      why << "exact ratio is unknown";
    }
    v = Verdict::Marginal;
  }
  return {v, why.str()};
}

const char *verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Learnable:
      return "learnable";
    case Verdict::Marginal:
      return "marginal";
    case Verdict::Unlearnable:
      return "unlearnable";
  }
  return "?";
}

}  // namespace crest
