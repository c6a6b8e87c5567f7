#include "drm/likelihood.hpp"

#include "drm/errors.hpp"

#include <cmath>
#include <string>

namespace drm {

namespace {

void check_dims(const DesignData& design, const Theta& theta) {
  if (theta.dim() != design.dim()) {
    throw DimensionError("theta has beta of dimension " + std::to_string(theta.dim()) +
                         " but the design has d = " + std::to_string(design.dim()));
  }
  if (design.rho1 <= 0.0 || design.n1 == 0 || design.n2 == 0) {
    throw InvalidArgument("design must contain both samples");
  }
}

// Sums the per-row pieces of l, grad l, and hess l in a single pass. The
// shifted predictor v = u + log(rho1) turns log[1 + rho1 e^u] into softplus(v).
struct RowSums {
  double loglik = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

RowSums accumulate(const DesignData& design, const Theta& theta, bool want_grad, bool want_hess) {
  const auto d = static_cast<Eigen::Index>(design.dim());
  const auto n = static_cast<Eigen::Index>(design.n());
  const auto n1 = static_cast<Eigen::Index>(design.n1);
  const double log_rho = std::log(design.rho1);
  const Eigen::VectorXd u = linear_predictor(design, theta);

  RowSums sums;
  if (want_grad) sums.grad = Eigen::VectorXd::Zero(d + 1);
  if (want_hess) sums.hess = Eigen::MatrixXd::Zero(d + 1, d + 1);

  Eigen::VectorXd z(d + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = u[i] + log_rho;
    sums.loglik -= softplus(v);
    if (i < n1) sums.loglik += u[i];
    if (!want_grad && !want_hess) continue;
    z[0] = 1.0;
    z.tail(d) = design.t.row(i).transpose();
    const double s = logistic(v);
    if (want_grad) {
      sums.grad -= s * z;
      if (i < n1) sums.grad += z;
    }
    if (want_hess) {
      const double w = s * (1.0 - s);
      sums.hess.selfadjointView<Eigen::Lower>().rankUpdate(z, -w);
    }
  }
  if (want_hess) sums.hess = sums.hess.selfadjointView<Eigen::Lower>();
  return sums;
}

}  // namespace

void PenaltySpec::validate() const {
  if (!(q > 1.0) || !std::isfinite(q)) {
    throw UnsupportedPenaltyError("penalty exponent q must be > 1, got " + std::to_string(q));
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("lambda must be finite and >= 0");
  }
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw InvalidArgument("eps must be finite and >= 0");
  if (q < 2.0 && eps == 0.0) {
    throw InvalidArgument("eps = 0 is only allowed for q >= 2; the penalty curvature is "
                          "unbounded at beta = 0 otherwise");
  }
}

double softplus(double v) noexcept {
  return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
}

double logistic(double v) noexcept {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

Eigen::VectorXd linear_predictor(const DesignData& design, const Theta& theta) {
  check_dims(design, theta);
  return (design.t * theta.beta).array() + theta.alpha;
}

double empirical_loglik(const DesignData& design, const Theta& theta) {
  return accumulate(design, theta, false, false).loglik;
}

Eigen::VectorXd score(const DesignData& design, const Theta& theta) {
  return accumulate(design, theta, true, false).grad;
}

Eigen::MatrixXd hessian(const DesignData& design, const Theta& theta) {
  return accumulate(design, theta, false, true).hess;
}

PenaltyTerms penalty_terms(const Eigen::VectorXd& beta, const PenaltySpec& spec) {
  spec.validate();
  const auto d = beta.size();
  const double q = spec.q;
  PenaltyTerms out;
  out.gradient = Eigen::VectorXd::Zero(d + 1);
  out.hessian_diag = Eigen::VectorXd::Zero(d + 1);
  for (Eigen::Index k = 0; k < d; ++k) {
    const double b = beta[k];
    if (q == 2.0) {
      out.value += b * b;
      out.gradient[k + 1] = 2.0 * b;
      out.hessian_diag[k + 1] = 2.0;
    } else if (q > 2.0) {
      const double a = std::abs(b);
      out.value += std::pow(a, q);
      out.gradient[k + 1] = b == 0.0 ? 0.0 : std::copysign(q * std::pow(a, q - 1.0), b);
      out.hessian_diag[k + 1] = q * (q - 1.0) * std::pow(a, q - 2.0);
    } else {
      // Smoothed |b| = s. Derivatives are those of s^q itself, so Newton sees
      // a consistent gradient/Hessian pair.
      const double e2 = spec.eps * spec.eps;
      const double s2 = b * b + e2;
      const double s = std::sqrt(s2);
      out.value += std::pow(s, q);
      out.gradient[k + 1] = q * b * std::pow(s, q - 2.0);
      out.hessian_diag[k + 1] = q * std::pow(s, q - 4.0) * ((q - 1.0) * b * b + e2);
    }
  }
  return out;
}

double penalized_loglik(const DesignData& design, const Theta& theta, const PenaltySpec& spec) {
  const double l = empirical_loglik(design, theta);
  if (spec.lambda == 0.0) {
    spec.validate();
    return l;
  }
  return l - spec.lambda * penalty_terms(theta.beta, spec).value;
}

Eigen::VectorXd penalized_score(const DesignData& design, const Theta& theta,
                                const PenaltySpec& spec) {
  return score(design, theta) - spec.lambda * penalty_terms(theta.beta, spec).gradient;
}

Eigen::MatrixXd penalized_hessian(const DesignData& design, const Theta& theta,
                                  const PenaltySpec& spec) {
  Eigen::MatrixXd h = hessian(design, theta);
  h.diagonal() -= spec.lambda * penalty_terms(theta.beta, spec).hessian_diag;
  return h;
}

PenalizedEvaluation evaluate_penalized(const DesignData& design, const Theta& theta,
                                       const PenaltySpec& spec) {
  auto sums = accumulate(design, theta, true, true);
  const auto pen = penalty_terms(theta.beta, spec);
  PenalizedEvaluation out;
  out.loglik = sums.loglik;
  out.penalized = sums.loglik - spec.lambda * pen.value;
  out.gradient = std::move(sums.grad);
  out.gradient -= spec.lambda * pen.gradient;
  out.hessian = std::move(sums.hess);
  out.hessian.diagonal() -= spec.lambda * pen.hessian_diag;
  return out;
}

}  // namespace drm
