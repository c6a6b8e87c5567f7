#pragma once

// Profile empirical log-likelihood of the two-sample density ratio model
//
//   l(theta) = -sum_ij log[1 + rho1 exp(alpha + beta' t_ij)] + sum_j (alpha + beta' t_1j)
//
// together with the L^q penalty J(beta) = sum_k |beta_k|^q and the penalized
// objective l_p = l - lambda * J. Gradients and Hessians are taken with
// respect to the stacked parameter (alpha, beta).

#include "drm/data.hpp"

#include <Eigen/Dense>

namespace drm {

struct Theta {
  double alpha = 0.0;
  Eigen::VectorXd beta;

  Theta() = default;
  Theta(double a, Eigen::VectorXd b) : alpha(a), beta(std::move(b)) {}

  static Theta zero(std::size_t d) {
    return Theta(0.0, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d)));
  }
  // (alpha, beta_1, ..., beta_d)
  static Theta from_vector(const Eigen::VectorXd& v) {
    return Theta(v[0], v.tail(v.size() - 1));
  }
  Eigen::VectorXd to_vector() const {
    Eigen::VectorXd v(beta.size() + 1);
    v << alpha, beta;
    return v;
  }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(beta.size()); }
};

struct PenaltySpec {
  double q = 2.0;
  double lambda = 0.0;
  // |beta| is smoothed as sqrt(beta^2 + eps^2) when 1 < q < 2.
  double eps = 1e-8;

  // UnsupportedPenaltyError for q <= 1, InvalidArgument otherwise.
  void validate() const;
};

struct PenaltyTerms {
  double value = 0.0;            // J(beta)
  Eigen::VectorXd gradient;      // b, length d + 1, first entry 0
  Eigen::VectorXd hessian_diag;  // diag(D), length d + 1, first entry 0
};

// Stable log(1 + exp(v)).
double softplus(double v) noexcept;
// exp(v) / (1 + exp(v)) without overflow.
double logistic(double v) noexcept;

// Linear predictors alpha + t_ij' beta for every pooled row.
Eigen::VectorXd linear_predictor(const DesignData& design, const Theta& theta);

double empirical_loglik(const DesignData& design, const Theta& theta);
Eigen::VectorXd score(const DesignData& design, const Theta& theta);
Eigen::MatrixXd hessian(const DesignData& design, const Theta& theta);

PenaltyTerms penalty_terms(const Eigen::VectorXd& beta, const PenaltySpec& spec);

double penalized_loglik(const DesignData& design, const Theta& theta, const PenaltySpec& spec);
Eigen::VectorXd penalized_score(const DesignData& design, const Theta& theta,
                                const PenaltySpec& spec);
Eigen::MatrixXd penalized_hessian(const DesignData& design, const Theta& theta,
                                  const PenaltySpec& spec);

// Value, gradient and Hessian of l_p from one pass over the data.
struct PenalizedEvaluation {
  double loglik = 0.0;
  double penalized = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};
PenalizedEvaluation evaluate_penalized(const DesignData& design, const Theta& theta,
                                       const PenaltySpec& spec);

}  // namespace drm
