#pragma once

// Post-fit quantities: jump weights of the baseline distribution, the two
// weighted CDF estimators, plug-in moment matrices, the penalty-adjusted
// sandwich covariance and the Wald statistic built on it.

#include "drm/data.hpp"
#include "drm/likelihood.hpp"

#include <Eigen/Dense>

#include <span>
#include <utility>
#include <vector>

namespace drm {

struct JumpWeights {
  Eigen::VectorXd p;  // aligned with the design rows
};

struct CdfEstimate {
  int which = 2;                // 1 for G1, 2 for G2
  std::vector<double> support;  // sorted distinct observed values
  std::vector<double> mass;     // jump at each support point
  std::vector<double> points;   // evaluation points requested by the caller
  std::vector<double> values;   // estimate at each evaluation point

  double operator()(double x) const;
  double total_mass() const;
};

struct CovarianceEstimate {
  Eigen::MatrixXd A_hat;
  Eigen::MatrixXd V_hat;
  Eigen::MatrixXd Sigma_hat;
};

struct WaldTest {
  double W = 0.0;
  int df = 0;
  double p_value = 1.0;
};

// p_ij = 1 / (n2 [1 + rho1 exp(alpha + beta' t_ij)])
JumpWeights jump_weights(const DesignData& design, const Theta& theta);

// G2(x) = sum p_ij I(X_ij <= x), G1(x) = sum exp(alpha + beta' t_ij) p_ij I(X_ij <= x),
// ordered by raw column `column`. Throws InvalidArgument if eval_points is
// not sorted.
std::pair<CdfEstimate, CdfEstimate> cdf_estimates(const DesignData& design, const Theta& theta,
                                                  std::span<const double> eval_points,
                                                  std::size_t column = 0);

// p-weighted plug-in estimates of A and V.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> estimate_A_V(const DesignData& design,
                                                         const Theta& theta);

// Sigma = M^-1 V M^-1 with M = rho1/(1+rho1) A + (lambda/n) D(beta).
CovarianceEstimate sandwich_sigma(const DesignData& design, const Theta& theta,
                                  const PenaltySpec& spec);

// W = n beta' Sigma_22^-1 beta, compared to chi-square with d = dim(beta) df.
// Sigma may be the full (d+1)x(d+1) matrix or already the d x d beta block.
WaldTest wald_test(const Eigen::VectorXd& beta_hat, const Eigen::MatrixXd& Sigma_hat,
                   std::size_t n);

// Ridge shrinkage path from the unpenalized fit:
//   theta_lambda ~ (I + 2 lambda D_r)^-1 I theta_hat,  I = -hess l(theta_hat),
// D_r = blockdiag(0, I_d).
Theta ridge_path_approximation(const DesignData& design, const Theta& theta_unrestricted,
                               double lambda);

// MSE(penalized) / MSE(unpenalized)
double efficiency(double mse_penalized, double mse_unpenalized);

}  // namespace drm
