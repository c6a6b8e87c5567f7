#pragma once

// Population limits of the estimating equations for a known baseline g2:
// the moment matrices A, V, S, the asymptotic bias of the penalized
// estimator and the covariance function of the limiting G2 process.

#include "drm/data.hpp"
#include "drm/likelihood.hpp"

#include <Eigen/Dense>

#include <functional>

namespace drm {

struct DistSpec {
  enum class Family { lognormal, custom };

  Family family = Family::lognormal;
  double mu2 = 0.0;
  double sigma = 1.0;
  std::function<double(double)> density;
  double lower = 0.0;
  double upper = 0.0;

  static DistSpec lognormal(double mu2, double sigma);
  // Checks that `density` is nonnegative on a probe grid and integrates to 1
  // within 1e-8 over [lower, upper]; either bound may be infinite.
  static DistSpec custom(std::function<double(double)> density, double lower, double upper);

  double cdf(double x) const;
};

struct PopulationMatrices {
  Eigen::MatrixXd A;
  Eigen::MatrixXd V;
  Eigen::MatrixXd S;
  double condition_A = 0.0;
};

// A(t): the moment integrals of w(x) (1, h(x)) (1, h(x))' dG2 over x <= t,
// with w(x) = exp(alpha + beta' h(x)) / (1 + rho1 exp(alpha + beta' h(x))).
struct PartialMoments {
  double G2 = 0.0;
  Eigen::MatrixXd A;

  // (A11(t), A21(t)')'
  Eigen::VectorXd first_column() const { return A.col(0); }
};

// alpha = (mu2^2 - mu1^2) / (2 sigma^2), beta = (mu1 - mu2) / sigma^2 for h = log.
Theta lognormal_true_theta(double mu1, double mu2, double sigma);

PartialMoments partial_moments(const DistSpec& dist, const Theta& theta, double rho1,
                               const HTransform& h, double t);

PopulationMatrices population_matrices(const DistSpec& dist, const Theta& theta, double rho1,
                                       const HTransform& h);

// lambda0 S^-1 b(beta0)
Eigen::VectorXd asymptotic_bias(double lambda0, const Eigen::MatrixXd& S,
                                const Eigen::VectorXd& beta0, const PenaltySpec& spec);

// Covariance of the limiting process of sqrt(n) (G2_hat(t) - G2(t)) at (s, t).
double g2_process_cov(double s, double t, const DistSpec& dist, const Theta& theta, double rho1,
                      const HTransform& h);

}  // namespace drm
