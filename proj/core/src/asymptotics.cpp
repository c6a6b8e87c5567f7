#include "drm/asymptotics.hpp"

#include "drm/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace drm {

namespace {

constexpr double kTruncationSigmas = 12.0;
constexpr double kQuadTol = 1e-11;
constexpr unsigned kMaxDepth = 20;

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

template <class F>
double integrate(F&& f, double a, double b, const char* what) {
  if (!(b > a)) return 0.0;
  double err = 0.0;
  double l1 = 0.0;
  const double value = Kronrod::integrate(f, a, b, kMaxDepth, kQuadTol, &err, &l1);
  if (!std::isfinite(value) || !std::isfinite(err) || err > 1e-9 * std::max(1.0, l1)) {
    throw IntegrationError(std::string("quadrature failed for ") + what +
                           " (the h moments may not be integrable)");
  }
  return value;
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

// Maps the integration variable to (x, dG2/dvariable). Lognormal integrates on
// z = log x, where integrands are smooth; custom integrates on x directly.
struct Measure {
  const DistSpec& dist;

  std::pair<double, double> range(double t) const {
    if (dist.family == DistSpec::Family::lognormal) {
      const double lo = dist.mu2 - kTruncationSigmas * dist.sigma;
      double hi = dist.mu2 + kTruncationSigmas * dist.sigma;
      if (t <= 0.0) return {lo, lo};
      if (std::isfinite(t)) hi = std::min(hi, std::log(t));
      return {lo, hi};
    }
    return {dist.lower, std::min(dist.upper, t)};
  }

  std::pair<double, double> point(double v) const {
    if (dist.family == DistSpec::Family::lognormal) {
      return {std::exp(v), normal_pdf((v - dist.mu2) / dist.sigma) / dist.sigma};
    }
    return {v, dist.density(v)};
  }
};

}  // namespace

DistSpec DistSpec::lognormal(double mu2, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mu2)) {
    throw InvalidArgument("lognormal baseline needs finite mu2 and sigma > 0");
  }
  DistSpec d;
  d.family = Family::lognormal;
  d.mu2 = mu2;
  d.sigma = sigma;
  return d;
}

DistSpec DistSpec::custom(std::function<double(double)> density, double lower, double upper) {
  if (!density) throw InvalidArgument("custom distribution needs a density");
  if (!(upper > lower)) throw InvalidArgument("custom support must satisfy lower < upper");
  DistSpec d;
  d.family = Family::custom;
  d.density = std::move(density);
  d.lower = lower;
  d.upper = upper;

  const double a = std::isfinite(lower) ? lower : -50.0;
  const double b = std::isfinite(upper) ? upper : (std::isfinite(lower) ? lower + 100.0 : 50.0);
  for (int k = 0; k <= 200; ++k) {
    const double x = a + (b - a) * k / 200.0;
    const double f = d.density(x);
    if (!(f >= 0.0) || !std::isfinite(f)) {
      throw InvalidArgument("custom density must be finite and nonnegative (fails at x = " +
                            std::to_string(x) + ")");
    }
  }
  const double mass = integrate(d.density, lower, upper, "custom density normalization");
  if (std::abs(mass - 1.0) > 1e-8) {
    throw InvalidArgument("custom density integrates to " + std::to_string(mass) +
                          ", expected 1 within 1e-8");
  }
  return d;
}

double DistSpec::cdf(double x) const {
  if (family == Family::lognormal) {
    if (x <= 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    return 0.5 * std::erfc(-(std::log(x) - mu2) / (sigma * std::numbers::sqrt2));
  }
  if (x <= lower) return 0.0;
  if (x >= upper) return 1.0;
  return integrate(density, lower, x, "custom cdf");
}

Theta lognormal_true_theta(double mu1, double mu2, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be > 0");
  const double s2 = sigma * sigma;
  Eigen::VectorXd beta(1);
  beta[0] = (mu1 - mu2) / s2;
  return Theta((mu2 * mu2 - mu1 * mu1) / (2.0 * s2), std::move(beta));
}

PartialMoments partial_moments(const DistSpec& dist, const Theta& theta, double rho1,
                               const HTransform& h, double t) {
  if (!(rho1 > 0.0)) throw InvalidArgument("rho1 must be > 0");
  const auto p = static_cast<Eigen::Index>(theta.dim() + 1);
  if (h.output_dim(1) != theta.dim()) {
    throw DimensionError("h output dimension does not match beta");
  }
  const Measure measure{dist};
  const auto [lo, hi] = measure.range(t);
  const double log_rho = std::log(rho1);

  // Weighted regressor z(x) = (1, h(x)) scaled by w(x) g2(x).
  auto weight_and_z = [&](double v, Eigen::VectorXd& z) {
    const auto [x, g] = measure.point(v);
    if (g == 0.0) return 0.0;
    z[0] = 1.0;
    z.tail(p - 1) = h.apply(Observation{x});
    const double u = theta.alpha + theta.beta.dot(z.tail(p - 1));
    return g * logistic(u + log_rho) / rho1;
  };

  PartialMoments out;
  out.A = Eigen::MatrixXd::Zero(p, p);
  if (dist.family == DistSpec::Family::lognormal) {
    out.G2 = dist.cdf(t);
  } else {
    out.G2 = hi > lo ? integrate(dist.density, lo, hi, "G2") : 0.0;
  }
  if (!(hi > lo)) return out;

  for (Eigen::Index r = 0; r < p; ++r) {
    for (Eigen::Index c = 0; c <= r; ++c) {
      auto f = [&, r, c](double v) {
        Eigen::VectorXd z(p);
        const double w = weight_and_z(v, z);
        return w == 0.0 ? 0.0 : w * z[r] * z[c];
      };
      out.A(r, c) = out.A(c, r) = integrate(f, lo, hi, "A(t)");
    }
  }
  return out;
}

PopulationMatrices population_matrices(const DistSpec& dist, const Theta& theta, double rho1,
                                       const HTransform& h) {
  const auto full =
      partial_moments(dist, theta, rho1, h, std::numeric_limits<double>::infinity());
  PopulationMatrices out;
  out.A = full.A;
  const Eigen::VectorXd a1 = out.A.col(0);
  out.S = (rho1 / (1.0 + rho1)) * out.A;
  out.V = out.S - rho1 * a1 * a1.transpose();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.A);
  const auto sv = svd.singularValues();
  out.condition_A = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1]
                                            : std::numeric_limits<double>::infinity();
  return out;
}

Eigen::VectorXd asymptotic_bias(double lambda0, const Eigen::MatrixXd& S,
                                const Eigen::VectorXd& beta0, const PenaltySpec& spec) {
  if (S.rows() != beta0.size() + 1 || S.cols() != S.rows()) {
    throw DimensionError("S must be (d+1)x(d+1) for beta of dimension d");
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
  if (!lu.isInvertible()) throw SingularityError("S is singular");
  const auto b = penalty_terms(beta0, spec).gradient;
  return lambda0 * lu.solve(b);
}

double g2_process_cov(double s, double t, const DistSpec& dist, const Theta& theta, double rho1,
                      const HTransform& h) {
  const double inf = std::numeric_limits<double>::infinity();
  const auto full = partial_moments(dist, theta, rho1, h, inf);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(full.A);
  if (!lu.isInvertible()) throw SingularityError("population matrix A is singular");

  const auto at_s = partial_moments(dist, theta, rho1, h, s);
  const auto at_t = partial_moments(dist, theta, rho1, h, t);
  const auto& at_min = s <= t ? at_s : at_t;
  const Eigen::VectorXd as = at_s.first_column();
  const Eigen::VectorXd at = at_t.first_column();

  const double scale = 1.0 + rho1;
  return scale * (at_min.G2 - at_s.G2 * at_t.G2) - rho1 * scale * at_min.A(0, 0) +
         rho1 * scale * at.dot(lu.solve(as));
}

}  // namespace drm
