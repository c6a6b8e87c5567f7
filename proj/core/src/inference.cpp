#include "drm/inference.hpp"

#include "drm/chisq.hpp"
#include "drm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace drm {

namespace {

constexpr double kMinRcond = 1e-13;

Eigen::MatrixXd solve_or_throw(const Eigen::MatrixXd& m, const Eigen::MatrixXd& rhs,
                               const char* what) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (!lu.isInvertible() || lu.rcond() < kMinRcond) throw SingularityError(what);
  return lu.solve(rhs);
}

}  // namespace

double CdfEstimate::operator()(double x) const {
  const auto end = std::upper_bound(support.begin(), support.end(), x);
  const auto k = static_cast<std::size_t>(end - support.begin());
  return std::accumulate(mass.begin(), mass.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
}

double CdfEstimate::total_mass() const { return std::accumulate(mass.begin(), mass.end(), 0.0); }

JumpWeights jump_weights(const DesignData& design, const Theta& theta) {
  const Eigen::VectorXd u = linear_predictor(design, theta);
  const double log_rho = std::log(design.rho1);
  const double n2 = static_cast<double>(design.n2);
  JumpWeights w;
  w.p.resize(u.size());
  // 1 / (1 + rho e^u) = 1 - logistic(u + log rho), evaluated as logistic(-v).
  for (Eigen::Index i = 0; i < u.size(); ++i) w.p[i] = logistic(-(u[i] + log_rho)) / n2;
  return w;
}

std::pair<CdfEstimate, CdfEstimate> cdf_estimates(const DesignData& design, const Theta& theta,
                                                  std::span<const double> eval_points,
                                                  std::size_t column) {
  if (!std::is_sorted(eval_points.begin(), eval_points.end())) {
    throw InvalidArgument("cdf evaluation points must be sorted in ascending order");
  }
  if (column >= static_cast<std::size_t>(design.raw.cols())) {
    throw InvalidArgument("cdf column " + std::to_string(column) + " out of range");
  }
  const auto p = jump_weights(design, theta).p;
  const Eigen::VectorXd u = linear_predictor(design, theta);
  const auto x = design.raw.col(static_cast<Eigen::Index>(column));

  std::vector<Eigen::Index> order(static_cast<std::size_t>(x.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });

  CdfEstimate g1, g2;
  g1.which = 1;
  g2.which = 2;
  for (auto i : order) {
    const double m2 = p[i];
    const double m1 = std::exp(u[i]) * p[i];
    if (!g2.support.empty() && g2.support.back() == x[i]) {
      g2.mass.back() += m2;
      g1.mass.back() += m1;
    } else {
      g2.support.push_back(x[i]);
      g1.support.push_back(x[i]);
      g2.mass.push_back(m2);
      g1.mass.push_back(m1);
    }
  }

  for (CdfEstimate* g : {&g1, &g2}) {
    g->points.assign(eval_points.begin(), eval_points.end());
    g->values.reserve(eval_points.size());
    double cum = 0.0;
    std::size_t k = 0;
    for (double t : eval_points) {
      while (k < g->support.size() && g->support[k] <= t) cum += g->mass[k++];
      g->values.push_back(cum);
    }
  }
  return {std::move(g1), std::move(g2)};
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> estimate_A_V(const DesignData& design,
                                                         const Theta& theta) {
  const auto d = static_cast<Eigen::Index>(design.dim());
  const auto p = jump_weights(design, theta).p;
  const Eigen::VectorXd u = linear_predictor(design, theta);
  const double rho = design.rho1;
  const double log_rho = std::log(rho);

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d + 1, d + 1);
  Eigen::VectorXd z(d + 1);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    // e^u / (1 + rho e^u) = logistic(u + log rho) / rho
    const double w = logistic(u[i] + log_rho) / rho;
    z[0] = 1.0;
    z.tail(d) = design.t.row(i).transpose();
    A.selfadjointView<Eigen::Lower>().rankUpdate(z, p[i] * w);
  }
  A = A.selfadjointView<Eigen::Lower>();
  const Eigen::VectorXd a1 = A.col(0);
  Eigen::MatrixXd V = (rho / (1.0 + rho)) * A - rho * a1 * a1.transpose();
  return {std::move(A), std::move(V)};
}

CovarianceEstimate sandwich_sigma(const DesignData& design, const Theta& theta,
                                  const PenaltySpec& spec) {
  auto [A, V] = estimate_A_V(design, theta);
  const double rho = design.rho1;
  const double n = static_cast<double>(design.n());
  Eigen::MatrixXd M = (rho / (1.0 + rho)) * A;
  if (spec.lambda != 0.0) {
    M.diagonal() += (spec.lambda / n) * penalty_terms(theta.beta, spec).hessian_diag;
  } else {
    spec.validate();
  }
  const Eigen::MatrixXd Minv_V = solve_or_throw(
      M, V, "sandwich bracket is singular; use a larger lambda or more data");
  Eigen::MatrixXd Sigma = solve_or_throw(M, Minv_V.transpose(),
                                         "sandwich bracket is singular; use a larger lambda or "
                                         "more data");
  Sigma = 0.5 * (Sigma + Sigma.transpose()).eval();
  return {std::move(A), std::move(V), std::move(Sigma)};
}

WaldTest wald_test(const Eigen::VectorXd& beta_hat, const Eigen::MatrixXd& Sigma_hat,
                   std::size_t n) {
  const auto d = beta_hat.size();
  if (d == 0) throw DimensionError("wald_test needs at least one coefficient");
  Eigen::MatrixXd block;
  if (Sigma_hat.rows() == d + 1 && Sigma_hat.cols() == d + 1) {
    block = Sigma_hat.bottomRightCorner(d, d);
  } else if (Sigma_hat.rows() == d && Sigma_hat.cols() == d) {
    block = Sigma_hat;
  } else {
    throw DimensionError("Sigma shape does not match beta");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(block);
  if (llt.info() != Eigen::Success || llt.rcond() < kMinRcond) {
    throw SingularityError("beta block of Sigma is not positive definite");
  }
  WaldTest out;
  out.df = static_cast<int>(d);
  out.W = std::max(0.0, static_cast<double>(n) * beta_hat.dot(llt.solve(beta_hat)));
  out.p_value = chi_square_sf(out.W, out.df);
  return out;
}

Theta ridge_path_approximation(const DesignData& design, const Theta& theta_unrestricted,
                               double lambda) {
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
  const Eigen::MatrixXd info = -hessian(design, theta_unrestricted);
  Eigen::MatrixXd lhs = info;
  lhs.diagonal().tail(lhs.rows() - 1).array() += 2.0 * lambda;
  const Eigen::VectorXd rhs = info * theta_unrestricted.to_vector();
  Eigen::LLT<Eigen::MatrixXd> llt(lhs);
  if (llt.info() != Eigen::Success) {
    throw SingularityError("ridge path system is singular at the unrestricted estimate");
  }
  const Eigen::VectorXd v = llt.solve(rhs);
  return Theta::from_vector(v);
}

double efficiency(double mse_penalized, double mse_unpenalized) {
  if (!(mse_unpenalized > 0.0)) {
    throw InvalidArgument("efficiency needs a positive unpenalized MSE");
  }
  return mse_penalized / mse_unpenalized;
}

}  // namespace drm
