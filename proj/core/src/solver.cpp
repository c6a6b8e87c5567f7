#include "drm/solver.hpp"

#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace drm {

namespace {

constexpr int kMaxHalvings = 30;
constexpr double kMinRcond = 1e-13;
constexpr double kSeparationTol = 1e-9;

// Differences in l_p below this are rounding noise; inside the band a step is
// judged by whether it reduces the score instead.
double noise_band(double value) { return 1e-12 * (1.0 + std::abs(value)); }

bool factor_negative(const Eigen::MatrixXd& h, Eigen::LLT<Eigen::MatrixXd>& llt) {
  llt.compute(-h);
  return llt.info() == Eigen::Success && llt.rcond() > kMinRcond;
}

// Columns centered and scaled to unit range so LP tolerances are meaningful.
Eigen::MatrixXd augmented_signed_rows(const DesignData& design) {
  const auto n = static_cast<Eigen::Index>(design.n());
  const auto d = static_cast<Eigen::Index>(design.dim());
  Eigen::MatrixXd rows(n, d + 1);
  rows.col(0).setOnes();
  for (Eigen::Index k = 0; k < d; ++k) {
    const auto col = design.t.col(k);
    const double lo = col.minCoeff();
    const double hi = col.maxCoeff();
    const double span = hi > lo ? hi - lo : 1.0;
    rows.col(k + 1) = (col.array() - 0.5 * (lo + hi)) / span;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (design.group[static_cast<std::size_t>(i)] == 2) rows.row(i) *= -1.0;
  }
  return rows;
}

SeparationKind interval_rule(const DesignData& design) {
  const auto n1 = static_cast<Eigen::Index>(design.n1);
  const auto n2 = static_cast<Eigen::Index>(design.n2);
  const auto t1 = design.t.col(0).head(n1);
  const auto t2 = design.t.col(0).tail(n2);
  const double lo1 = t1.minCoeff(), hi1 = t1.maxCoeff();
  const double lo2 = t2.minCoeff(), hi2 = t2.maxCoeff();
  if (hi1 < lo2 || hi2 < lo1) return SeparationKind::complete;
  const bool all_equal = lo1 == hi1 && lo2 == hi2 && lo1 == lo2;
  if (!all_equal && (hi1 == lo2 || hi2 == lo1)) return SeparationKind::quasi_complete;
  return SeparationKind::none;
}

bool growing_norm(const std::vector<double>& norms) {
  constexpr std::size_t window = 5;
  if (norms.size() <= window) return false;
  for (std::size_t k = norms.size() - window; k < norms.size(); ++k) {
    if (!(norms[k] > norms[k - 1])) return false;
  }
  return true;
}

void finish(FitResult& r, const DesignData& design, const PenaltySpec& spec) {
  const auto eval = evaluate_penalized(design, r.theta, spec);
  r.loglik = eval.loglik;
  r.penalized_loglik = eval.penalized;
  r.score_norm = eval.gradient.lpNorm<Eigen::Infinity>();
}

// Newton iterations on data where the unpenalized maximizer does not exist;
// runs until the iteration cap, the divergence bound, or numerical stall.
FitResult capped_path(const DesignData& design, const PenaltySpec& spec, const FitOptions& opts,
                      FitResult r) {
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::VectorXd theta = r.theta.to_vector();
  double current = penalized_loglik(design, r.theta, spec);
  for (; r.iterations < opts.max_iter; ++r.iterations) {
    if (r.theta.beta.norm() > opts.divergence_norm) break;
    const auto eval = evaluate_penalized(design, r.theta, spec);
    if (!factor_negative(eval.hessian, llt)) break;
    const Eigen::VectorXd step = llt.solve(eval.gradient);
    double scale = 1.0;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h, scale *= 0.5) {
      const Theta cand = Theta::from_vector(theta + scale * step);
      const double value = penalized_loglik(design, cand, spec);
      if (std::isfinite(value) && value > current) {
        theta += scale * step;
        r.theta = cand;
        current = value;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    r.trace.push_back(current);
  }
  finish(r, design, spec);
  r.converged = false;
  return r;
}

}  // namespace

void FitOptions::validate() const {
  if (!(tol > 0.0)) throw InvalidArgument("fit tolerance must be > 0");
  if (max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
  if (!(divergence_norm > 0.0)) throw InvalidArgument("divergence_norm must be > 0");
}

const char* to_string(SeparationKind kind) noexcept {
  switch (kind) {
    case SeparationKind::none:
      return "none";
    case SeparationKind::quasi_complete:
      return "quasi_complete";
    case SeparationKind::complete:
      return "complete";
  }
  return "none";
}

SeparationKind detect_separation_lp(const DesignData& design) {
  const Eigen::MatrixXd rows = augmented_signed_rows(design);
  const auto n = rows.rows();
  const auto p = rows.cols();

  // Strict separation: max tau s.t. rows * w >= tau, |w_k| <= 1, 0 <= tau <= 1,
  // with w = w_plus - w_minus.
  {
    const Eigen::Index nv = 2 * p + 1;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + nv, nv);
    A.block(0, 0, n, p) = -rows;
    A.block(0, p, n, p) = rows;
    A.col(2 * p).head(n).setOnes();
    A.bottomRows(nv).setIdentity();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + nv);
    b.tail(nv).setOnes();
    Eigen::VectorXd c = Eigen::VectorXd::Zero(nv);
    c[2 * p] = 1.0;
    const auto lp = detail::maximize_from_origin(A, b, c);
    if (lp.objective > kSeparationTol) return SeparationKind::complete;
  }
  // Weak separation: max sum(rows * w) s.t. rows * w >= 0, |w_k| <= 1. A positive
  // optimum means some w puts every point on its own side, at least one strictly.
  {
    const Eigen::Index nv = 2 * p;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + nv, nv);
    A.block(0, 0, n, p) = -rows;
    A.block(0, p, n, p) = rows;
    A.bottomRows(nv).setIdentity();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + nv);
    b.tail(nv).setOnes();
    const Eigen::VectorXd colsum = rows.colwise().sum().transpose();
    Eigen::VectorXd c(nv);
    c << colsum, -colsum;
    const auto lp = detail::maximize_from_origin(A, b, c);
    if (lp.objective > kSeparationTol * static_cast<double>(n)) {
      return SeparationKind::quasi_complete;
    }
  }
  return SeparationKind::none;
}

SeparationKind detect_separation(const DesignData& design) {
  if (design.dim() == 1) return interval_rule(design);
  return detect_separation_lp(design);
}

FitResult fit(const DesignData& design, const PenaltySpec& spec, const FitOptions& opts) {
  spec.validate();
  opts.validate();

  FitResult r;
  r.theta = Theta::zero(design.dim());
  r.separation = detect_separation(design);
  r.separation_flag = r.separation != SeparationKind::none;
  r.trace.push_back(penalized_loglik(design, r.theta, spec));

  const bool unpenalized = spec.lambda == 0.0;
  if (unpenalized && r.separation_flag) {
    throw NonexistenceError(std::string("data are ") + to_string(r.separation) +
                                " separated: the unpenalized estimate does not exist; use "
                                "lambda > 0",
                            capped_path(design, spec, opts, std::move(r)));
  }

  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::VectorXd theta = r.theta.to_vector();
  double current = r.trace.back();
  std::vector<double> norms{0.0};

  for (;;) {
    const auto eval = evaluate_penalized(design, r.theta, spec);
    const double gnorm = eval.gradient.lpNorm<Eigen::Infinity>();
    if (gnorm <= opts.tol) {
      if (!factor_negative(eval.hessian, llt)) {
        throw SingularHessianError("penalized Hessian is not negative definite at the "
                                   "stationary point; try lambda > 0");
      }
      // One polishing step so the stationarity identities hold well below tol.
      const Eigen::VectorXd polished = theta + llt.solve(eval.gradient);
      const Theta cand = Theta::from_vector(polished);
      const auto next = evaluate_penalized(design, cand, spec);
      if (next.penalized >= current - noise_band(current) &&
          next.gradient.lpNorm<Eigen::Infinity>() <= gnorm) {
        r.theta = cand;
        current = next.penalized;
        r.trace.push_back(current);
      }
      r.converged = true;
      break;
    }
    if (r.iterations >= opts.max_iter) break;
    if (unpenalized && r.theta.beta.norm() > opts.divergence_norm) {
      finish(r, design, spec);
      throw NonexistenceError("estimate diverged (|beta| > " +
                                  std::to_string(opts.divergence_norm) +
                                  "); the unpenalized estimate does not exist, use lambda > 0",
                              std::move(r));
    }
    if (!factor_negative(eval.hessian, llt)) {
      throw SingularHessianError("Newton system is singular; try lambda > 0");
    }
    const Eigen::VectorXd step = llt.solve(eval.gradient);

    double scale = 1.0;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h, scale *= 0.5) {
      const Theta cand = Theta::from_vector(theta + scale * step);
      const double value = penalized_loglik(design, cand, spec);
      if (!std::isfinite(value)) continue;
      bool ok = value >= current;
      if (!ok && value >= current - noise_band(current)) {
        ok = penalized_score(design, cand, spec).lpNorm<Eigen::Infinity>() < gnorm;
      }
      if (ok) {
        theta += scale * step;
        r.theta = cand;
        current = value;
        accepted = true;
        break;
      }
    }
    ++r.iterations;
    if (!accepted) break;
    r.trace.push_back(current);
    norms.push_back(r.theta.beta.norm());
  }

  finish(r, design, spec);
  if (!r.converged && unpenalized && growing_norm(norms)) {
    throw NonexistenceError("no convergence within max_iter while |beta| kept growing; the "
                            "unpenalized estimate appears not to exist, use lambda > 0",
                            std::move(r));
  }
  return r;
}

Theta grid_oracle(const DesignData& design, const PenaltySpec& spec, const Box& bounds,
                  int resolution) {
  const auto p = design.dim() + 1;
  if (p > 3) throw InvalidArgument("grid_oracle supports at most d + 1 = 3 parameters");
  if (resolution < 2) throw InvalidArgument("grid_oracle resolution must be >= 2");
  if (bounds.size() != p) throw InvalidBoundsError("bounds must give one interval per parameter");
  for (const auto& [lo, hi] : bounds) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
      throw InvalidBoundsError("each bound interval must satisfy lo < hi and be finite");
    }
  }

  const auto points = static_cast<std::size_t>(resolution) + 1;
  std::size_t total = 1;
  for (std::size_t k = 0; k < p; ++k) total *= points;

  Eigen::VectorXd v(static_cast<Eigen::Index>(p));
  Eigen::VectorXd best_v = v;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t k = 0; k < p; ++k) {
      const auto idx = rem % points;
      rem /= points;
      const auto& [lo, hi] = bounds[k];
      v[static_cast<Eigen::Index>(k)] =
          lo + (hi - lo) * static_cast<double>(idx) / static_cast<double>(resolution);
    }
    const double value = penalized_loglik(design, Theta::from_vector(v), spec);
    if (value > best) {
      best = value;
      best_v = v;
    }
  }
  return Theta::from_vector(best_v);
}

Theta grid_oracle_refined(const DesignData& design, const PenaltySpec& spec, Box bounds,
                          int resolution, int rounds) {
  Theta best = grid_oracle(design, spec, bounds, resolution);
  for (int r = 1; r < rounds; ++r) {
    const Eigen::VectorXd centre = best.to_vector();
    for (std::size_t k = 0; k < bounds.size(); ++k) {
      const double spacing = (bounds[k].second - bounds[k].first) / resolution;
      const double c = centre[static_cast<Eigen::Index>(k)];
      bounds[k] = {c - 2.0 * spacing, c + 2.0 * spacing};
    }
    best = grid_oracle(design, spec, bounds, resolution);
  }
  return best;
}

}  // namespace drm
