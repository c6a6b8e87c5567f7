#pragma once

// Maximizer of the penalized empirical log-likelihood, separation diagnostics
// and a derivative-free grid search used as an independent check.

#include "drm/data.hpp"
#include "drm/errors.hpp"
#include "drm/likelihood.hpp"

#include <utility>
#include <vector>

namespace drm {

struct FitOptions {
  double tol = 1e-8;  // sup-norm of the penalized score
  int max_iter = 100;
  double divergence_norm = 1e4;

  void validate() const;
};

enum class SeparationKind { none, quasi_complete, complete };

const char* to_string(SeparationKind kind) noexcept;

struct FitResult {
  Theta theta;
  bool converged = false;
  int iterations = 0;
  double loglik = 0.0;
  double penalized_loglik = 0.0;
  double score_norm = 0.0;
  bool separation_flag = false;
  SeparationKind separation = SeparationKind::none;
  // l_p after each accepted Newton step, starting with the value at theta = 0.
  // Non-decreasing up to rounding noise of 1e-12 * (1 + |l_p|).
  std::vector<double> trace;
};

// Thrown for lambda = 0 when the unpenalized maximizer does not exist. The
// estimate reached when iteration stopped is kept for callers that record
// capped estimates (the simulation runner does).
class NonexistenceError : public Error {
 public:
  NonexistenceError(const std::string& what, FitResult capped)
      : Error(what), capped_(std::move(capped)) {}
  const FitResult& capped() const noexcept { return capped_; }

 private:
  FitResult capped_;
};

// Damped Newton ascent on l_p from theta = 0.
FitResult fit(const DesignData& design, const PenaltySpec& spec, const FitOptions& opts = {});

// d = 1 uses the interval rule; d > 1 solves two small linear programs.
SeparationKind detect_separation(const DesignData& design);
// The linear-programming test for any d. Exposed so the interval rule can be
// checked against it.
SeparationKind detect_separation_lp(const DesignData& design);

using Box = std::vector<std::pair<double, double>>;

// Best point of a regular grid with `resolution` intervals per axis over
// `bounds` (one (lo, hi) pair per coordinate of (alpha, beta)). Doubling
// the resolution gives a nested grid. Limited to d + 1 <= 3.
Theta grid_oracle(const DesignData& design, const PenaltySpec& spec, const Box& bounds,
                  int resolution);

// Repeated grid_oracle, each round zooming to +-2 grid spacings around the
// previous best point. Relies on concavity of l_p.
Theta grid_oracle_refined(const DesignData& design, const PenaltySpec& spec, Box bounds,
                          int resolution, int rounds);

}  // namespace drm
