#include "drm/chisq.hpp"

#include "drm/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <string>

namespace drm {

namespace {

void check(double x, int df) {
  if (df < 1) throw InvalidArgument("chi-square degrees of freedom must be >= 1");
  if (!(x >= 0.0)) throw InvalidArgument("chi-square argument must be >= 0, got " + std::to_string(x));
}

}  // namespace

double chi_square_cdf(double x, int df) {
  check(x, df);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(0.5 * df, 0.5 * x);
}

double chi_square_sf(double x, int df) {
  check(x, df);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

double chi_square_quantile(double prob, int df) {
  if (df < 1) throw InvalidArgument("chi-square degrees of freedom must be >= 1");
  if (!(prob >= 0.0 && prob < 1.0)) throw InvalidArgument("quantile probability must be in [0, 1)");
  if (prob == 0.0) return 0.0;
  double lo = 0.0;
  double hi = static_cast<double>(df) + 10.0;
  while (chi_square_cdf(hi, df) < prob) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    (chi_square_cdf(mid, df) < prob ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace drm
