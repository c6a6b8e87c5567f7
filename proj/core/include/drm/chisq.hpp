#pragma once

namespace drm {

// P(X <= x) for X ~ chi-square(df); regularized lower incomplete gamma P(df/2, x/2).
double chi_square_cdf(double x, int df);
// Upper tail 1 - cdf, computed directly so small p-values keep their precision.
double chi_square_sf(double x, int df);
// Inverse of chi_square_cdf by bisection, absolute tolerance 1e-10 in x.
double chi_square_quantile(double prob, int df);

}  // namespace drm
