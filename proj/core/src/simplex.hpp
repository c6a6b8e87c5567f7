#pragma once

// Dense tableau simplex for small problems of the form
//
//   maximize c'x  subject to  A x <= b,  x >= 0,  with b >= 0,
//
// so the origin is a feasible starting basis and no phase one is needed.
// Bland's rule prevents cycling. Only used for separation diagnostics, where
// the problems have a few dozen constraints.

#include <Eigen/Dense>

namespace drm::detail {

struct LpResult {
  bool bounded = true;
  double objective = 0.0;
  Eigen::VectorXd x;
};

LpResult maximize_from_origin(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                              const Eigen::VectorXd& c);

}  // namespace drm::detail
