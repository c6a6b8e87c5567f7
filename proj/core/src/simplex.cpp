#include "simplex.hpp"

#include "drm/errors.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace drm::detail {

LpResult maximize_from_origin(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                              const Eigen::VectorXd& c) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (b.size() != m || c.size() != n) throw DimensionError("simplex: inconsistent shapes");
  if ((b.array() < 0.0).any()) throw InvalidArgument("simplex: b must be nonnegative");

  // Columns: n structural, m slack, 1 rhs. Last row holds reduced costs.
  Eigen::MatrixXd tab = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  tab.topLeftCorner(m, n) = A;
  tab.block(0, n, m, m).setIdentity();
  tab.topRightCorner(m, 1) = b;
  tab.bottomLeftCorner(1, n) = -c.transpose();

  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  const double scale = 1.0 + A.cwiseAbs().maxCoeff() + c.cwiseAbs().maxCoeff();
  const double tol = 1e-12 * scale;
  const Eigen::Index cols = n + m;
  const int max_pivots = 50 * static_cast<int>(n + m + 1);

  LpResult out;
  for (int it = 0; it < max_pivots; ++it) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (tab(m, j) < -tol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;

    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double a = tab(i, enter);
      if (a > tol) {
        const double ratio = tab(i, cols) / a;
        if (ratio < best - tol ||
            (std::abs(ratio - best) <= tol && leave >= 0 &&
             basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) {
      out.bounded = false;
      out.objective = std::numeric_limits<double>::infinity();
      return out;
    }

    tab.row(leave) /= tab(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i != leave && tab(i, enter) != 0.0) tab.row(i) -= tab(i, enter) * tab.row(leave);
    }
    basis[static_cast<std::size_t>(leave)] = enter;
  }

  out.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto j = basis[static_cast<std::size_t>(i)];
    if (j < n) out.x[j] = tab(i, cols);
  }
  out.objective = c.dot(out.x);
  return out;
}

}  // namespace drm::detail
