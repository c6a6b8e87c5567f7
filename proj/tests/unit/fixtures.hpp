#pragma once

#include "drm/data.hpp"

#include <random>
#include <vector>

namespace drm::test {

inline DesignData design1(const std::vector<double>& t1, const std::vector<double>& t2) {
  return make_design(t1, t2);
}

// t = {0.1, 0.9 | 0.4, 1.2}, d = 1
inline DesignData four_point() { return design1({0.1, 0.9}, {0.4, 1.2}); }

// t = {-1, 1 | -1, 1}
inline DesignData symmetric() { return design1({-1.0, 1.0}, {-1.0, 1.0}); }

inline DesignData random_design(std::mt19937_64& gen, int n1, int n2, int d, double shift = 0.0) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd t1(n1, d), t2(n2, d);
  for (int i = 0; i < n1; ++i)
    for (int k = 0; k < d; ++k) t1(i, k) = z(gen) + shift;
  for (int i = 0; i < n2; ++i)
    for (int k = 0; k < d; ++k) t2(i, k) = z(gen);
  return make_design(t1, t2);
}

}  // namespace drm::test
