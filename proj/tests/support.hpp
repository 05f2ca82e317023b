#pragma once

#include <algorithm>
#include <cmath>

#include "hwlab/grid.hpp"

namespace testing {

inline double max_abs_diff(const hwlab::Field& a, const hwlab::Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double rel_l2_diff(const hwlab::Field& a, const hwlab::Field& b) {
  return hwlab::l2_norm(a - b) / std::max(hwlab::l2_norm(b), 1e-300);
}

inline hwlab::Field gaussian(const hwlab::GridSpec& g, double sigma = 1.0, double amplitude = 1.0,
                             double center = 0.0) {
  return hwlab::synthesize(g, hwlab::GaussianRecipe{sigma, amplitude, {center, 0.0, 0.0}});
}

}  // namespace testing
