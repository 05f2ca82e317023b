#pragma once

#include <cstddef>
#include <span>

namespace hwlab {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Least-squares standard error of the slope (0 for two points).
  double slope_stderr = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = intercept + slope * x. Needs >= 2 points and
/// distinct x values.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Fit of log y against log x; all values must be positive.
LinearFit fit_loglog(std::span<const double> x, std::span<const double> y);

}  // namespace hwlab
