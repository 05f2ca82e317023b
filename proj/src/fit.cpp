#include "hwlab/fit.hpp"

#include <gsl/gsl_fit.h>

#include <cmath>
#include <vector>

#include "hwlab/grid.hpp"

namespace hwlab {

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("fit: x and y differ in length");
  if (x.size() < 2) throw Error("fit: at least two points are required");
  LinearFit out;
  out.points = x.size();
  double cov00 = 0.0, cov01 = 0.0, cov11 = 0.0, sumsq = 0.0;
  if (gsl_fit_linear(x.data(), 1, y.data(), 1, x.size(), &out.intercept, &out.slope, &cov00, &cov01,
                     &cov11, &sumsq) != 0 ||
      !std::isfinite(out.slope)) {
    throw Error("fit: degenerate abscissae");
  }
  out.slope_stderr = x.size() > 2 ? std::sqrt(cov11) : 0.0;
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double total = 0.0;
  for (double v : y) total += (v - mean) * (v - mean);
  out.r_squared = total > 0.0 ? 1.0 - sumsq / total : 1.0;
  return out;
}

LinearFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("fit: x and y differ in length");
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error("log-log fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

}  // namespace hwlab
