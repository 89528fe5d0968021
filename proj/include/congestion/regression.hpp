#pragma once

#include <cstddef>
#include <vector>

namespace congestion {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};

// Ordinary least squares y = slope * x + intercept. Needs two distinct x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Least squares of log(y) against log(x); every x and y must be positive.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace congestion
