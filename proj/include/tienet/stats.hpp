#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "tienet/core.hpp"

namespace tienet {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double p_value = std::numeric_limits<double>::quiet_NaN();  // NaN below 3 points
  double slope_stderr = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_points = 0;
  bool degenerate = false;  // y constant: r2 undefined and reported as 0
};

// Ordinary least squares of y on x. p-value is the two-sided t-test of a
// zero slope with n - 2 degrees of freedom.
inline FitResult linear_fit(std::span<const double> x, std::span<const double> y,
                            std::size_t min_points = 3) {
  if (x.size() != y.size()) throw InvariantError("fit inputs differ in length");
  if (x.size() < min_points) throw DataError("linear fit needs at least " + std::to_string(min_points) + " points");
  const auto n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0) throw DataError("linear fit needs non-constant x");

  FitResult fit;
  fit.n_points = x.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (fit.intercept + fit.slope * x[i]);
    sse += r * r;
  }
  if (syy <= 0) {
    fit.degenerate = true;
    fit.r2 = 0.0;
  } else {
    fit.r2 = std::clamp(1.0 - sse / syy, 0.0, 1.0);
  }
  if (x.size() >= 3) {
    const double dof = n - 2;
    fit.slope_stderr = std::sqrt(sse / dof / sxx);
    if (fit.slope_stderr <= 0 || !std::isfinite(fit.slope_stderr)) {
      fit.p_value = fit.slope == 0.0 ? 1.0 : 0.0;
    } else {
      boost::math::students_t dist(dof);
      double t = std::abs(fit.slope / fit.slope_stderr);
      fit.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
    }
  }
  return fit;
}

}  // namespace tienet
