// SPDX-License-Identifier: Apache-2.0
// Small statistics helpers shared by tests and the experiment drivers.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace starfrac {

/// Two-sided Kolmogorov-Smirnov statistic of samples against a CDF.
/// Samples are sorted in place.
inline double ks_statistic(std::vector<double>& samples,
                           const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double F = cdf(samples[i]);
    d = std::max(d, std::max(std::abs((i + 1) / n - F), std::abs(i / n - F)));
  }
  return d;
}

/// Asymptotic KS critical value; significance must be 0.01 or 0.05.
inline double ks_critical(size_t n, double significance) {
  double c;
  if (significance == 0.01)
    c = 1.62762;
  else if (significance == 0.05)
    c = 1.35810;
  else
    throw std::invalid_argument("ks_critical: unsupported significance");
  return c / std::sqrt(static_cast<double>(n));
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares straight line through (x_i, y_i).
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need >= 2 matching points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LineFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

}  // namespace starfrac
