#pragma once

// Deterministic accumulation helpers. All Monte Carlo reductions go through
// pairwise tree summation so that results do not depend on worker count or
// merge order.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace photloc {

inline double pairwise_sum(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
};

inline MeanSe mean_se(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n == 0) throw std::invalid_argument("mean_se: empty sample");
  MeanSe r;
  r.mean = pairwise_sum(v) / static_cast<double>(n);
  if (n < 2) return r;
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = v[i] - r.mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / static_cast<double>(n - 1);
  r.se = std::sqrt(var / static_cast<double>(n));
  return r;
}

// Median of block means over contiguous index blocks. Robust against the
// heavy tails of |G|^s samples; diagnostic only, bounds are checked against
// the plain mean.
inline double median_of_means(std::span<const double> v, int blocks = 10) {
  const std::size_t n = v.size();
  if (n == 0) throw std::invalid_argument("median_of_means: empty sample");
  const int b = std::min<int>(blocks, static_cast<int>(n));
  std::vector<double> means(b);
  for (int i = 0; i < b; ++i) {
    const std::size_t lo = n * static_cast<std::size_t>(i) / b;
    const std::size_t hi = n * static_cast<std::size_t>(i + 1) / b;
    means[i] = pairwise_sum(v.subspan(lo, hi - lo)) / static_cast<double>(hi - lo);
  }
  std::sort(means.begin(), means.end());
  return (b % 2 == 1) ? means[b / 2] : 0.5 * (means[b / 2 - 1] + means[b / 2]);
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw std::invalid_argument("least_squares: need >= 2 points");
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  if (sxx == 0) throw std::invalid_argument("least_squares: degenerate abscissae");
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = (syy == 0) ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

}  // namespace photloc
