#pragma once

#include <cmath>
#include <span>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "april/common.hpp"

namespace april {

inline double mean(std::span<const double> v) {
  require(!v.empty(), ErrorCode::invalid_argument, "mean of an empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Unbiased sample variance (n - 1 denominator).
inline double variance(std::span<const double> v) {
  require(v.size() >= 2, ErrorCode::invalid_argument, "variance needs at least 2 values");
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double standard_error(std::span<const double> v) {
  return std::sqrt(variance(v) / static_cast<double>(v.size()));
}

struct TTest {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-tailed
  bool significant(double alpha = 0.01) const { return p < alpha; }
};

/// Welch's unequal-variance t-test, two-tailed.
inline TTest welch_t_test(std::span<const double> a, std::span<const double> b) {
  const double va = variance(a) / static_cast<double>(a.size());
  const double vb = variance(b) / static_cast<double>(b.size());
  TTest r;
  const double diff = mean(a) - mean(b);
  if (va + vb == 0.0) {
    r.t = diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
    r.df = static_cast<double>(a.size() + b.size() - 2);
    r.p = diff == 0.0 ? 1.0 : 0.0;
    return r;
  }
  r.t = diff / std::sqrt(va + vb);
  r.df = (va + vb) * (va + vb) /
         (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
  boost::math::students_t dist(r.df);
  r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t)));
  return r;
}

inline TTest welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  return welch_t_test(std::span<const double>(a), std::span<const double>(b));
}

}  // namespace april
