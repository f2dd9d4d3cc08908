#pragma once

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "april/common.hpp"
#include "april/reward.hpp"

namespace april {

/// Logistic noise oracle: P(y_i > y_j; m) = 1 / (1 + exp[(u_j - u_i) / m]).
inline double lno_prefer_probability(double u_i, double u_j, double m) {
  require(m > 0.0, ErrorCode::invalid_argument, "LNO flatness m must be positive");
  return logistic((u_i - u_j) / m);
}

/// Simulated user answering from gold utilities (U* scale).
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual Direction prefer(double u_left, double u_right) = 0;
  virtual PreferenceSource source() const = 0;
};

class PerfectOracle final : public Oracle {
 public:
  // Exact ties go to the left summary.
  Direction prefer(double u_left, double u_right) override {
    return u_left >= u_right ? Direction::left_preferred : Direction::right_preferred;
  }
  PreferenceSource source() const override { return PreferenceSource::perfect; }
};

class LnoOracle final : public Oracle {
 public:
  LnoOracle(double m, std::uint64_t seed) : m_(m), rng_(seed) {
    require(m > 0.0, ErrorCode::invalid_argument, "LNO flatness m must be positive");
  }

  Direction prefer(double u_left, double u_right) override {
    const double p = lno_prefer_probability(u_left, u_right, m_);
    return unit_(rng_) < p ? Direction::left_preferred : Direction::right_preferred;
  }

  PreferenceSource source() const override { return PreferenceSource::lno; }
  double m() const { return m_; }

 private:
  double m_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

struct NoisyPreference {
  double u_left = 0.0;
  double u_right = 0.0;
  Direction direction = Direction::left_preferred;
};

inline double lno_log_likelihood(std::span<const NoisyPreference> records, double m) {
  double ll = 0.0;
  for (const auto& r : records) {
    const double gap = r.u_left - r.u_right;
    const double sign = r.direction == Direction::left_preferred ? 1.0 : -1.0;
    ll += log_logistic(sign * gap / m);
  }
  return ll;
}

struct FitOptions {
  double m_min = 1e-3;
  double m_max = 1e3;
  double tolerance = 1e-4;  // on log m
};

/// Maximum-likelihood m by golden-section search over log m. The objective
/// is concave in 1/m, so the search is unimodal.
inline double fit_m(std::span<const NoisyPreference> records, FitOptions opt = {}) {
  bool informative = false;
  for (const auto& r : records) informative = informative || r.u_left != r.u_right;
  require(informative, ErrorCode::invalid_argument,
          "fit_m: every record has tied utilities; the likelihood is flat in m");
  auto objective = [&](double log_m) { return lno_log_likelihood(records, std::exp(log_m)); };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(opt.m_min);
  double b = std::log(opt.m_max);
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  while (b - a > opt.tolerance) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = objective(d);
    }
  }
  double best = 0.5 * (a + b);
  // The noiseless case drives the optimum onto the boundary.
  const double lo = std::log(opt.m_min);
  const double hi = std::log(opt.m_max);
  if (objective(lo) >= objective(best)) best = lo;
  if (objective(hi) > objective(best)) best = hi;
  return std::exp(best);
}

inline double fit_m(const std::vector<NoisyPreference>& records, FitOptions opt = {}) {
  return fit_m(std::span<const NoisyPreference>(records), opt);
}

/// Preferences drawn from the LNO at gaps uniform in [0, max_gap]; which
/// side holds the better summary is a coin flip.
inline std::vector<NoisyPreference> synthetic_noisy_preferences(int n, double m, double max_gap,
                                                                std::uint64_t seed) {
  require(n >= 0 && max_gap > 0.0, ErrorCode::invalid_argument, "bad synthetic preference request");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> gap(0.0, max_gap);
  std::uniform_real_distribution<double> base(0.0, 10.0 - max_gap);
  std::bernoulli_distribution flip(0.5);
  LnoOracle oracle(m, derive_seed(seed, "lno"));
  std::vector<NoisyPreference> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double lo = base(rng);
    const double hi = lo + gap(rng);
    NoisyPreference r;
    if (flip(rng)) {
      r.u_left = hi;
      r.u_right = lo;
    } else {
      r.u_left = lo;
      r.u_right = hi;
    }
    r.direction = oracle.prefer(r.u_left, r.u_right);
    out.push_back(r);
  }
  return out;
}

}  // namespace april
