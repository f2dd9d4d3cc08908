#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <vector>

#include "april/common.hpp"
#include "april/reward.hpp"
#include "april/summary_db.hpp"

namespace april {

/// Weights of the gap / div / den / unc heuristics; non-negative, sum to 1.
struct QueryWeights {
  double gap = 0.0;
  double div = 1.0;
  double den = 0.0;
  double unc = 0.0;

  static QueryWeights make(double gap, double div, double den, double unc) {
    require(gap >= 0 && div >= 0 && den >= 0 && unc >= 0, ErrorCode::invalid_argument,
            "query weights must be non-negative");
    require(std::abs(gap + div + den + unc - 1.0) < 1e-9, ErrorCode::invalid_argument,
            "query weights must sum to 1");
    return {gap, div, den, unc};
  }

  static QueryWeights best_combination() { return make(0.0, 0.6, 0.2, 0.2); }
};

/// What the user has read so far in an AL/Random session.
struct QueryState {
  std::set<int> shown;
  std::optional<int> old_id;
  int round = 0;
  int exposures = 0;  // summaries put in front of the user, with repetition

  bool was_shown(int id) const { return shown.count(id) != 0; }
  void expose(int id) {
    shown.insert(id);
    ++exposures;
  }
};

namespace detail {

inline std::vector<double> minmax_unit(std::vector<double> v) {
  if (v.empty()) return v;
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  for (auto& x : v) x = hi > lo ? (x - lo) / (hi - lo) : 0.0;
  return v;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

/// den(y) before normalization: 1 - min_{y' != y} div(y, y'), i.e. the largest
/// cosine to any other DB member. Model independent, so computed once per DB.
inline std::vector<double> raw_density(const SummaryDB& db) {
  const int n = db.size();
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  if (n < 2) return out;
  Vector norms(n);
  for (int i = 0; i < n; ++i) norms[i] = db.features.col(i).norm();
  Matrix unit = db.features;
  for (int i = 0; i < n; ++i) {
    if (norms[i] > 0.0) unit.col(i) /= norms[i];
  }
  constexpr int kBlock = 512;
  for (int start = 0; start < n; start += kBlock) {
    const int rows = std::min(kBlock, n - start);
    const Matrix sims = unit.middleCols(start, rows).transpose() * unit;
    for (int r = 0; r < rows; ++r) {
      double best = -1.0;
      for (int c = 0; c < n; ++c) {
        if (c != start + r) best = std::max(best, sims(r, c));
      }
      out[static_cast<std::size_t>(start + r)] = best;
    }
  }
  return out;
}

/// Per-candidate heuristic scores for the whole DB, each min-max normalized
/// to [0,1] over the DB.
struct AlScores {
  std::vector<double> gap, div, den, unc;
};

/// `utilities` is the current [0,10] utility over the DB; `density` comes
/// from raw_density. Without an old summary (first selection) div is 0 and
/// the gap is the utility itself.
inline AlScores al_scores(const SummaryDB& db, std::span<const double> utilities,
                          std::span<const double> density, std::optional<int> old_id) {
  const int n = db.size();
  require(utilities.size() == static_cast<std::size_t>(n) &&
              density.size() == static_cast<std::size_t>(n),
          ErrorCode::invalid_argument, "score inputs do not match the DB");
  AlScores s;
  s.gap.resize(static_cast<std::size_t>(n));
  s.div.assign(static_cast<std::size_t>(n), 0.0);
  if (old_id) {
    const Vector& fo = db.at(*old_id).features;
    const double no = fo.norm();
    const Vector dots = db.features.transpose() * fo;
    for (int i = 0; i < n; ++i) {
      const double ni = db.features.col(i).norm();
      const double cos = (no > 0.0 && ni > 0.0) ? dots[i] / (no * ni) : 0.0;
      s.div[static_cast<std::size_t>(i)] = 1.0 - cos;
      s.gap[static_cast<std::size_t>(i)] =
          std::abs(utilities[static_cast<std::size_t>(i)] - utilities[static_cast<std::size_t>(*old_id)]);
    }
  } else {
    for (int i = 0; i < n; ++i) s.gap[static_cast<std::size_t>(i)] = utilities[static_cast<std::size_t>(i)];
  }
  s.den.assign(density.begin(), density.end());
  const double mid = detail::median(std::vector<double>(utilities.begin(), utilities.end()));
  s.unc.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double pb = logistic(utilities[static_cast<std::size_t>(i)] - mid);
    s.unc[static_cast<std::size_t>(i)] = pb >= 0.5 ? 1.0 - pb : pb;
  }
  s.gap = detail::minmax_unit(std::move(s.gap));
  s.div = detail::minmax_unit(std::move(s.div));
  s.den = detail::minmax_unit(std::move(s.den));
  s.unc = detail::minmax_unit(std::move(s.unc));
  return s;
}

inline double weighted_score(const AlScores& s, const QueryWeights& w, int i) {
  const auto k = static_cast<std::size_t>(i);
  return w.gap * s.gap[k] + w.div * s.div[k] + w.den * s.den[k] + w.unc * s.unc[k];
}

/// Argmax over unshown candidates of the weighted heuristic score; ties go
/// to the lowest id.
inline int select_from_scores(const AlScores& s, const QueryWeights& w, const QueryState& state,
                              int n) {
  int best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    if (state.was_shown(i)) continue;
    const double v = weighted_score(s, w, i);
    if (v > best_score) {
      best_score = v;
      best = i;
    }
  }
  require(best >= 0, ErrorCode::budget_exhausted, "every candidate has already been shown");
  return best;
}

inline int select_next(const SummaryDB& db, const QueryState& state,
                       std::span<const double> utilities, std::span<const double> density,
                       const QueryWeights& weights) {
  return select_from_scores(al_scores(db, utilities, density, state.old_id), weights, state,
                            db.size());
}

template <typename Rng>
int random_select(const SummaryDB& db, const QueryState& state, Rng& rng) {
  std::vector<int> pool;
  for (int i = 0; i < db.size(); ++i) {
    if (!state.was_shown(i)) pool.push_back(i);
  }
  require(!pool.empty(), ErrorCode::budget_exhausted, "every candidate has already been shown");
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  return pool[pick(rng)];
}

// ---------------------------------------------------------------------------
// Gibbs pair policy

/// softmax(sign * u), computed with the max shift.
inline std::vector<double> softmax(std::span<const double> u, double sign = 1.0) {
  std::vector<double> p(u.size());
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : u) mx = std::max(mx, sign * x);
  double z = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    p[i] = std::exp(sign * u[i] - mx);
    z += p[i];
  }
  for (auto& x : p) x /= z;
  return p;
}

/// pi(<y_i, y_j>) proportional to exp[u_i - u_j]. The normalizer over all ordered pairs
/// factorizes into sum_p exp(u_p) * sum_q exp(-u_q), so the pair
/// probability is softmax(u)_i * softmax(-u)_j.
inline double gibbs_pair_probability(std::span<const double> u, int i, int j) {
  const auto plus = softmax(u, 1.0);
  const auto minus = softmax(u, -1.0);
  return plus[static_cast<std::size_t>(i)] * minus[static_cast<std::size_t>(j)];
}

struct SampledPair {
  int first = 0;
  int second = 0;
};

/// Draws the first summary from softmax(u) and, independently, the second from
/// softmax(-u). A pair that picks the same summary twice is redrawn once and
/// then accepted.
template <typename Rng>
SampledPair gibbs_sample_pair(std::span<const double> u, Rng& rng) {
  require(u.size() >= 2, ErrorCode::invalid_argument, "Gibbs sampling needs at least 2 candidates");
  const auto plus = softmax(u, 1.0);
  const auto minus = softmax(u, -1.0);
  std::discrete_distribution<int> first(plus.begin(), plus.end());
  std::discrete_distribution<int> second(minus.begin(), minus.end());
  SampledPair p{first(rng), second(rng)};
  if (p.first == p.second) p = {first(rng), second(rng)};
  return p;
}

}  // namespace april
