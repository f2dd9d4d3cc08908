#pragma once

#include <random>
#include <span>
#include <vector>

#include "april/common.hpp"
#include "april/oracle.hpp"
#include "april/querier.hpp"
#include "april/reward.hpp"
#include "april/summary_db.hpp"

namespace april {

struct SppiModel {
  Vector w;
  double gamma = 1e-3;

  static SppiModel zero(int dim, double gamma = 1e-3) {
    require(gamma > 0.0, ErrorCode::invalid_argument, "SPPI learning rate must be positive");
    return {Vector::Zero(dim), gamma};
  }

  std::vector<double> utilities(const SummaryDB& db) const {
    const Vector u = db.features.transpose() * w;
    return {u.data(), u.data() + u.size()};
  }
};

/// E_pi[phi(y_p) - phi(y_q)] under the Gibbs pair policy, using the
/// factorized form: softmax(u)-mean of phi minus softmax(-u)-mean of phi.
inline Vector expected_delta_phi(const SummaryDB& db, std::span<const double> u) {
  const auto plus = softmax(u, 1.0);
  const auto minus = softmax(u, -1.0);
  Vector diff(db.size());
  for (int i = 0; i < db.size(); ++i)
    diff[i] = plus[static_cast<std::size_t>(i)] - minus[static_cast<std::size_t>(i)];
  return db.features * diff;
}

/// Gradient of p * log pi(<first, second>; w).
inline Vector sppi_gradient(const SppiModel& model, const SummaryDB& db, const SampledPair& pair,
                            double p) {
  if (p == 0.0) return Vector::Zero(model.w.size());
  const auto u = model.utilities(db);
  return p * (db.at(pair.first).features - db.at(pair.second).features -
              expected_delta_phi(db, u));
}

/// Draws the next ordered pair from pi(.; w).
template <typename Rng>
SampledPair sppi_query(const SppiModel& model, const SummaryDB& db, Rng& rng) {
  require(db.size() >= 2, ErrorCode::invalid_argument, "SPPI needs at least 2 candidates");
  const auto u = model.utilities(db);
  return gibbs_sample_pair(std::span<const double>(u), rng);
}

/// Feedback is 1 when the first summary of the sampled pair wins, else 0.
inline void sppi_feedback(SppiModel& model, const SummaryDB& db, const SampledPair& pair,
                          Direction direction) {
  const double p = direction == Direction::left_preferred ? 1.0 : 0.0;
  model.w += model.gamma * sppi_gradient(model, db, pair, p);
}

/// One full round against a simulated user reading gold utilities.
template <typename Rng>
PreferenceRecord sppi_round(SppiModel& model, const SummaryDB& db, std::span<const double> gold,
                            Oracle& oracle, Rng& rng, int round) {
  const SampledPair pair = sppi_query(model, db, rng);
  const Direction d = oracle.prefer(gold[static_cast<std::size_t>(pair.first)],
                                    gold[static_cast<std::size_t>(pair.second)]);
  sppi_feedback(model, db, pair, d);
  return {round, pair.first, pair.second, d, oracle.source()};
}

/// argmax_y w . phi(y); ties go to the lowest id.
inline int sppi_best(const SppiModel& model, const SummaryDB& db) {
  const auto u = model.utilities(db);
  int best = 0;
  for (int i = 1; i < db.size(); ++i) {
    if (u[static_cast<std::size_t>(i)] > u[static_cast<std::size_t>(best)]) best = i;
  }
  return best;
}

struct SppiRun {
  SppiModel model;
  std::vector<PreferenceRecord> records;
  int exposures = 0;
  int summary_id = 0;
};

inline SppiRun sppi_run(const SummaryDB& db, std::span<const double> gold, Oracle& oracle, int rounds,
                        double gamma, std::uint64_t seed) {
  require(rounds >= 0, ErrorCode::invalid_argument, "N must be >= 0");
  require(gold.size() == static_cast<std::size_t>(db.size()), ErrorCode::invalid_argument,
          "gold utilities do not match the DB");
  SppiRun run{SppiModel::zero(static_cast<int>(db.features.rows()), gamma), {}, 0, 0};
  std::mt19937_64 rng(seed);
  for (int i = 0; i < rounds; ++i) {
    run.records.push_back(sppi_round(run.model, db, gold, oracle, rng, i + 1));
    run.exposures += 2;
  }
  run.summary_id = sppi_best(run.model, db);
  return run;
}

}  // namespace april
