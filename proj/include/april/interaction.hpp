#pragma once

#include <chrono>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "april/common.hpp"
#include "april/corpus.hpp"
#include "april/metrics.hpp"
#include "april/querier.hpp"
#include "april/reward.hpp"
#include "april/sppi.hpp"
#include "april/summary_db.hpp"

namespace april {

/// Everything about one cluster that does not depend on the interaction:
/// DB, gold utilities (when references exist), prior and density caches.
struct ClusterData {
  DocumentCluster cluster;
  FeatureSpace space;
  SummaryDB db;
  std::vector<double> h;        // prior over the DB, [0,10]
  std::vector<double> h_raw;    // same prior, unscaled; what the blend uses
  std::vector<double> density;  // raw den over the DB
  std::vector<double> gold;     // U* over the DB; empty without references
  HeuristicParams h_params;

  bool has_gold() const { return !gold.empty(); }

  double u_star_of(const std::vector<int>& sentence_ids) const {
    require(cluster.has_references(), ErrorCode::gold_unavailable,
            "cluster " + cluster.id + " has no reference summaries");
    return gold_utility(rouge_scores_of(sentence_ids));
  }

  RougeScores rouge_scores_of(const std::vector<int>& sentence_ids) const {
    return GoldScorer(cluster).scores(summary_tokens(sentence_ids, cluster));
  }
};

/// Builds the caches around an existing DB (e.g. one loaded from disk).
inline ClusterData prepare_cluster_with_db(DocumentCluster cluster, FeatureSpace space, SummaryDB db,
                                           HeuristicParams params = {}) {
  ClusterData d;
  d.cluster = std::move(cluster);
  d.space = std::move(space);
  d.db = std::move(db);
  HeuristicPrior prior(d.cluster, d.space, params);
  prior.fit(d.db);
  d.h = prior.over_db(d.db);
  d.h_raw = prior.raw_over_db(d.db);
  d.h_params = params;
  d.density = raw_density(d.db);
  if (d.cluster.has_references()) {
    GoldScorer scorer(d.cluster);
    d.gold.reserve(static_cast<std::size_t>(d.db.size()));
    for (const auto& s : d.db.summaries) d.gold.push_back(scorer.utility(summary_tokens(s.sentence_ids, d.cluster)));
  }
  return d;
}

inline ClusterData prepare_cluster(DocumentCluster cluster, int feature_dim, int db_size,
                                   std::uint64_t db_seed, HeuristicParams params = {}) {
  auto space = build_feature_space(cluster, feature_dim);
  auto db = generate_db(cluster, space, db_size, db_seed);
  return prepare_cluster_with_db(std::move(cluster), std::move(space), std::move(db), params);
}

enum class Strategy { al, random, gibbs, jn };

inline Strategy parse_strategy(std::string_view s) {
  if (s == "al" || s == "gap" || s == "div" || s == "den" || s == "unc" || s == "best")
    return Strategy::al;
  if (s == "random") return Strategy::random;
  if (s == "gibbs") return Strategy::gibbs;
  if (s == "jn") return Strategy::jn;
  throw Error(ErrorCode::invalid_argument, "unknown strategy: " + std::string(s));
}

/// Named single-heuristic strategies map to one-hot weights; "best" is the
/// tuned mixture; anything else keeps `fallback`.
inline QueryWeights strategy_weights(std::string_view s, QueryWeights fallback) {
  if (s == "gap") return QueryWeights::make(1, 0, 0, 0);
  if (s == "div") return QueryWeights::make(0, 1, 0, 0);
  if (s == "den") return QueryWeights::make(0, 0, 1, 0);
  if (s == "unc") return QueryWeights::make(0, 0, 0, 1);
  if (s == "best") return QueryWeights::best_combination();
  return fallback;
}

struct InteractionOptions {
  Strategy strategy = Strategy::al;
  QueryWeights weights = QueryWeights::best_combination();
  double beta = 0.5;
  double alpha = 1e-3;  // BT step
  double gamma = 1e-3;  // SPPI step (gibbs)
  PreferenceSource source = PreferenceSource::human;
};

/// Stage-1 interaction loop, driven one preference at a time so the same
/// object serves simulations and live sessions. AL/Random rounds show the
/// previous new summary against a fresh one; Gibbs rounds draw both from
/// the pair policy and learn with the SPPI step.
class InteractionSession {
 public:
  InteractionSession(const ClusterData& data, InteractionOptions opt, std::uint64_t seed)
      : data_(&data),
        opt_(opt),
        rng_(seed),
        model_(UtilityModel::zero(data.space.dim(), opt.beta)),
        sppi_(SppiModel::zero(data.space.dim(), opt.gamma)) {
    require(opt.strategy != Strategy::jn, ErrorCode::not_implemented,
            "the J&N strategy is not implemented");
    require(data.db.size() >= 2, ErrorCode::invalid_argument, "summary DB needs >= 2 summaries");
    refresh_utilities();
  }

  int rounds_done() const { return static_cast<int>(records_.size()); }
  const std::vector<PreferenceRecord>& records() const { return records_; }
  const QueryState& state() const { return state_; }
  const UtilityModel& model() const { return model_; }
  const SppiModel& sppi() const { return sppi_; }
  const InteractionOptions& options() const { return opt_; }

  /// Current learned utility over the DB on [0,10].
  const std::vector<double>& utilities() const { return utilities_; }

  /// Wall time of the slowest candidate selection so far.
  double max_selection_ms() const { return max_selection_ms_; }

  /// The pair awaiting a preference (left, right); selected on first call.
  std::pair<int, int> pending_pair() {
    if (!pending_) pending_ = select_pair();
    return *pending_;
  }

  PreferenceRecord answer(Direction d) {
    const auto [left, right] = pending_pair();
    PreferenceRecord rec{rounds_done() + 1, left, right, d, opt_.source};
    if (opt_.strategy == Strategy::gibbs) {
      sppi_feedback(sppi_, data_->db, SampledPair{left, right}, d);
    } else {
      bt_update(model_, rec, data_->db, data_->h_raw, opt_.alpha);
      state_.old_id = right;
    }
    ++state_.round;
    records_.push_back(rec);
    pending_.reset();
    refresh_utilities();
    return rec;
  }

 private:
  std::pair<int, int> select_pair() {
    const auto t0 = std::chrono::steady_clock::now();
    std::pair<int, int> p;
    if (opt_.strategy == Strategy::gibbs) {
      const auto sp = sppi_query(sppi_, data_->db, rng_);
      state_.expose(sp.first);
      state_.expose(sp.second);
      p = {sp.first, sp.second};
    } else {
      if (!state_.old_id) {
        const int first = pick();
        state_.old_id = first;
        state_.expose(first);
      }
      const int next = pick();
      state_.expose(next);
      p = {*state_.old_id, next};
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    max_selection_ms_ = std::max(max_selection_ms_, ms);
    return p;
  }

  int pick() {
    if (opt_.strategy == Strategy::random) return random_select(data_->db, state_, rng_);
    return select_next(data_->db, state_, utilities_, data_->density, opt_.weights);
  }

  void refresh_utilities() {
    if (opt_.strategy == Strategy::gibbs) {
      UtilityModel blend{sppi_.w, opt_.beta};
      utilities_ = utility_over_db(blend, data_->db, data_->h_raw);
    } else {
      utilities_ = utility_over_db(model_, data_->db, data_->h_raw);
    }
  }

  const ClusterData* data_;
  InteractionOptions opt_;
  std::mt19937_64 rng_;
  UtilityModel model_;
  SppiModel sppi_;
  QueryState state_;
  std::vector<PreferenceRecord> records_;
  std::vector<double> utilities_;
  std::optional<std::pair<int, int>> pending_;
  double max_selection_ms_ = 0.0;
};

/// Summary with the highest prior; what every system returns without interaction.
inline int heuristic_summary(const ClusterData& data) {
  int best = 0;
  for (int i = 1; i < data.db.size(); ++i) {
    if (data.h[static_cast<std::size_t>(i)] > data.h[static_cast<std::size_t>(best)]) best = i;
  }
  return best;
}

}  // namespace april
