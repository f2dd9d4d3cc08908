#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "april/common.hpp"
#include "april/corpus.hpp"
#include "april/summary_db.hpp"

namespace april {

enum class PreferenceSource { human, lno, perfect };

inline const char* to_string(PreferenceSource s) {
  switch (s) {
    case PreferenceSource::human: return "human";
    case PreferenceSource::lno: return "lno";
    case PreferenceSource::perfect: return "perfect";
  }
  return "human";
}

inline PreferenceSource parse_source(std::string_view s) {
  if (s == "human") return PreferenceSource::human;
  if (s == "lno") return PreferenceSource::lno;
  if (s == "perfect") return PreferenceSource::perfect;
  throw Error(ErrorCode::invalid_argument, "bad preference source: " + std::string(s));
}

struct PreferenceRecord {
  int round = 0;
  int left_id = 0;
  int right_id = 0;
  Direction direction = Direction::left_preferred;
  PreferenceSource source = PreferenceSource::lno;

  int winner() const { return direction == Direction::left_preferred ? left_id : right_id; }
  int loser() const { return direction == Direction::left_preferred ? right_id : left_id; }

  bool operator==(const PreferenceRecord&) const = default;
};

// ---------------------------------------------------------------------------
// Heuristic prior h

struct HeuristicParams {
  double redundancy_weight = 0.1;
  double length_weight = 10.0;  // per token over the limit
};

/// Reference-free prior: coverage of the cluster centroid, minus the largest
/// pairwise sentence similarity inside the summary, minus an overlength
/// penalty. `raw` is unscaled; `fit` learns the min-max map onto [0,10] over
/// a Summary DB.
class HeuristicPrior {
 public:
  HeuristicPrior(const DocumentCluster& cluster, const FeatureSpace& space,
                 HeuristicParams params = {})
      : params_(params), limit_(cluster.length_limit) {
    std::vector<int> all(static_cast<std::size_t>(cluster.size()));
    std::iota(all.begin(), all.end(), 0);
    centroid_ = featurize(all, cluster, space);
    sentence_vectors_.reserve(all.size());
    for (int i : all) sentence_vectors_.push_back(featurize({i}, cluster, space));
    for (int i : all) token_counts_.push_back(cluster.token_count(i));
  }

  double coverage(const Vector& features) const { return cosine(features, centroid_); }

  double redundancy(const std::vector<int>& sentence_ids) const {
    double worst = 0.0;
    for (std::size_t a = 0; a < sentence_ids.size(); ++a) {
      for (std::size_t b = a + 1; b < sentence_ids.size(); ++b) {
        worst = std::max(worst, cosine(sentence_vectors_.at(static_cast<std::size_t>(sentence_ids[a])),
                                       sentence_vectors_.at(static_cast<std::size_t>(sentence_ids[b]))));
      }
    }
    return worst;
  }

  double raw(const std::vector<int>& sentence_ids, const Vector& features) const {
    int tokens = 0;
    for (int s : sentence_ids) tokens += token_counts_.at(static_cast<std::size_t>(s));
    const double over = std::max(0, tokens - limit_);
    return coverage(features) - params_.redundancy_weight * redundancy(sentence_ids) -
           params_.length_weight * over;
  }

  double raw(const Summary& s) const { return raw(s.sentence_ids, s.features); }

  void fit(const SummaryDB& db) {
    lo_ = std::numeric_limits<double>::infinity();
    hi_ = -lo_;
    for (const auto& s : db.summaries) {
      const double v = raw(s);
      lo_ = std::min(lo_, v);
      hi_ = std::max(hi_, v);
    }
  }

  /// Affine rescale fitted by `fit`; strictly increasing, may leave [0,10]
  /// for summaries outside the DB.
  double scaled(double raw_value) const {
    if (!(hi_ > lo_)) return 0.0;
    return 10.0 * (raw_value - lo_) / (hi_ - lo_);
  }

  double operator()(const std::vector<int>& ids, const Vector& f) const { return scaled(raw(ids, f)); }
  double operator()(const Summary& s) const { return scaled(raw(s)); }

  std::vector<double> over_db(const SummaryDB& db) const {
    std::vector<double> out;
    out.reserve(db.summaries.size());
    for (const auto& s : db.summaries) out.push_back((*this)(s));
    return out;
  }

  std::vector<double> raw_over_db(const SummaryDB& db) const {
    std::vector<double> out;
    out.reserve(db.summaries.size());
    for (const auto& s : db.summaries) out.push_back(raw(s));
    return out;
  }

 private:
  HeuristicParams params_;
  int limit_ = 100;
  Vector centroid_;
  std::vector<Vector> sentence_vectors_;
  std::vector<int> token_counts_;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

/// Unscaled h(y, x) for a single summary.
inline double heuristic_h(const Summary& summary, const DocumentCluster& cluster,
                          const FeatureSpace& space, HeuristicParams params = {}) {
  return HeuristicPrior(cluster, space, params).raw(summary);
}

// ---------------------------------------------------------------------------
// Bradley-Terry

/// P(y_i > y_j) = 1 / (1 + exp[u_j - u_i]).
inline double bt_probability(double u_i, double u_j) { return logistic(u_i - u_j); }

struct UtilityModel {
  Vector w;
  double beta = 0.5;

  static UtilityModel zero(int dim, double beta) {
    require(beta >= 0.0 && beta <= 1.0, ErrorCode::invalid_argument, "beta must lie in [0,1]");
    return {Vector::Zero(dim), beta};
  }
};

/// (1 - beta) * h + beta * w.phi, before any rescaling.
inline double blended_utility(double beta, double h, double posterior) {
  return (1.0 - beta) * h + beta * posterior;
}

inline double blended_utility(const UtilityModel& model, double h, const Vector& features) {
  return blended_utility(model.beta, h, model.w.dot(features));
}

/// Log-likelihood of one record under the blend; what `bt_update` ascends.
inline double bt_log_likelihood(const UtilityModel& model, const PreferenceRecord& rec,
                                const SummaryDB& db, std::span<const double> h) {
  const int win = rec.winner();
  const int lose = rec.loser();
  const double uw = blended_utility(model, h[static_cast<std::size_t>(win)], db.at(win).features);
  const double ul = blended_utility(model, h[static_cast<std::size_t>(lose)], db.at(lose).features);
  return log_logistic(uw - ul);
}

/// One gradient-ascent step on the record's BT log-likelihood:
/// w += alpha * (1 - P(winner > loser)) * beta * (phi_w - phi_l).
inline void bt_update(UtilityModel& model, const PreferenceRecord& rec, const SummaryDB& db,
                      std::span<const double> h, double alpha) {
  require(alpha > 0.0, ErrorCode::invalid_argument, "alpha must be positive");
  require(rec.left_id >= 0 && rec.left_id < db.size() && rec.right_id >= 0 &&
              rec.right_id < db.size(),
          ErrorCode::invalid_argument, "preference references unknown summary ids");
  require(h.size() == static_cast<std::size_t>(db.size()), ErrorCode::invalid_argument,
          "prior values do not match the DB");
  const int win = rec.winner();
  const int lose = rec.loser();
  const Vector& fw = db.at(win).features;
  const Vector& fl = db.at(lose).features;
  const double uw = blended_utility(model, h[static_cast<std::size_t>(win)], fw);
  const double ul = blended_utility(model, h[static_cast<std::size_t>(lose)], fl);
  const double p = bt_probability(uw, ul);
  model.w += (alpha * (1.0 - p) * model.beta) * (fw - fl);
}

/// Full-batch alternative: restart from w = 0 and sweep every record
/// `epochs` times.
inline void bt_refit(UtilityModel& model, std::span<const PreferenceRecord> records,
                     const SummaryDB& db, std::span<const double> h, double alpha, int epochs) {
  model.w.setZero();
  for (int e = 0; e < epochs; ++e) {
    for (const auto& r : records) bt_update(model, r, db, h, alpha);
  }
}

/// Min-max onto [0, 10]; a constant input maps to all zeros.
inline std::vector<double> rescale_0_10(std::span<const double> v) {
  std::vector<double> out(v.size(), 0.0);
  if (v.empty()) return out;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (!(*hi > *lo)) return out;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = 10.0 * (v[i] - *lo) / (*hi - *lo);
  return out;
}

/// Learned utility over the DB on the [0,10] scale: the beta blend of the
/// prior and w.phi, min-max rescaled over the DB. `h` should be the prior
/// on its native range (HeuristicPrior::raw), which keeps the posterior's
/// weight tied to how far training has moved w.
inline std::vector<double> utility_over_db(const UtilityModel& model, const SummaryDB& db,
                                           std::span<const double> h) {
  require(h.size() == static_cast<std::size_t>(db.size()), ErrorCode::invalid_argument,
          "prior values do not match the DB");
  const Vector post = db.features.transpose() * model.w;
  std::vector<double> blend(h.size());
  for (std::size_t i = 0; i < h.size(); ++i)
    blend[i] = blended_utility(model.beta, h[i], post[static_cast<Eigen::Index>(i)]);
  return rescale_0_10(blend);
}

/// sigma(y) = number of DB members with strictly lower utility; equal
/// utilities are ordered by id so the result is a permutation of 0..n-1.
inline std::vector<int> induced_ranking(std::span<const double> utilities) {
  require(!utilities.empty(), ErrorCode::invalid_argument, "empty utility list");
  std::vector<int> order(utilities.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return utilities[static_cast<std::size_t>(a)] < utilities[static_cast<std::size_t>(b)];
  });
  std::vector<int> rank(utilities.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[static_cast<std::size_t>(order[r])] = static_cast<int>(r);
  return rank;
}

/// sigma / |D_S| * 10, the terminal reward handed to Stage-2.
inline std::vector<double> rank_reward(std::span<const int> ranks) {
  std::vector<double> out(ranks.size());
  const double n = static_cast<double>(ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) out[i] = static_cast<double>(ranks[i]) / n * 10.0;
  return out;
}

// ---------------------------------------------------------------------------
// Preference DB

struct PreferenceDB {
  std::string cluster_id;
  std::string db_checksum;
  std::vector<PreferenceRecord> records;
};

inline std::string serialize_preferences(const PreferenceDB& pdb) {
  std::ostringstream out;
  out << "APRIL-PREFERENCE-DB\tv1\n"
      << "cluster\t" << pdb.cluster_id << '\n'
      << "db_checksum\t" << pdb.db_checksum << '\n';
  for (const auto& r : pdb.records) {
    out << r.round << '\t' << r.left_id << '\t' << r.right_id << '\t' << to_string(r.direction)
        << '\t' << to_string(r.source) << '\n';
  }
  return out.str();
}

inline PreferenceDB parse_preferences(const std::string& content) {
  std::istringstream in(content);
  std::string line;
  auto header = [&](const std::string& key) {
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::db_format,
            "preference DB: missing header " + key);
    auto tab = line.find('\t');
    require(tab != std::string::npos && line.substr(0, tab) == key, ErrorCode::db_format,
            "preference DB: expected header " + key);
    return line.substr(tab + 1);
  };
  require(header("APRIL-PREFERENCE-DB") == "v1", ErrorCode::db_format,
          "preference DB: unsupported version");
  PreferenceDB pdb;
  pdb.cluster_id = header("cluster");
  pdb.db_checksum = header("db_checksum");
  int last_round = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string round, left, right, dir, src;
    require(std::getline(ls, round, '\t') && std::getline(ls, left, '\t') &&
                std::getline(ls, right, '\t') && std::getline(ls, dir, '\t') &&
                std::getline(ls, src),
            ErrorCode::db_format, "preference DB: malformed record: " + line);
    PreferenceRecord r{std::stoi(round), std::stoi(left), std::stoi(right), parse_direction(dir),
                       parse_source(src)};
    require(r.round > last_round, ErrorCode::db_format, "preference DB: rounds must increase");
    last_round = r.round;
    pdb.records.push_back(r);
  }
  return pdb;
}

inline void persist_preferences(const PreferenceDB& pdb, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::io, "cannot write " + path.string());
  out << serialize_preferences(pdb);
}

}  // namespace april
