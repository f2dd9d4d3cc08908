#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <unordered_map>
#include <vector>

#include "april/common.hpp"
#include "april/corpus.hpp"

namespace april {

struct RougeScores {
  double r1 = 0.0;
  double r2 = 0.0;
  double rl = 0.0;
  double rsu4 = 0.0;
};

namespace detail {

using GramCounts = std::unordered_map<std::uint64_t, int>;

inline std::uint64_t pair_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

inline std::uint64_t unigram_key(int a) { return pair_key(a, -1); }

inline GramCounts ngram_counts(std::span<const int> toks, int n) {
  GramCounts out;
  if (n == 1) {
    for (int t : toks) ++out[unigram_key(t)];
  } else {
    for (std::size_t i = 1; i < toks.size(); ++i) ++out[pair_key(toks[i - 1], toks[i])];
  }
  return out;
}

// Skip bigrams with at most 4 intervening tokens, plus unigrams.
inline GramCounts su4_counts(std::span<const int> toks) {
  GramCounts out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    ++out[unigram_key(toks[i])];
    for (std::size_t j = i + 1; j < toks.size() && j <= i + 5; ++j) {
      ++out[pair_key(toks[i], toks[j])];
    }
  }
  return out;
}

inline double clipped_recall(const GramCounts& cand, const GramCounts& ref) {
  long total = 0;
  long hit = 0;
  for (const auto& [key, count] : ref) {
    total += count;
    auto it = cand.find(key);
    if (it != cand.end()) hit += std::min(count, it->second);
  }
  require(total > 0, ErrorCode::invalid_argument, "empty reference");
  return static_cast<double>(hit) / static_cast<double>(total);
}

inline std::size_t lcs_length(std::span<const int> a, std::span<const int> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline void check_references(const std::vector<std::vector<int>>& refs) {
  require(!refs.empty(), ErrorCode::invalid_argument, "no references given");
}

}  // namespace detail

/// Clipped n-gram recall (n = 1 or 2), averaged over references.
inline double rouge_n(std::span<const int> candidate, const std::vector<std::vector<int>>& refs,
                      int n) {
  require(n == 1 || n == 2, ErrorCode::invalid_argument, "rouge_n supports n in {1,2}");
  detail::check_references(refs);
  const auto cand = detail::ngram_counts(candidate, n);
  double sum = 0.0;
  for (const auto& r : refs) sum += detail::clipped_recall(cand, detail::ngram_counts(r, n));
  return sum / static_cast<double>(refs.size());
}

inline double rouge_l(std::span<const int> candidate, const std::vector<std::vector<int>>& refs) {
  detail::check_references(refs);
  double sum = 0.0;
  for (const auto& r : refs) {
    require(!r.empty(), ErrorCode::invalid_argument, "empty reference");
    sum += static_cast<double>(detail::lcs_length(candidate, r)) / static_cast<double>(r.size());
  }
  return sum / static_cast<double>(refs.size());
}

inline double rouge_su4(std::span<const int> candidate,
                        const std::vector<std::vector<int>>& refs) {
  detail::check_references(refs);
  const auto cand = detail::su4_counts(candidate);
  double sum = 0.0;
  for (const auto& r : refs) sum += detail::clipped_recall(cand, detail::su4_counts(r));
  return sum / static_cast<double>(refs.size());
}

/// Unclamped (10/3)(r1/.47 + r2/.22 + rsu4/.18).
inline double gold_utility_raw(const RougeScores& s) {
  return 10.0 / 3.0 * (s.r1 / 0.47 + s.r2 / 0.22 + s.rsu4 / 0.18);
}

/// U* on the [0,10] scale; clamped when components exceed the upper bounds.
inline double gold_utility(const RougeScores& s) {
  return std::clamp(gold_utility_raw(s), 0.0, 10.0);
}

/// Precomputes reference n-gram tables so a whole Summary DB can be scored
/// without rebuilding them per candidate.
class GoldScorer {
 public:
  explicit GoldScorer(const DocumentCluster& cluster) : GoldScorer(cluster.references) {
    cluster_id_ = cluster.id;
  }

  explicit GoldScorer(std::vector<std::vector<int>> refs) : refs_(std::move(refs)) {
    require(!refs_.empty(), ErrorCode::gold_unavailable,
            "gold utility unavailable: cluster has no reference summaries");
    for (const auto& r : refs_) {
      require(r.size() >= 2, ErrorCode::invalid_argument, "reference shorter than two tokens");
      uni_.push_back(detail::ngram_counts(r, 1));
      bi_.push_back(detail::ngram_counts(r, 2));
      su4_.push_back(detail::su4_counts(r));
    }
  }

  RougeScores scores(std::span<const int> candidate) const {
    const auto cu = detail::ngram_counts(candidate, 1);
    const auto cb = detail::ngram_counts(candidate, 2);
    const auto cs = detail::su4_counts(candidate);
    RougeScores s;
    for (std::size_t i = 0; i < refs_.size(); ++i) {
      s.r1 += detail::clipped_recall(cu, uni_[i]);
      s.r2 += detail::clipped_recall(cb, bi_[i]);
      s.rsu4 += detail::clipped_recall(cs, su4_[i]);
      s.rl += static_cast<double>(detail::lcs_length(candidate, refs_[i])) /
              static_cast<double>(refs_[i].size());
    }
    const double k = static_cast<double>(refs_.size());
    s.r1 /= k;
    s.r2 /= k;
    s.rl /= k;
    s.rsu4 /= k;
    return s;
  }

  double utility(std::span<const int> candidate) const { return gold_utility(scores(candidate)); }

 private:
  std::string cluster_id_;
  std::vector<std::vector<int>> refs_;
  std::vector<detail::GramCounts> uni_, bi_, su4_;
};

inline RougeScores rouge_scores(const Summary& candidate, const DocumentCluster& cluster) {
  return GoldScorer(cluster).scores(summary_tokens(candidate.sentence_ids, cluster));
}

/// U*(y, x). Throws gold_unavailable when the cluster has no references.
inline double u_star(const Summary& candidate, const DocumentCluster& cluster) {
  return gold_utility(rouge_scores(candidate, cluster));
}

/// Average ranks (1-based), ties share the mean of their positions.
inline std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

/// Spearman's rho with average-rank ties (Pearson correlation of ranks).
inline double spearman(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorCode::invalid_argument, "spearman: length mismatch");
  require(a.size() >= 2, ErrorCode::invalid_argument, "spearman: need at least two values");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  require(saa > 0.0 && sbb > 0.0, ErrorCode::invalid_argument,
          "spearman: constant input has no rank correlation");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  return spearman(std::span<const double>(a), std::span<const double>(b));
}

}  // namespace april
