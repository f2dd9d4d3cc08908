#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "april/common.hpp"
#include "april/config.hpp"
#include "april/corpus.hpp"
#include "april/interaction.hpp"
#include "april/metrics.hpp"
#include "april/oracle.hpp"
#include "april/rl.hpp"
#include "april/sppi.hpp"
#include "april/stats.hpp"
#include "april/synthetic.hpp"

namespace april {

// ---------------------------------------------------------------------------
// Corpus

inline std::vector<DocumentCluster> load_corpus(const ExperimentConfig& cfg) {
  std::vector<DocumentCluster> out;
  if (cfg.corpus == "synthetic") {
    for (int i = 0; i < cfg.synthetic_clusters; ++i) {
      const std::uint64_t s = derive_seed(derive_seed(cfg.seed, "synthetic"), static_cast<std::uint64_t>(i));
      SyntheticOptions opt;
      const int span = cfg.max_sentences - cfg.min_sentences + 1;
      opt.sentences = cfg.min_sentences + static_cast<int>(mix64(s) % static_cast<std::uint64_t>(span));
      if (cfg.length_limit > 0) opt.length_limit = cfg.length_limit;
      char name[32];
      std::snprintf(name, sizeof name, "syn%02d", i);
      out.push_back(synthetic_cluster(name, opt, s));
    }
    return out;
  }
  namespace fs = std::filesystem;
  const fs::path root(cfg.corpus);
  require(fs::is_directory(root), ErrorCode::corpus_format, "corpus directory not found: " + cfg.corpus);
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory() && fs::is_directory(e.path() / "docs")) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  require(!dirs.empty(), ErrorCode::corpus_format, "no clusters under " + cfg.corpus);
  for (const auto& d : dirs) {
    out.push_back(cfg.length_limit > 0 ? load_cluster(d, cfg.length_limit) : load_cluster(d));
  }
  return out;
}

inline std::uint64_t cluster_seed(const ExperimentConfig& cfg, const std::string& cluster_id) {
  return derive_seed(cfg.seed, cluster_id);
}

/// Child seed for one (cluster, repetition) cell of the grid.
inline std::uint64_t run_seed(const ExperimentConfig& cfg, const std::string& cluster_id, int rep) {
  return derive_seed(cluster_seed(cfg, cluster_id), static_cast<std::uint64_t>(rep));
}

/// DB, prior and gold caches for one cluster. With `db_cache` set, the DB is
/// read from `<db_cache>/<cluster>.db` when present and written there otherwise.
inline ClusterData prepare_one(const ExperimentConfig& cfg, DocumentCluster c,
                               const std::filesystem::path& db_cache = {}) {
  const auto db_seed = derive_seed(cluster_seed(cfg, c.id), "db");
  auto space = build_feature_space(c, cfg.feature_dim);
  SummaryDB db;
  const auto cached = db_cache.empty() ? std::filesystem::path{} : db_cache / (c.id + ".db");
  if (!cached.empty() && std::filesystem::exists(cached)) {
    db = load_db(cached, c, space);
  } else {
    db = generate_db(c, space, cfg.db_size, db_seed);
    if (!cached.empty()) {
      std::filesystem::create_directories(db_cache);
      persist_db(db, cached);
    }
  }
  return prepare_cluster_with_db(std::move(c), std::move(space), std::move(db));
}

inline std::vector<ClusterData> prepare_corpus(const ExperimentConfig& cfg) {
  std::vector<ClusterData> out;
  for (auto& c : load_corpus(cfg)) {
    require(c.has_references(), ErrorCode::gold_unavailable,
            "cluster " + c.id + " has no reference summaries; simulations need U*");
    out.push_back(prepare_one(cfg, std::move(c)));
  }
  return out;
}

inline std::unique_ptr<Oracle> make_oracle(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.oracle == "perfect") return std::make_unique<PerfectOracle>();
  return std::make_unique<LnoOracle>(cfg.m, seed);
}

// ---------------------------------------------------------------------------
// Reports

struct ReportCell {
  std::string system;
  int rounds = 0;
  std::string cluster;
  int repetition = 0;
  std::vector<double> values;
};

struct AggregateRow {
  std::string system;
  int rounds = 0;
  int count = 0;  // clusters
  std::vector<double> means;
  std::vector<double> std_errors;  // across clusters; 0 with a single cluster
};

struct SignificanceRow {
  int rounds = 0;
  std::string system_a;
  std::string system_b;
  std::string metric;
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

struct Timing {
  double seconds = 0.0;
  double max_selection_ms = 0.0;
  double max_td_seconds = 0.0;
  double max_ntd_seconds = 0.0;
};

struct RunReport {
  std::string experiment;
  std::string config_hash;
  std::vector<std::string> metrics;
  std::vector<ReportCell> cells;
  std::vector<AggregateRow> aggregates;
  std::vector<SignificanceRow> tests;
  Timing timing;  // never serialized; wall clock is not reproducible

  const AggregateRow* aggregate(const std::string& system, int rounds) const {
    for (const auto& a : aggregates) {
      if (a.system == system && a.rounds == rounds) return &a;
    }
    return nullptr;
  }

  std::size_t metric_index(const std::string& name) const {
    auto it = std::find(metrics.begin(), metrics.end(), name);
    require(it != metrics.end(), ErrorCode::not_found, "no metric " + name + " in report");
    return static_cast<std::size_t>(it - metrics.begin());
  }

  /// Per-cluster means (over repetitions) of one metric, in cluster order.
  std::vector<double> cluster_means(const std::string& system, int rounds, const std::string& metric) const {
    const std::size_t k = metric_index(metric);
    std::vector<std::string> order;
    std::map<std::string, std::pair<double, int>> acc;
    for (const auto& c : cells) {
      if (c.system != system || c.rounds != rounds) continue;
      if (!acc.count(c.cluster)) order.push_back(c.cluster);
      auto& a = acc[c.cluster];
      a.first += c.values[k];
      a.second += 1;
    }
    std::vector<double> out;
    for (const auto& id : order) out.push_back(acc[id].first / acc[id].second);
    return out;
  }

  std::vector<double> run_values(const std::string& system, int rounds, const std::string& metric) const {
    const std::size_t k = metric_index(metric);
    std::vector<double> out;
    for (const auto& c : cells) {
      if (c.system == system && c.rounds == rounds) out.push_back(c.values[k]);
    }
    return out;
  }
};

/// Fills `aggregates`: per (system, N), the mean over clusters of each
/// cluster's mean over repetitions. Row order follows first appearance.
inline void aggregate(RunReport& r) {
  require(!r.cells.empty(), ErrorCode::invalid_argument, "report has no runs to aggregate");
  r.aggregates.clear();
  std::vector<std::pair<std::string, int>> keys;
  for (const auto& c : r.cells) {
    std::pair<std::string, int> k{c.system, c.rounds};
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  }
  for (const auto& [system, rounds] : keys) {
    AggregateRow row{system, rounds, 0, {}, {}};
    for (const auto& m : r.metrics) {
      const auto per_cluster = r.cluster_means(system, rounds, m);
      row.count = static_cast<int>(per_cluster.size());
      row.means.push_back(mean(per_cluster));
      row.std_errors.push_back(per_cluster.size() >= 2 ? standard_error(per_cluster) : 0.0);
    }
    r.aggregates.push_back(std::move(row));
  }
}

enum class ReportFormat { text_table, delimited };

namespace detail {

inline std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string label(const std::string& system, int rounds) {
  return system + " N=" + std::to_string(rounds);
}

}  // namespace detail

/// Deterministic serialization. The text table has one label column plus
/// one column per metric; the delimited form is lossless (%.17g).
inline std::string emit_report(const RunReport& r, ReportFormat format) {
  require(!r.cells.empty(), ErrorCode::invalid_argument, "report has no repetitions");
  std::string out;
  if (format == ReportFormat::text_table) {
    std::size_t w = 6;
    for (const auto& a : r.aggregates) w = std::max(w, detail::label(a.system, a.rounds).size());
    char buf[256];
    out += "# " + r.experiment + "  config " + r.config_hash + "\n";
    std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(w), "system");
    out += buf;
    for (const auto& m : r.metrics) {
      std::snprintf(buf, sizeof buf, "  %10s", m.c_str());
      out += buf;
    }
    out += '\n';
    for (const auto& a : r.aggregates) {
      std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(w), detail::label(a.system, a.rounds).c_str());
      out += buf;
      for (double v : a.means) {
        std::snprintf(buf, sizeof buf, "  %10.4f", v);
        out += buf;
      }
      out += '\n';
    }
    if (!r.tests.empty()) {
      out += "\n# Welch two-tailed t-tests, * = p < 0.01\n";
      for (const auto& t : r.tests) {
        std::snprintf(buf, sizeof buf, "N=%d %s vs %s on %s: t=%.3f p=%.4f%s\n", t.rounds,
                      t.system_a.c_str(), t.system_b.c_str(), t.metric.c_str(), t.t, t.p,
                      t.p < 0.01 ? " *" : "");
        out += buf;
      }
    }
    return out;
  }
  using detail::num17;
  out += "experiment\t" + r.experiment + "\n";
  out += "config_hash\t" + r.config_hash + "\n";
  out += "metrics";
  for (const auto& m : r.metrics) out += "\t" + m;
  out += "\n";
  for (const auto& c : r.cells) {
    out += "cell\t" + c.system + "\t" + std::to_string(c.rounds) + "\t" + c.cluster + "\t" +
           std::to_string(c.repetition);
    for (double v : c.values) out += "\t" + num17(v);
    out += "\n";
  }
  for (const auto& a : r.aggregates) {
    out += "aggregate\t" + a.system + "\t" + std::to_string(a.rounds) + "\t" + std::to_string(a.count);
    for (double v : a.means) out += "\t" + num17(v);
    for (double v : a.std_errors) out += "\t" + num17(v);
    out += "\n";
  }
  for (const auto& t : r.tests) {
    out += "ttest\t" + std::to_string(t.rounds) + "\t" + t.system_a + "\t" + t.system_b + "\t" +
           t.metric + "\t" + num17(t.t) + "\t" + num17(t.df) + "\t" + num17(t.p) + "\n";
  }
  return out;
}

inline RunReport parse_report(const std::string& tsv) {
  RunReport r;
  std::stringstream in(tsv);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
      auto tab = s.find('\t', start);
      f.push_back(s.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    return f;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    const std::string& kind = f[0];
    const std::size_t m = r.metrics.size();
    if (kind == "experiment") {
      r.experiment = f.at(1);
    } else if (kind == "config_hash") {
      r.config_hash = f.at(1);
    } else if (kind == "metrics") {
      r.metrics.assign(f.begin() + 1, f.end());
    } else if (kind == "cell") {
      require(f.size() == 5 + m, ErrorCode::invalid_argument, "malformed cell row");
      ReportCell c{f[1], std::stoi(f[2]), f[3], std::stoi(f[4]), {}};
      for (std::size_t i = 0; i < m; ++i) c.values.push_back(std::stod(f[5 + i]));
      r.cells.push_back(std::move(c));
    } else if (kind == "aggregate") {
      require(f.size() == 4 + 2 * m, ErrorCode::invalid_argument, "malformed aggregate row");
      AggregateRow a{f[1], std::stoi(f[2]), std::stoi(f[3]), {}, {}};
      for (std::size_t i = 0; i < m; ++i) a.means.push_back(std::stod(f[4 + i]));
      for (std::size_t i = 0; i < m; ++i) a.std_errors.push_back(std::stod(f[4 + m + i]));
      r.aggregates.push_back(std::move(a));
    } else if (kind == "ttest") {
      require(f.size() == 8, ErrorCode::invalid_argument, "malformed ttest row");
      r.tests.push_back({std::stoi(f[1]), f[2], f[3], f[4], std::stod(f[5]), std::stod(f[6]), std::stod(f[7])});
    } else {
      throw Error(ErrorCode::invalid_argument, "unknown report row: " + kind);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Grid execution

/// Runs task(i) for i in [0, n) on `workers` threads. Results are written by
/// index, so the output never depends on scheduling.
template <typename Result, typename Task>
std::vector<Result> run_grid(int n, int workers, Task task) {
  std::vector<Result> out(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        out[static_cast<std::size_t>(i)] = task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int k = std::max(1, std::min(workers, n));
  if (k == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < k; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline int default_repetitions(const ExperimentConfig& cfg, int fallback) {
  return cfg.repetitions > 0 ? cfg.repetitions : fallback;
}

// ---------------------------------------------------------------------------
// Stage 1

struct Stage1Outcome {
  std::vector<double> utilities;
  std::vector<PreferenceRecord> records;
  QueryState state;
  double max_selection_ms = 0.0;
};

/// N simulated rounds of Stage 1 against the oracle.
inline Stage1Outcome simulate_stage1(const ClusterData& data, const InteractionOptions& opt, int rounds,
                                     Oracle& oracle, std::uint64_t seed) {
  require(data.has_gold(), ErrorCode::gold_unavailable, "simulation needs reference summaries");
  InteractionOptions o = opt;
  o.source = oracle.source();
  InteractionSession session(data, o, seed);
  for (int i = 0; i < rounds; ++i) {
    const auto [l, r] = session.pending_pair();
    session.answer(oracle.prefer(data.gold[static_cast<std::size_t>(l)], data.gold[static_cast<std::size_t>(r)]));
  }
  return {session.utilities(), session.records(), session.state(), session.max_selection_ms()};
}

inline InteractionOptions interaction_options(const ExperimentConfig& cfg, const std::string& strategy) {
  InteractionOptions o;
  o.strategy = parse_strategy(strategy);
  o.weights = strategy_weights(strategy, cfg.weights());
  o.beta = cfg.beta;
  o.alpha = cfg.alpha;
  o.gamma = cfg.gamma;
  return o;
}

/// Spearman(U_hat, U*) over each DB for the configured strategy and every N,
/// plus the no-interaction lower bound (beta = 0, U_hat = h).
inline RunReport run_stage1(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const auto data = prepare_corpus(cfg);
  const int reps = default_repetitions(cfg, 20);
  const auto opt = interaction_options(cfg, cfg.strategy);

  struct TaskOut {
    std::vector<ReportCell> cells;
    double max_ms = 0.0;
  };
  const int n_tasks = static_cast<int>(data.size()) * reps;
  auto results = run_grid<TaskOut>(n_tasks, cfg.workers, [&](int task) {
    const auto& d = data[static_cast<std::size_t>(task / reps)];
    const int rep = task % reps;
    TaskOut out;
    for (int n : cfg.rounds) {
      const std::uint64_t s = derive_seed(run_seed(cfg, d.cluster.id, rep), static_cast<std::uint64_t>(n));
      auto oracle = make_oracle(cfg, derive_seed(s, "oracle"));
      const auto res = simulate_stage1(d, opt, n, *oracle, derive_seed(s, "query"));
      out.max_ms = std::max(out.max_ms, res.max_selection_ms);
      out.cells.push_back({cfg.strategy, n, d.cluster.id, rep, {spearman(res.utilities, d.gold)}});
    }
    out.cells.push_back({"lower-bound", 0, d.cluster.id, rep, {spearman(d.h, d.gold)}});
    return out;
  });

  RunReport r;
  r.experiment = "stage1";
  r.config_hash = cfg.hash();
  r.metrics = {"spearman"};
  // Strategy rows first, then the lower bound.
  for (const auto& t : results)
    for (const auto& c : t.cells)
      if (c.system != "lower-bound") r.cells.push_back(c);
  for (const auto& t : results)
    for (const auto& c : t.cells)
      if (c.system == "lower-bound") r.cells.push_back(c);
  for (const auto& t : results) r.timing.max_selection_ms = std::max(r.timing.max_selection_ms, t.max_ms);
  aggregate(r);
  r.timing.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// ---------------------------------------------------------------------------
// Stage 2 and the full comparison

/// Terminal reward per DB summary from a learned utility.
inline std::vector<double> stage2_reward(std::span<const double> utilities, const std::string& signal) {
  if (signal == "utility") return {utilities.begin(), utilities.end()};
  return rank_reward(induced_ranking(utilities));
}

enum class RlKind { td, lstd, ntd };

inline RlKind parse_rl_kind(std::string_view s) {
  if (s == "td") return RlKind::td;
  if (s == "lstd") return RlKind::lstd;
  if (s == "ntd") return RlKind::ntd;
  throw Error(ErrorCode::invalid_argument, "unknown RL kind: " + std::string(s));
}

struct Stage2Outcome {
  std::vector<int> summary;
  double seconds = 0.0;
};

/// Trains the chosen value model on `rewards` and emits the greedy summary.
inline Stage2Outcome run_stage2(const ClusterData& d, std::span<const double> rewards, RlKind kind,
                                const RlConfig& rl, const NtdHooks& hooks = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  Stage2Outcome out;
  switch (kind) {
    case RlKind::td: out.summary = derive_greedy(train_td(d.db, d.space, rewards, rl), d.cluster, d.space); break;
    case RlKind::lstd: out.summary = derive_greedy(train_lstd(d.db, d.space, rewards, rl), d.cluster, d.space); break;
    case RlKind::ntd: out.summary = derive_greedy(train_ntd(d.db, d.space, rewards, rl, hooks), d.cluster, d.space); break;
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

inline std::vector<double> summary_metrics(const ClusterData& d, const std::vector<int>& ids) {
  const auto s = d.rouge_scores_of(ids);
  return {s.r1, s.r2, s.rl, s.rsu4, gold_utility(s)};
}

/// System names understood by run_full.
inline bool is_known_system(const std::string& s) {
  return s == "sppi" || s == "april-td" || s == "april-ntd" || s == "april-lstd" ||
         s == "april-td-noint" || s == "april-ntd-noint";
}

/// SPPI vs APRIL at every N. N = 0 rows all carry the shared heuristic
/// summary. "-noint" systems train on the prior alone (beta = 0).
inline RunReport run_full(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto systems = cfg.system_list();
  require(!systems.empty(), ErrorCode::invalid_argument, "no systems configured");
  for (const auto& s : systems) require(is_known_system(s), ErrorCode::invalid_argument, "unknown system: " + s);
  const auto t0 = std::chrono::steady_clock::now();
  const auto data = prepare_corpus(cfg);
  const int reps = default_repetitions(cfg, 10);
  const auto opt = interaction_options(cfg, cfg.strategy);

  struct TaskOut {
    std::vector<ReportCell> cells;
    Timing timing;
  };
  const int n_tasks = static_cast<int>(data.size()) * reps;
  auto results = run_grid<TaskOut>(n_tasks, cfg.workers, [&](int task) {
    const auto& d = data[static_cast<std::size_t>(task / reps)];
    const int rep = task % reps;
    const std::uint64_t base = run_seed(cfg, d.cluster.id, rep);
    TaskOut out;
    std::map<std::string, std::vector<int>> noint_cache;
    for (int n : cfg.rounds) {
      const std::uint64_t s = derive_seed(base, static_cast<std::uint64_t>(n));
      for (const auto& system : systems) {
        std::vector<int> ids;
        const bool noint = system.size() > 6 && system.ends_with("-noint");
        if (n == 0 && !noint) {
          ids = d.db.at(heuristic_summary(d)).sentence_ids;
        } else if (system == "sppi") {
          auto oracle = make_oracle(cfg, derive_seed(s, "oracle-sppi"));
          const auto run = sppi_run(d.db, d.gold, *oracle, n, cfg.gamma, derive_seed(s, "sppi"));
          ids = d.db.at(run.summary_id).sentence_ids;
        } else {
          const std::string rl_name = system.substr(6, system.find('-', 6) - 6);
          const RlKind kind = parse_rl_kind(rl_name);
          if (noint) {
            // Independent of N; trained once per (cluster, repetition).
            auto it = noint_cache.find(system);
            if (it == noint_cache.end()) {
              const auto reward = stage2_reward(d.h, cfg.reward_signal);
              const auto res = run_stage2(d, reward, kind, cfg.rl(derive_seed(base, system)));
              it = noint_cache.emplace(system, res.summary).first;
            }
            ids = it->second;
          } else {
            auto oracle = make_oracle(cfg, derive_seed(s, "oracle-april"));
            const auto s1 = simulate_stage1(d, opt, n, *oracle, derive_seed(s, "query"));
            out.timing.max_selection_ms = std::max(out.timing.max_selection_ms, s1.max_selection_ms);
            const auto reward = stage2_reward(s1.utilities, cfg.reward_signal);
            const auto res = run_stage2(d, reward, kind, cfg.rl(derive_seed(s, system)));
            if (kind == RlKind::ntd)
              out.timing.max_ntd_seconds = std::max(out.timing.max_ntd_seconds, res.seconds);
            else
              out.timing.max_td_seconds = std::max(out.timing.max_td_seconds, res.seconds);
            ids = res.summary;
          }
        }
        out.cells.push_back({system, n, d.cluster.id, rep, summary_metrics(d, ids)});
      }
    }
    return out;
  });

  RunReport r;
  r.experiment = "full";
  r.config_hash = cfg.hash();
  r.metrics = {"r1", "r2", "rl", "rsu4", "u_star"};
  // Group rows by (N, system) in config order.
  for (int n : cfg.rounds)
    for (const auto& system : systems)
      for (const auto& t : results)
        for (const auto& c : t.cells)
          if (c.rounds == n && c.system == system) r.cells.push_back(c);
  for (const auto& t : results) {
    r.timing.max_selection_ms = std::max(r.timing.max_selection_ms, t.timing.max_selection_ms);
    r.timing.max_td_seconds = std::max(r.timing.max_td_seconds, t.timing.max_td_seconds);
    r.timing.max_ntd_seconds = std::max(r.timing.max_ntd_seconds, t.timing.max_ntd_seconds);
  }
  aggregate(r);
  if (std::find(systems.begin(), systems.end(), "sppi") != systems.end()) {
    for (int n : cfg.rounds) {
      const auto base_vals = r.run_values("sppi", n, "u_star");
      for (const auto& system : systems) {
        if (system == "sppi") continue;
        const auto vals = r.run_values(system, n, "u_star");
        if (vals.size() < 2 || base_vals.size() < 2) continue;
        const auto t = welch_t_test(vals, base_vals);
        r.tests.push_back({n, system, "sppi", "u_star", t.t, t.df, t.p});
      }
    }
  }
  r.timing.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

/// Final NTD/TD quality as a function of the episode budget T.
inline RunReport run_episode_sweep(ExperimentConfig cfg, const std::vector<int>& budgets) {
  require(!budgets.empty(), ErrorCode::invalid_argument, "no episode budgets given");
  RunReport merged;
  for (int t : budgets) {
    cfg.episodes = t;
    auto r = run_full(cfg);
    for (auto& c : r.cells) {
      c.system += "@T" + std::to_string(t);
      merged.cells.push_back(std::move(c));
    }
    merged.metrics = r.metrics;
    merged.timing.seconds += r.timing.seconds;
  }
  merged.experiment = "episode-sweep";
  merged.config_hash = cfg.hash();
  aggregate(merged);
  return merged;
}

}  // namespace april
