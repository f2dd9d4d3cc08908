#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "april/common.hpp"
#include "april/config.hpp"
#include "april/harness.hpp"
#include "april/interaction.hpp"

namespace april {

using json = nlohmann::json;

inline int default_worker_count() {
  const unsigned n = std::thread::hardware_concurrency();
  return n > 1 ? static_cast<int>(n) - 1 : 1;
}

struct ServiceConfig {
  ExperimentConfig experiment;        // corpus, DB and RL settings
  std::filesystem::path db_cache;     // empty: DBs live in memory only
  std::filesystem::path session_dir;  // event logs; empty: not persisted
  int workers = default_worker_count();
  bool blind_mode = true;
  std::string rl = "ntd";  // Stage-2 learner for APRIL sessions

  /// APRIL_CORPUS_ROOT, APRIL_DB_CACHE, APRIL_SESSION_DIR, APRIL_WORKERS,
  /// APRIL_BLIND override the given defaults.
  static ServiceConfig from_env(ServiceConfig base) {
    if (const char* v = std::getenv("APRIL_CORPUS_ROOT"); v && *v) base.experiment.corpus = v;
    if (const char* v = std::getenv("APRIL_DB_CACHE"); v && *v) base.db_cache = v;
    if (const char* v = std::getenv("APRIL_SESSION_DIR"); v && *v) base.session_dir = v;
    if (const char* v = std::getenv("APRIL_WORKERS"); v && *v) base.workers = std::max(1, std::atoi(v));
    if (const char* v = std::getenv("APRIL_BLIND"); v && *v) base.blind_mode = std::string(v) != "0" && std::string(v) != "false";
    return base;
  }
};

/// Fixed-size pool for Stage-2 jobs. The destructor drains the queue.
class WorkerPool {
 public:
  explicit WorkerPool(int n) {
    require(n >= 1, ErrorCode::invalid_argument, "worker pool needs >= 1 thread");
    for (int i = 0; i < n; ++i) threads_.emplace_back([this] { loop(); });
  }
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  ~WorkerPool() {
    {
      std::lock_guard lock(mu_);
      stopping_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  void submit(std::function<void()> job) {
    {
      std::lock_guard lock(mu_);
      jobs_.push_back(std::move(job));
    }
    cv_.notify_one();
  }

  int size() const { return static_cast<int>(threads_.size()); }

 private:
  void loop() {
    for (;;) {
      std::function<void()> job;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [this] { return stopping_ || !jobs_.empty(); });
        if (jobs_.empty()) return;
        job = std::move(jobs_.front());
        jobs_.pop_front();
      }
      job();
    }
  }

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::function<void()>> jobs_;
  std::vector<std::thread> threads_;
  bool stopping_ = false;
};

/// Clusters available to sessions; DBs are built on first use.
class ClusterStore {
 public:
  explicit ClusterStore(const ServiceConfig& cfg) : cfg_(cfg) {
    for (auto& c : load_corpus(cfg.experiment)) {
      order_.push_back(c.id);
      raw_.emplace(c.id, std::move(c));
    }
  }

  const std::vector<std::string>& ids() const { return order_; }

  const DocumentCluster& cluster(const std::string& id) const {
    auto it = raw_.find(id);
    require(it != raw_.end(), ErrorCode::not_found, "unknown cluster: " + id);
    return it->second;
  }

  std::shared_ptr<const ClusterData> get(const std::string& id) {
    const auto& c = cluster(id);
    std::lock_guard lock(mu_);
    auto it = ready_.find(id);
    if (it != ready_.end()) return it->second;
    auto d = std::make_shared<const ClusterData>(prepare_one(cfg_.experiment, c, cfg_.db_cache));
    ready_.emplace(id, d);
    return d;
  }

 private:
  const ServiceConfig& cfg_;
  std::vector<std::string> order_;
  std::map<std::string, DocumentCluster> raw_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const ClusterData>> ready_;
};

enum class SessionStatus { awaiting_preference, training, done, failed };

inline const char* to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::awaiting_preference: return "awaiting_preference";
    case SessionStatus::training: return "training";
    case SessionStatus::done: return "done";
    case SessionStatus::failed: return "failed";
  }
  return "failed";
}

struct SessionParams {
  std::string cluster;
  std::string system = "april";  // april | sppi
  int rounds = 10;
  double beta = 0.5;
  std::uint64_t seed = 0;
};

inline json to_json(const SessionParams& p) {
  return {{"cluster", p.cluster}, {"system", p.system}, {"rounds", p.rounds}, {"beta", p.beta},
          {"seed", std::to_string(p.seed)}};
}

struct Session {
  std::string id;
  SessionParams params;
  std::shared_ptr<const ClusterData> data;
  std::unique_ptr<InteractionSession> interaction;

  std::mutex mu;
  SessionStatus status = SessionStatus::awaiting_preference;
  std::vector<Direction> choices;
  std::vector<json> responses;  // what each accepted preference returned
  std::optional<std::vector<int>> with_interaction;
  std::optional<std::vector<int>> without_interaction;
  std::optional<json> judgement;
  std::string failure;
  std::atomic<int> episodes_done{0};
  int episodes_total = 0;
  bool replaying = false;  // suppresses log writes while restoring
};

struct ApiResponse {
  int status = 200;
  json body = json::object();
  std::map<std::string, std::string> headers;
};

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::not_found: return 404;
    case ErrorCode::conflict: return 409;
    case ErrorCode::not_implemented: return 501;
    case ErrorCode::invalid_argument:
    case ErrorCode::corpus_format:
    case ErrorCode::gold_unavailable:
    case ErrorCode::budget_exhausted:
    case ErrorCode::cluster_mismatch:
      return 400;
    default: return 500;
  }
}

inline ApiResponse error_response(ErrorCode code, const std::string& message) {
  return {http_status(code), {{"error", {{"code", to_string(code)}, {"message", message}}}}, {}};
}

/// Owns every live session. Each handler holds the session's mutex for its
/// whole duration; distinct sessions only share the registry lock briefly.
class SessionManager {
 public:
  explicit SessionManager(ServiceConfig cfg)
      : cfg_(std::move(cfg)), clusters_(cfg_), pool_(std::make_unique<WorkerPool>(cfg_.workers)) {
    if (!cfg_.session_dir.empty()) {
      std::filesystem::create_directories(cfg_.session_dir);
      restore();
    }
  }

  ~SessionManager() { pool_.reset(); }

  const ServiceConfig& config() const { return cfg_; }
  ClusterStore& clusters() { return clusters_; }

  // --- endpoints -----------------------------------------------------------

  ApiResponse healthz() {
    std::shared_lock lock(registry_mu_);
    return {200, {{"status", "ok"}, {"sessions", sessions_.size()}, {"workers", pool_->size()}}, {}};
  }

  ApiResponse list_clusters() {
    json arr = json::array();
    for (const auto& id : clusters_.ids()) {
      const auto& c = clusters_.cluster(id);
      arr.push_back({{"id", c.id},
                     {"documents", c.documents.size()},
                     {"sentences", c.size()},
                     {"length_limit", c.length_limit}});
    }
    return {200, {{"clusters", arr}}, {}};
  }

  /// Topic background: the source documents, never the references.
  ApiResponse cluster_background(const std::string& id) {
    return guarded([&] {
      const auto& c = clusters_.cluster(id);
      return ApiResponse{200, {{"id", c.id}, {"documents", c.documents}, {"length_limit", c.length_limit}}, {}};
    });
  }

  ApiResponse create(const json& body) {
    return guarded([&] {
      SessionParams p;
      require(body.is_object(), ErrorCode::invalid_argument, "body must be a JSON object");
      require(body.contains("cluster") && body["cluster"].is_string(), ErrorCode::invalid_argument,
              "missing 'cluster'");
      p.cluster = body["cluster"].get<std::string>();
      p.system = body.value("system", std::string("april"));
      p.rounds = body.value("rounds", 10);
      p.beta = body.value("beta", cfg_.experiment.beta);
      if (body.contains("seed")) {
        const auto& s = body["seed"];
        p.seed = s.is_string() ? std::stoull(s.get<std::string>()) : s.get<std::uint64_t>();
      } else {
        p.seed = fresh_seed();
      }
      auto session = open_session(p, fresh_id());
      std::lock_guard lock(session->mu);
      append(*session, {{"event", "create"}, {"params", to_json(p)}});
      ApiResponse r{201, view(*session), {}};
      r.body["session"] = session->id;
      return r;
    });
  }

  ApiResponse get_pair(const std::string& id) {
    return guarded([&] {
      auto s = find(id);
      std::lock_guard lock(s->mu);
      return ApiResponse{200, view(*s), {}};
    });
  }

  ApiResponse post_preference(const std::string& id, const json& body) {
    return guarded([&] {
      auto s = find(id);
      require(body.is_object() && body.contains("round") && body.contains("choice"),
              ErrorCode::invalid_argument, "body needs 'round' and 'choice'");
      const int round = body["round"].get<int>();
      const Direction choice = parse_direction(body["choice"].get<std::string>());
      std::lock_guard lock(s->mu);
      const int done = static_cast<int>(s->choices.size());
      if (round >= 1 && round <= done) {
        const Direction recorded = s->choices[static_cast<std::size_t>(round - 1)];
        if (recorded == choice) {
          ApiResponse r{200, s->responses[static_cast<std::size_t>(round - 1)], {}};
          r.headers["Idempotent-Replay"] = "true";
          return r;
        }
        auto r = error_response(ErrorCode::conflict, "round " + std::to_string(round) + " already answered");
        r.body["error"]["recorded"] = to_string(recorded);
        return r;
      }
      require(s->status == SessionStatus::awaiting_preference, ErrorCode::conflict,
              "session is not awaiting a preference");
      require(round == done + 1, ErrorCode::conflict, "expected round " + std::to_string(done + 1));
      apply_preference(*s, choice);
      append(*s, {{"event", "preference"}, {"round", round}, {"choice", to_string(choice)}});
      return ApiResponse{200, s->responses.back(), {}};
    });
  }

  ApiResponse result(const std::string& id) {
    return guarded([&] {
      auto s = find(id);
      std::lock_guard lock(s->mu);
      if (s->status == SessionStatus::failed)
        return error_response(ErrorCode::non_finite, "training failed: " + s->failure);
      if (s->status != SessionStatus::done) {
        ApiResponse r{202, view(*s), {}};
        r.headers["Retry-After"] = "1";
        return r;
      }
      json body = view(*s);
      body["with_interaction"] = summary_json(*s->data, *s->with_interaction, true);
      body["without_interaction"] = summary_json(*s->data, *s->without_interaction, true);
      return ApiResponse{200, body, {}};
    });
  }

  /// Final user judgement; accepted once per session.
  ApiResponse judgement(const std::string& id, const json& body) {
    return guarded([&] {
      auto s = find(id);
      require(body.is_object() && body.contains("preferred"), ErrorCode::invalid_argument,
              "body needs 'preferred'");
      const auto preferred = body["preferred"].get<std::string>();
      require(preferred == "with_interaction" || preferred == "without_interaction" || preferred == "tie",
              ErrorCode::invalid_argument, "preferred must be with_interaction, without_interaction or tie");
      std::lock_guard lock(s->mu);
      require(s->status == SessionStatus::done, ErrorCode::conflict, "session has no result yet");
      if (s->judgement) {
        if (*s->judgement == body) return ApiResponse{200, {{"recorded", true}}, {{"Idempotent-Replay", "true"}}};
        throw Error(ErrorCode::conflict, "judgement already recorded");
      }
      s->judgement = body;
      append(*s, {{"event", "judgement"}, {"judgement", body}});
      return ApiResponse{200, {{"recorded", true}}, {}};
    });
  }

  // --- helpers for tools and tests -----------------------------------------

  /// Blocks until the session is done or failed, or the timeout passes.
  bool wait_for_result(const std::string& id, std::chrono::milliseconds timeout) {
    auto s = find(id);
    const auto until = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      {
        std::lock_guard lock(s->mu);
        if (s->status == SessionStatus::done || s->status == SessionStatus::failed) return true;
      }
      if (std::chrono::steady_clock::now() > until) return false;
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
  }

  std::optional<std::vector<int>> final_summary(const std::string& id) {
    auto s = find(id);
    std::lock_guard lock(s->mu);
    return s->with_interaction;
  }

  std::filesystem::path log_path(const std::string& id) const { return cfg_.session_dir / (id + ".jsonl"); }

 private:
  template <typename F>
  ApiResponse guarded(F&& f) {
    try {
      return f();
    } catch (const Error& e) {
      return error_response(e.code(), e.what());
    } catch (const json::exception& e) {
      return error_response(ErrorCode::invalid_argument, std::string("bad JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
      return error_response(ErrorCode::invalid_argument, e.what());
    } catch (const std::out_of_range& e) {
      return error_response(ErrorCode::invalid_argument, e.what());
    }
  }

  std::shared_ptr<Session> find(const std::string& id) {
    std::shared_lock lock(registry_mu_);
    auto it = sessions_.find(id);
    require(it != sessions_.end(), ErrorCode::not_found, "unknown session: " + id);
    return it->second;
  }

  std::string fresh_id() {
    std::lock_guard lock(id_mu_);
    return hex64(id_rng_()) + hex64(id_rng_());
  }

  std::uint64_t fresh_seed() {
    std::lock_guard lock(id_mu_);
    return id_rng_();
  }

  std::shared_ptr<Session> open_session(const SessionParams& p, const std::string& id) {
    require(p.system == "april" || p.system == "sppi", ErrorCode::invalid_argument,
            "system must be april or sppi");
    require(p.rounds >= 1, ErrorCode::invalid_argument, "rounds must be >= 1");
    require(p.beta >= 0.0 && p.beta <= 1.0, ErrorCode::invalid_argument, "beta must lie in [0,1]");
    auto s = std::make_shared<Session>();
    s->id = id;
    s->params = p;
    s->data = clusters_.get(p.cluster);
    InteractionOptions opt = interaction_options(cfg_.experiment, p.system == "sppi" ? "gibbs" : cfg_.experiment.strategy);
    opt.beta = p.beta;
    opt.source = PreferenceSource::human;
    s->interaction = std::make_unique<InteractionSession>(*s->data, opt, derive_seed(p.seed, "query"));
    s->interaction->pending_pair();
    std::unique_lock lock(registry_mu_);
    require(!sessions_.contains(id), ErrorCode::conflict, "duplicate session id");
    sessions_.emplace(id, s);
    return s;
  }

  json summary_json(const ClusterData& d, const std::vector<int>& ids, bool with_meta) const {
    json sentences = json::array();
    int tokens = 0;
    for (int i : ids) {
      sentences.push_back(d.cluster.sentences.at(static_cast<std::size_t>(i)).text);
      tokens += d.cluster.token_count(i);
    }
    json out{{"sentences", sentences}};
    if (with_meta) {
      out["sentence_ids"] = ids;
      out["token_count"] = tokens;
      if (!cfg_.blind_mode && d.has_gold()) out["u_star"] = d.u_star_of(ids);
    }
    return out;
  }

  /// Status plus the outstanding pair or training progress. Caller holds s.mu.
  json view(Session& s) {
    json out{{"session", s.id},
             {"status", to_string(s.status)},
             {"rounds", s.params.rounds},
             {"answered", s.choices.size()}};
    if (s.status == SessionStatus::awaiting_preference) {
      const auto [l, r] = s.interaction->pending_pair();
      out["round"] = s.choices.size() + 1;
      out["pair"] = {{"left", summary_json(*s.data, s.data->db.at(l).sentence_ids, false)},
                     {"right", summary_json(*s.data, s.data->db.at(r).sentence_ids, false)}};
    } else if (s.status == SessionStatus::training) {
      out["progress"] = {{"episode", s.episodes_done.load()}, {"episodes", s.episodes_total}};
    }
    return out;
  }

  /// Caller holds s.mu.
  void apply_preference(Session& s, Direction choice) {
    s.interaction->answer(choice);
    s.choices.push_back(choice);
    if (static_cast<int>(s.choices.size()) == s.params.rounds) start_stage2(s);
    s.responses.push_back(view(s));
  }

  void start_stage2(Session& s) {
    s.status = SessionStatus::training;
    s.without_interaction = s.data->db.at(heuristic_summary(*s.data)).sentence_ids;
    if (s.params.system == "sppi") {
      finish(s, s.data->db.at(sppi_best(s.interaction->sppi(), s.data->db)).sentence_ids);
      return;
    }
    const RlKind kind = parse_rl_kind(cfg_.rl);
    const RlConfig rl = cfg_.experiment.rl(derive_seed(s.params.seed, "april-" + cfg_.rl));
    s.episodes_total = kind == RlKind::ntd ? rl.episodes : 0;
    auto rewards = stage2_reward(s.interaction->utilities(), cfg_.experiment.reward_signal);
    std::shared_ptr<Session> self = find(s.id);
    pool_->submit([this, self, rewards = std::move(rewards), kind, rl] {
      NtdHooks hooks;
      hooks.on_episode = [&](int ep, double, const NeuralValueModel&) { self->episodes_done = ep + 1; };
      try {
        const auto out = run_stage2(*self->data, rewards, kind, rl, hooks);
        std::lock_guard lock(self->mu);
        finish(*self, out.summary);
      } catch (const std::exception& e) {
        std::lock_guard lock(self->mu);
        self->status = SessionStatus::failed;
        self->failure = e.what();
        append(*self, {{"event", "failure"}, {"message", self->failure}});
      }
    });
  }

  /// Caller holds s.mu.
  void finish(Session& s, std::vector<int> summary) {
    s.with_interaction = std::move(summary);
    s.status = SessionStatus::done;
    append(s, {{"event", "result"},
               {"with_interaction", *s.with_interaction},
               {"without_interaction", *s.without_interaction}});
  }

  void append(Session& s, const json& event) {
    if (cfg_.session_dir.empty() || s.replaying) return;
    std::ofstream out(log_path(s.id), std::ios::app);
    require(static_cast<bool>(out), ErrorCode::io, "cannot append to session log " + s.id);
    out << event.dump() << '\n';
    out.flush();
  }

  /// Rebuilds every logged session by replaying its preferences; sessions
  /// that ended mid-training are retrained.
  void restore() {
    std::vector<std::filesystem::path> logs;
    for (const auto& e : std::filesystem::directory_iterator(cfg_.session_dir))
      if (e.path().extension() == ".jsonl") logs.push_back(e.path());
    std::sort(logs.begin(), logs.end());
    for (const auto& path : logs) {
      std::ifstream in(path);
      std::string line;
      std::vector<json> events;
      while (std::getline(in, line))
        if (!line.empty()) events.push_back(json::parse(line));
      if (events.empty() || events.front().value("event", "") != "create") continue;
      const auto& pj = events.front()["params"];
      SessionParams p{pj["cluster"], pj["system"], pj["rounds"], pj["beta"], std::stoull(pj["seed"].get<std::string>())};
      auto s = open_session(p, path.stem().string());
      std::lock_guard lock(s->mu);
      std::optional<json> result;
      s->replaying = true;
      for (std::size_t i = 1; i < events.size(); ++i) {
        const auto& ev = events[i];
        const auto kind = ev.value("event", "");
        if (kind == "preference") {
          s->interaction->answer(parse_direction(ev["choice"].get<std::string>()));
          s->choices.push_back(parse_direction(ev["choice"].get<std::string>()));
          if (static_cast<int>(s->choices.size()) < p.rounds) s->responses.push_back(view(*s));
        } else if (kind == "result") {
          result = ev;
        } else if (kind == "judgement") {
          s->judgement = ev["judgement"];
        }
      }
      s->replaying = false;
      if (static_cast<int>(s->choices.size()) == p.rounds) {
        if (result) {
          s->without_interaction = (*result)["without_interaction"].get<std::vector<int>>();
          s->with_interaction = (*result)["with_interaction"].get<std::vector<int>>();
          s->status = SessionStatus::done;
          s->responses.push_back(view(*s));
        } else {
          start_stage2(*s);
          s->responses.push_back(view(*s));
        }
      }
    }
  }

  ServiceConfig cfg_;
  ClusterStore clusters_;
  std::shared_mutex registry_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mutex id_mu_;
  std::mt19937_64 id_rng_{std::random_device{}()};
  std::unique_ptr<WorkerPool> pool_;
};

}  // namespace april
