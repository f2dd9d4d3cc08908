// april_cli: DB generation, simulations, RL training, noise fitting and the
// HTTP session service.

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "april/config.hpp"
#include "april/harness.hpp"
#include "april/http.hpp"
#include "april/oracle.hpp"
#include "april/rl.hpp"
#include "april/service.hpp"

namespace {

using namespace april;

struct Common {
  std::string config_path;
  std::string format = "table";
  std::string out;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c, bool seed_required) {
  cmd->add_option("--config", c.config_path, "flat key = value config file");
  auto* s = cmd->add_option("--seed", c.seed, "master seed");
  if (seed_required) s->required();
  cmd->add_option("--format", c.format, "table | tsv")->check(CLI::IsMember({"table", "tsv"}));
  cmd->add_option("-o,--out", c.out, "write the report here instead of stdout");
  // Every config key is accepted as --key value.
  cmd->allow_extras();
}

ExperimentConfig build_config(CLI::App* cmd, const Common& c) {
  ExperimentConfig cfg = c.config_path.empty() ? ExperimentConfig{} : load_config(c.config_path);
  const auto extras = cmd->remaining();
  for (std::size_t i = 0; i < extras.size(); ++i) {
    std::string key = extras[i];
    require(key.rfind("--", 0) == 0, ErrorCode::invalid_argument, "unexpected argument: " + key);
    key = key.substr(2);
    std::string value;
    if (auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      require(i + 1 < extras.size(), ErrorCode::invalid_argument, "missing value for --" + key);
      value = extras[++i];
    }
    std::replace(key.begin(), key.end(), '-', '_');
    cfg.set(key, value);
  }
  if (c.seed) cfg.seed = *c.seed;
  cfg.validate();
  return cfg;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::io, "cannot write " + path);
  out << text;
}

void log_timing(const RunReport& r) {
  std::fprintf(stderr, "[timing] total %.1fs, slowest query selection %.1f ms%s\n", r.timing.seconds,
               r.timing.max_selection_ms, r.timing.max_selection_ms > 500.0 ? " (over the 500 ms guard)" : "");
  if (r.timing.max_td_seconds > 0.0)
    std::fprintf(stderr, "[timing] slowest TD training %.1fs%s\n", r.timing.max_td_seconds,
                 r.timing.max_td_seconds > 120.0 ? " (over the 2 min guard)" : "");
  if (r.timing.max_ntd_seconds > 0.0)
    std::fprintf(stderr, "[timing] slowest NTD training %.1fs%s\n", r.timing.max_ntd_seconds,
                 r.timing.max_ntd_seconds > 600.0 ? " (over the 10 min guard)" : "");
}

void emit(const RunReport& r, const Common& c) {
  log_timing(r);
  write_output(c.out, emit_report(r, c.format == "tsv" ? ReportFormat::delimited : ReportFormat::text_table));
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

const ClusterData& pick_cluster(const std::vector<ClusterData>& data, const std::string& id) {
  for (const auto& d : data)
    if (d.cluster.id == id) return d;
  throw Error(ErrorCode::not_found, "unknown cluster: " + id);
}

std::string format_summary(const ClusterData& d, const std::vector<int>& ids) {
  std::string out;
  for (int i : ids) out += d.cluster.sentences.at(static_cast<std::size_t>(i)).text + "\n";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"APRIL: active preference-based reinforcement learning for extractive summarisation"};
  app.require_subcommand(1);

  Common gen_c, s1_c, full_c, rl_c;

  auto* gen = app.add_subcommand("gen-db", "generate and persist the summary DB of every cluster");
  std::string db_dir = "dbs";
  gen->add_option("--dir", db_dir, "output directory (one <cluster>.db per cluster)");
  add_common(gen, gen_c, false);

  auto* s1 = app.add_subcommand("simulate-stage1", "query-strategy comparison with a simulated user");
  add_common(s1, s1_c, true);

  auto* full = app.add_subcommand("simulate-full", "SPPI vs APRIL end to end with a simulated user");
  std::string sweep;
  full->add_option("--sweep", sweep, "comma-separated episode budgets, e.g. 500,1000,2000,3000");
  add_common(full, full_c, true);

  auto* train = app.add_subcommand("train-rl", "train a value model on one cluster and print its summary");
  std::string rl_cluster, rl_kind = "ntd", rl_reward = "heuristic", model_out;
  train->add_option("--cluster", rl_cluster, "cluster id")->required();
  train->add_option("--kind", rl_kind, "td | lstd | ntd")->check(CLI::IsMember({"td", "lstd", "ntd"}));
  train->add_option("--reward", rl_reward, "heuristic | gold")->check(CLI::IsMember({"heuristic", "gold"}));
  train->add_option("--model-out", model_out, "persist the trained model here");
  add_common(train, rl_c, false);

  auto* fit = app.add_subcommand("fit-noise", "maximum-likelihood LNO flatness m");
  std::string fit_input;
  int fit_n = 10000;
  double fit_true_m = 2.14, fit_gap = 7.0;
  std::uint64_t fit_seed = 1;
  fit->add_option("--input", fit_input, "TSV lines: u_left u_right left|right (default: synthetic draws)");
  fit->add_option("--n", fit_n, "synthetic preference count");
  fit->add_option("--m", fit_true_m, "m used for synthetic draws");
  fit->add_option("--max-gap", fit_gap, "synthetic utility gaps are uniform in [0, max-gap]");
  fit->add_option("--seed", fit_seed, "seed for synthetic draws");

  auto* serve = app.add_subcommand("serve", "run the HTTP session service");
  std::string host = "0.0.0.0", static_dir, serve_config;
  int port = 8080;
  ServiceConfig svc;
  if (const char* p = std::getenv("APRIL_PORT"); p && *p) port = std::atoi(p);
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port (default APRIL_PORT or 8080)");
  serve->add_option("--config", serve_config, "experiment config for corpus, DB and RL settings");
  serve->add_option("--workers", svc.workers, "Stage-2 training threads");
  serve->add_option("--static", static_dir, "serve a built web UI from this directory");
  serve->add_option("--episodes", svc.experiment.episodes, "RL episode budget for APRIL sessions");
  serve->add_flag("!--no-blind", svc.blind_mode, "expose U* in results (clusters with references only)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const auto cfg = build_config(gen, gen_c);
      for (auto& c : load_corpus(cfg)) {
        const auto d = prepare_one(cfg, std::move(c), db_dir);
        std::fprintf(stderr, "%s: %d summaries (%s)\n", d.cluster.id.c_str(), d.db.size(),
                     db_checksum(d.db).c_str());
      }
    } else if (s1->parsed()) {
      emit(run_stage1(build_config(s1, s1_c)), s1_c);
    } else if (full->parsed()) {
      const auto cfg = build_config(full, full_c);
      emit(sweep.empty() ? run_full(cfg) : run_episode_sweep(cfg, parse_int_list(sweep)), full_c);
    } else if (train->parsed()) {
      auto cfg = build_config(train, rl_c);
      const auto data = prepare_corpus(cfg);
      const auto& d = pick_cluster(data, rl_cluster);
      const auto rewards = stage2_reward(rl_reward == "gold" ? d.gold : d.h, cfg.reward_signal);
      const RlConfig rl = cfg.rl(derive_seed(cfg.seed, "train-rl"));
      std::vector<int> ids;
      StoredModel stored;
      if (rl_kind == "ntd") {
        const auto m = train_ntd(d.db, d.space, rewards, rl);
        ids = derive_greedy(m, d.cluster, d.space);
        stored = store(m, rl.hash());
      } else {
        const auto m = rl_kind == "td" ? train_td(d.db, d.space, rewards, rl) : train_lstd(d.db, d.space, rewards, rl);
        ids = derive_greedy(m, d.cluster, d.space);
        stored = store(m, rl.hash());
      }
      if (!model_out.empty()) write_model(stored, model_out);
      std::string text = format_summary(d, ids);
      char line[128];
      std::snprintf(line, sizeof line, "# U* = %.4f\n", d.u_star_of(ids));
      write_output(rl_c.out, text + line);
    } else if (fit->parsed()) {
      std::vector<NoisyPreference> records;
      if (fit_input.empty()) {
        records = synthetic_noisy_preferences(fit_n, fit_true_m, fit_gap, fit_seed);
      } else {
        std::ifstream in(fit_input);
        require(static_cast<bool>(in), ErrorCode::io, "cannot read " + fit_input);
        std::string choice;
        NoisyPreference r;
        while (in >> r.u_left >> r.u_right >> choice) {
          r.direction = parse_direction(choice);
          records.push_back(r);
        }
      }
      std::printf("m = %.6f  (%zu preferences)\n", fit_m(records), records.size());
    } else if (serve->parsed()) {
      if (!serve_config.empty()) {
        const int episodes = svc.experiment.episodes;
        svc.experiment = load_config(serve_config);
        if (serve->count("--episodes")) svc.experiment.episodes = episodes;
      }
      svc = ServiceConfig::from_env(svc);
      SessionManager manager(svc);
      httplib::Server server;
      bind_routes(server, manager);
      if (!static_dir.empty()) server.set_mount_point("/", static_dir);
      std::fprintf(stderr, "listening on %s:%d (%zu clusters, blind=%s)\n", host.c_str(), port,
                   manager.clusters().ids().size(), svc.blind_mode ? "true" : "false");
      if (!server.listen(host, port)) {
        std::fprintf(stderr, "cannot bind %s:%d\n", host.c_str(), port);
        return 1;
      }
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", to_string(e.code()), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
