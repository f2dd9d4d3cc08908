#pragma once

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "april/common.hpp"
#include "april/corpus.hpp"
#include "april/querier.hpp"
#include "april/rl.hpp"

namespace april {

/// Every knob of a simulation run. Persisted as flat `key = value` lines;
/// the CLI accepts each key as `--key value`.
struct ExperimentConfig {
  // corpus
  std::string corpus = "synthetic";  // "synthetic" or a directory of clusters
  int synthetic_clusters = 20;
  int min_sentences = 10;
  int max_sentences = 40;
  int length_limit = 0;  // 0 keeps the corpus default
  int feature_dim = 200;
  int db_size = 5000;

  // interaction
  std::vector<int> rounds{10, 50, 100};
  std::string strategy = "al";  // al | random | gibbs | jn
  double w_gap = 0.0;
  double w_div = 0.6;
  double w_den = 0.2;
  double w_unc = 0.2;
  std::string oracle = "lno";  // lno | perfect
  double m = 2.14;
  double beta = 0.5;
  double alpha = 1e-3;
  double gamma = 1e-3;

  // stage 2
  std::string systems = "sppi,april-td,april-ntd";
  std::string reward_signal = "rank";  // rank | utility
  int episodes = 3000;
  int sync_period = 50;
  double rl_lr = 1e-3;
  int hidden = 100;

  int repetitions = 0;  // 0: 20 for stage-1 runs, 10 for full runs
  std::uint64_t seed = 0;
  int workers = 1;

  QueryWeights weights() const { return QueryWeights::make(w_gap, w_div, w_den, w_unc); }

  RlConfig rl(std::uint64_t rl_seed) const {
    RlConfig c;
    c.episodes = episodes;
    c.sync_period = sync_period;
    c.lr = rl_lr;
    c.adam.lr = rl_lr;
    c.hidden = hidden;
    c.seed = rl_seed;
    return c;
  }

  std::vector<std::string> system_list() const {
    std::vector<std::string> out;
    std::stringstream ss(systems);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = text::trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

  struct Field {
    std::string key;
    std::function<std::string()> get;
    std::function<void(const std::string&)> set;
  };

  std::vector<Field> fields();

  /// Canonical `key=value` lines in key order.
  std::string canonical() const {
    auto copy = *this;
    std::map<std::string, std::string> kv;
    for (auto& f : copy.fields()) kv[f.key] = f.get();
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
  }

  std::string hash() const { return hex64(fnv1a(canonical())); }

  void set(const std::string& key, const std::string& value) {
    for (auto& f : fields()) {
      if (f.key == key) {
        try {
          f.set(value);
        } catch (const Error&) {
          throw;
        } catch (const std::exception&) {
          throw Error(ErrorCode::invalid_argument, "bad value for " + key + ": '" + value + "'");
        }
        return;
      }
    }
    throw Error(ErrorCode::invalid_argument, "unknown config key: " + key);
  }

  bool has_key(const std::string& key) {
    for (auto& f : fields()) {
      if (f.key == key) return true;
    }
    return false;
  }

  void validate() const {
    require(db_size >= 2, ErrorCode::invalid_argument, "db_size must be >= 2");
    require(beta >= 0.0 && beta <= 1.0, ErrorCode::invalid_argument, "beta must lie in [0,1]");
    require(m > 0.0, ErrorCode::invalid_argument, "m must be positive");
    require(alpha > 0.0 && gamma > 0.0, ErrorCode::invalid_argument, "learning rates must be positive");
    require(!rounds.empty(), ErrorCode::invalid_argument, "rounds must list at least one N");
    for (int n : rounds) require(n >= 0, ErrorCode::invalid_argument, "N must be >= 0");
    require(repetitions >= 0, ErrorCode::invalid_argument, "repetitions must be >= 0");
    require(min_sentences >= 1 && max_sentences >= min_sentences, ErrorCode::invalid_argument,
            "bad synthetic sentence range");
    require(workers >= 1, ErrorCode::invalid_argument, "workers must be >= 1");
    require(oracle == "lno" || oracle == "perfect", ErrorCode::invalid_argument,
            "oracle must be lno or perfect");
    require(reward_signal == "rank" || reward_signal == "utility", ErrorCode::invalid_argument,
            "reward_signal must be rank or utility");
    weights();
    rl(0).validate();
  }
};

namespace detail {

inline std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

inline std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = text::trim(item);
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

template <typename T>
ExperimentConfig::Field field(const std::string& key, T& ref) {
  ExperimentConfig::Field f;
  f.key = key;
  if constexpr (std::is_same_v<T, std::string>) {
    f.get = [&ref] { return ref; };
    f.set = [&ref](const std::string& v) { ref = v; };
  } else if constexpr (std::is_same_v<T, double>) {
    f.get = [&ref] { return fmt_double(ref); };
    f.set = [&ref](const std::string& v) { ref = std::stod(v); };
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    f.get = [&ref] { return std::to_string(ref); };
    f.set = [&ref](const std::string& v) { ref = std::stoull(v); };
  } else if constexpr (std::is_same_v<T, std::vector<int>>) {
    f.get = [&ref] { return join_ints(ref); };
    f.set = [&ref](const std::string& v) { ref = parse_ints(v); };
  } else {
    f.get = [&ref] { return std::to_string(ref); };
    f.set = [&ref](const std::string& v) { ref = std::stoi(v); };
  }
  return f;
}

}  // namespace detail

inline std::vector<ExperimentConfig::Field> ExperimentConfig::fields() {
  using detail::field;
  return {field("corpus", corpus),
          field("synthetic_clusters", synthetic_clusters),
          field("min_sentences", min_sentences),
          field("max_sentences", max_sentences),
          field("length_limit", length_limit),
          field("feature_dim", feature_dim),
          field("db_size", db_size),
          field("rounds", rounds),
          field("strategy", strategy),
          field("w_gap", w_gap),
          field("w_div", w_div),
          field("w_den", w_den),
          field("w_unc", w_unc),
          field("oracle", oracle),
          field("m", m),
          field("beta", beta),
          field("alpha", alpha),
          field("gamma", gamma),
          field("systems", systems),
          field("reward_signal", reward_signal),
          field("episodes", episodes),
          field("sync_period", sync_period),
          field("rl_lr", rl_lr),
          field("hidden", hidden),
          field("repetitions", repetitions),
          field("seed", seed),
          field("workers", workers)};
}

inline ExperimentConfig parse_config(std::string_view content) {
  ExperimentConfig c;
  for (const auto& [k, v] : detail::read_key_values(content)) c.set(k, v);
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(detail::read_file(path));
}

}  // namespace april
