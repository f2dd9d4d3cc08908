#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "april/common.hpp"
#include "april/corpus.hpp"

namespace april {

/// Candidate pool D_S(x). Doubles as the replay memory for Stage-2 RL.
struct SummaryDB {
  std::string cluster_id;
  std::uint64_t seed = 0;
  std::string generator = "random";
  std::vector<Summary> summaries;
  Matrix features;  // dim x size, column i == summaries[i].features
  int duplicates = 0;

  int size() const { return static_cast<int>(summaries.size()); }
  const Summary& at(int id) const { return summaries.at(static_cast<std::size_t>(id)); }
};

namespace detail {

inline void finalize_features(SummaryDB& db, int dim) {
  db.features.resize(dim, db.size());
  for (int i = 0; i < db.size(); ++i) db.features.col(i) = db.summaries[static_cast<std::size_t>(i)].features;
}

inline std::string db_body(const SummaryDB& db) {
  std::string body;
  for (const auto& s : db.summaries) {
    body += std::to_string(s.id);
    body += '\t';
    for (std::size_t k = 0; k < s.sentence_ids.size(); ++k) {
      if (k) body += ',';
      body += std::to_string(s.sentence_ids[k]);
    }
    body += '\n';
  }
  return body;
}

}  // namespace detail

/// Checksum of the record section; identifies a DB in Preference DB headers.
inline std::string db_checksum(const SummaryDB& db) { return hex64(fnv1a(detail::db_body(db))); }

/// Random candidates: sentences are drawn uniformly without replacement and
/// appended until the next draw would overflow the length limit (no
/// backtracking). Duplicate sentence sets are redrawn up to `retry_cap`
/// times, after which the duplicate is kept and counted.
inline SummaryDB generate_db(const DocumentCluster& cluster, const FeatureSpace& space, int size,
                             std::uint64_t seed, int retry_cap = 64) {
  require(size >= 2, ErrorCode::invalid_argument, "summary DB size must be >= 2");
  const int n = cluster.size();
  require(n >= 1, ErrorCode::invalid_argument, "cluster has no sentences");
  bool any_fits = false;
  for (int i = 0; i < n; ++i) any_fits = any_fits || cluster.token_count(i) <= cluster.length_limit;
  require(any_fits, ErrorCode::invalid_argument, "no sentence fits the length limit");

  SummaryDB db;
  db.cluster_id = cluster.id;
  db.seed = seed;
  std::mt19937_64 rng(seed);
  std::set<std::vector<int>> seen;
  std::vector<int> order(static_cast<std::size_t>(n));

  for (int id = 0; id < size; ++id) {
    std::vector<int> draft;
    for (int attempt = 0;; ++attempt) {
      draft.clear();
      std::iota(order.begin(), order.end(), 0);
      int total = 0;
      for (int k = 0; k < n; ++k) {
        std::uniform_int_distribution<int> pick(k, n - 1);
        std::swap(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(pick(rng))]);
        const int sid = order[static_cast<std::size_t>(k)];
        const int len = cluster.token_count(sid);
        if (total + len <= cluster.length_limit) {
          draft.push_back(sid);
          total += len;
        } else if (!draft.empty()) {
          break;
        }
      }
      auto key = draft;
      std::sort(key.begin(), key.end());
      if (seen.insert(key).second) break;
      if (attempt + 1 >= retry_cap) {
        ++db.duplicates;
        break;
      }
    }
    db.summaries.push_back(make_summary(draft, cluster, space, id));
  }
  detail::finalize_features(db, space.dim());
  return db;
}

inline void persist_db(const SummaryDB& db, const std::filesystem::path& path) {
  const std::string body = detail::db_body(db);
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::io, "cannot write " + path.string());
  out << "APRIL-SUMMARY-DB\tv1\n"
      << "cluster\t" << db.cluster_id << '\n'
      << "seed\t" << db.seed << '\n'
      << "size\t" << db.size() << '\n'
      << "generator\t" << db.generator << '\n'
      << "checksum\t" << hex64(fnv1a(body)) << '\n'
      << body;
}

/// Parses a persisted DB and re-validates it against `cluster`; features are
/// recomputed. Format errors report the byte offset where parsing failed.
inline SummaryDB parse_db(const std::string& content, const DocumentCluster& cluster,
                          const FeatureSpace& space) {
  std::size_t pos = 0;
  auto fail = [&](const std::string& what, std::size_t at) -> Error {
    return Error(ErrorCode::db_format, what + " at byte offset " + std::to_string(at));
  };
  auto next_line = [&](std::string& line) -> bool {
    if (pos >= content.size()) return false;
    auto nl = content.find('\n', pos);
    if (nl == std::string::npos) throw fail("truncated line (missing newline)", pos);
    line = content.substr(pos, nl - pos);
    pos = nl + 1;
    return true;
  };
  auto header = [&](const std::string& key) -> std::string {
    const std::size_t at = pos;
    std::string line;
    if (!next_line(line)) throw fail("unexpected end of file reading '" + key + "'", at);
    auto tab = line.find('\t');
    if (tab == std::string::npos || line.substr(0, tab) != key)
      throw fail("expected header '" + key + "'", at);
    return line.substr(tab + 1);
  };

  if (header("APRIL-SUMMARY-DB") != "v1") throw fail("unsupported version", 0);
  SummaryDB db;
  db.cluster_id = header("cluster");
  require(db.cluster_id == cluster.id, ErrorCode::cluster_mismatch,
          "summary DB belongs to cluster '" + db.cluster_id + "', not '" + cluster.id + "'");
  std::size_t size = 0;
  try {
    db.seed = std::stoull(header("seed"));
    size = std::stoull(header("size"));
  } catch (const std::invalid_argument&) {
    throw fail("malformed numeric header", pos);
  }
  db.generator = header("generator");
  const std::string checksum = header("checksum");
  const std::size_t body_start = pos;

  std::string line;
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t at = pos;
    if (!next_line(line))
      throw fail("truncated: expected " + std::to_string(size) + " records, found " +
                     std::to_string(i),
                 at);
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw fail("malformed record", at);
    if (line.substr(0, tab) != std::to_string(i)) throw fail("non-dense record id", at);
    std::vector<int> ids;
    std::stringstream ss(line.substr(tab + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        ids.push_back(std::stoi(item));
      } catch (const std::exception&) {
        throw fail("malformed sentence id", at);
      }
    }
    for (int sid : ids) {
      if (sid < 0 || sid >= cluster.size()) throw fail("sentence id out of range", at);
    }
    auto s = make_summary(std::move(ids), cluster, space, static_cast<int>(i));
    if (s.token_count > cluster.length_limit) throw fail("summary exceeds length limit", at);
    db.summaries.push_back(std::move(s));
  }
  if (pos != content.size()) throw fail("trailing data", pos);
  if (hex64(fnv1a(std::string_view(content).substr(body_start))) != checksum) {
    throw Error(ErrorCode::checksum_mismatch, "summary DB checksum mismatch");
  }
  detail::finalize_features(db, space.dim());
  return db;
}

inline SummaryDB load_db(const std::filesystem::path& path, const DocumentCluster& cluster,
                         const FeatureSpace& space) {
  return parse_db(detail::read_file(path), cluster, space);
}

}  // namespace april
