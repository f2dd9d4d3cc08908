#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "april/corpus.hpp"
#include "april/summary_db.hpp"
#include "april/synthetic.hpp"

namespace fixtures {

namespace fs = std::filesystem;

/// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("april-" + tag + "-" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

inline void write(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << content;
}

/// One sentence per entry, each its own line; every sentence is its own
/// document unless `docs` groups them.
inline april::DocumentCluster lines_cluster(const std::vector<std::string>& sentences,
                                            const std::vector<std::string>& refs, int limit = 100) {
  std::string text;
  for (const auto& s : sentences) text += s + "\n";
  return april::make_cluster("lines", {{"doc", text}}, refs, limit, true);
}

/// Small cluster with `n` sentences whose tokens are drawn from a shared
/// vocabulary, so summaries overlap in bigrams.
inline april::DocumentCluster random_cluster(int n, std::uint64_t seed, int limit = 40,
                                             int min_len = 4, int max_len = 12) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> len(min_len, max_len);
  std::uniform_int_distribution<int> word(0, 24);
  std::vector<std::string> sentences;
  for (int i = 0; i < n; ++i) {
    std::string s;
    const int k = len(rng);
    for (int j = 0; j < k; ++j) s += (j ? " w" : "w") + std::to_string(word(rng));
    sentences.push_back(s);
  }
  std::string ref;
  for (int j = 0; j < 20; ++j) ref += (j ? " w" : "w") + std::to_string(word(rng));
  return lines_cluster(sentences, {ref}, limit);
}

inline april::DocumentCluster small_synthetic(int sentences, std::uint64_t seed, int limit = 60) {
  april::SyntheticOptions opt;
  opt.sentences = sentences;
  opt.length_limit = limit;
  return april::synthetic_cluster("toy", opt, seed);
}

/// DB over a cluster with hand-picked sentence sets.
inline april::SummaryDB db_from(const std::vector<std::vector<int>>& sets, const april::DocumentCluster& c,
                                const april::FeatureSpace& space) {
  april::SummaryDB db;
  db.cluster_id = c.id;
  for (std::size_t i = 0; i < sets.size(); ++i)
    db.summaries.push_back(april::make_summary(sets[i], c, space, static_cast<int>(i)));
  db.features.resize(space.dim(), db.size());
  for (int i = 0; i < db.size(); ++i) db.features.col(i) = db.summaries[static_cast<std::size_t>(i)].features;
  return db;
}

}  // namespace fixtures
