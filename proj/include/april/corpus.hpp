#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "april/common.hpp"
#include "april/text.hpp"

namespace april {

/// Interns token strings as dense ids so n-gram bookkeeping works on ints.
class Vocabulary {
 public:
  int intern(const std::string& token) {
    auto [it, inserted] = ids_.try_emplace(token, static_cast<int>(words_.size()));
    if (inserted) words_.push_back(token);
    return it->second;
  }

  std::optional<int> find(const std::string& token) const {
    auto it = ids_.find(token);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& word(int id) const { return words_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> words_;
};

struct Sentence {
  std::string text;
  std::vector<int> tokens;
  int doc = 0;

  int token_count() const { return static_cast<int>(tokens.size()); }
};

/// One topic: segmented, tokenized sentences plus optional gold references.
struct DocumentCluster {
  std::string id;
  std::vector<std::string> documents;
  std::vector<Sentence> sentences;
  std::vector<std::vector<int>> references;
  int length_limit = 100;
  Vocabulary vocab;
  std::vector<std::string> warnings;

  bool has_references() const { return !references.empty(); }
  int size() const { return static_cast<int>(sentences.size()); }
  int token_count(int sentence) const {
    return sentences.at(static_cast<std::size_t>(sentence)).token_count();
  }
};

struct RawDocument {
  std::string name;
  std::string text;
};

/// Builds a cluster from in-memory texts. Empty documents are skipped and
/// noted in `warnings`.
inline DocumentCluster make_cluster(std::string id, const std::vector<RawDocument>& docs,
                                    const std::vector<std::string>& references,
                                    int length_limit = 100, bool pre_segmented = false) {
  require(length_limit > 0, ErrorCode::invalid_argument, "length_limit must be positive");
  DocumentCluster cluster;
  cluster.id = std::move(id);
  cluster.length_limit = length_limit;
  for (const auto& doc : docs) {
    auto pieces = pre_segmented ? text::split_lines(doc.text) : text::split_sentences(doc.text);
    std::vector<Sentence> kept;
    for (auto& piece : pieces) {
      auto toks = text::tokenize(piece);
      if (toks.empty()) continue;
      Sentence s;
      s.text = std::move(piece);
      s.doc = static_cast<int>(cluster.documents.size());
      for (const auto& t : toks) s.tokens.push_back(cluster.vocab.intern(t));
      kept.push_back(std::move(s));
    }
    if (kept.empty()) {
      cluster.warnings.push_back("empty document skipped: " + doc.name);
      continue;
    }
    cluster.documents.push_back(doc.name);
    for (auto& s : kept) cluster.sentences.push_back(std::move(s));
  }
  require(!cluster.sentences.empty(), ErrorCode::corpus_format,
          "cluster " + cluster.id + " has no non-empty sentences");
  for (std::size_t r = 0; r < references.size(); ++r) {
    auto toks = text::tokenize(references[r]);
    if (toks.empty()) {
      cluster.warnings.push_back("empty reference skipped: #" + std::to_string(r));
      continue;
    }
    std::vector<int> ids;
    ids.reserve(toks.size());
    for (const auto& t : toks) ids.push_back(cluster.vocab.intern(t));
    cluster.references.push_back(std::move(ids));
  }
  return cluster;
}

namespace detail {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::io, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::filesystem::path> txt_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Flat `key = value` lines; '#' starts a comment.
inline std::map<std::string, std::string> read_key_values(std::string_view content) {
  std::map<std::string, std::string> out;
  for (const auto& line : text::split_lines(content)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto key = text::trim(std::string_view(line).substr(0, eq));
    auto value = text::trim(std::string_view(line).substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    out[key] = value;
  }
  return out;
}

}  // namespace detail

/// Reads `<dir>/docs/*.txt`, optional `<dir>/refs/*.txt` and an optional
/// `<dir>/meta.toml` (`length_limit`, `pre_segmented`). An explicit
/// `length_limit` argument wins over the meta file.
inline DocumentCluster load_cluster(const std::filesystem::path& dir,
                                    std::optional<int> length_limit = std::nullopt,
                                    std::optional<bool> pre_segmented = std::nullopt) {
  namespace fs = std::filesystem;
  const fs::path docs_dir = dir / "docs";
  require(fs::is_directory(docs_dir), ErrorCode::corpus_format,
          "missing docs/ directory in " + dir.string());
  int limit = 100;
  bool segmented = false;
  if (fs::exists(dir / "meta.toml")) {
    auto kv = detail::read_key_values(detail::read_file(dir / "meta.toml"));
    if (kv.count("length_limit")) limit = std::stoi(kv["length_limit"]);
    if (kv.count("pre_segmented")) segmented = kv["pre_segmented"] == "true";
  }
  if (length_limit) limit = *length_limit;
  if (pre_segmented) segmented = *pre_segmented;

  std::vector<RawDocument> docs;
  for (const auto& p : detail::txt_files(docs_dir)) {
    docs.push_back({p.filename().string(), detail::read_file(p)});
  }
  require(!docs.empty(), ErrorCode::corpus_format, "no .txt documents in " + docs_dir.string());
  std::vector<std::string> refs;
  if (fs::is_directory(dir / "refs")) {
    for (const auto& p : detail::txt_files(dir / "refs")) refs.push_back(detail::read_file(p));
  }
  auto name = dir.filename().string();
  if (name.empty()) name = dir.parent_path().filename().string();
  return make_cluster(name, docs, refs, limit, segmented);
}

/// Bag-of-bigram index: the `dim` most frequent within-sentence bigrams of
/// the cluster, ties broken lexicographically. Also caches, per sentence,
/// the feature indices of its indexed bigrams.
class FeatureSpace {
 public:
  using Bigram = std::pair<std::string, std::string>;

  FeatureSpace() = default;

  int dim() const { return dim_; }
  const std::vector<Bigram>& bigrams() const { return bigrams_; }
  const std::vector<int>& counts() const { return counts_; }

  std::optional<int> index_of(const Bigram& b) const {
    auto it = index_.find(b);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::vector<int>& sentence_features(int sentence) const {
    return sentence_features_.at(static_cast<std::size_t>(sentence));
  }
  int sentence_count() const { return static_cast<int>(sentence_features_.size()); }

 private:
  friend FeatureSpace build_feature_space(const DocumentCluster&, int);

  int dim_ = 0;
  std::vector<Bigram> bigrams_;
  std::vector<int> counts_;
  std::map<Bigram, int> index_;
  std::vector<std::vector<int>> sentence_features_;
};

inline FeatureSpace build_feature_space(const DocumentCluster& cluster, int dim = 200) {
  require(dim >= 1, ErrorCode::invalid_argument, "feature dim must be >= 1");
  std::map<std::pair<int, int>, int> freq;
  for (const auto& s : cluster.sentences) {
    for (std::size_t i = 1; i < s.tokens.size(); ++i) ++freq[{s.tokens[i - 1], s.tokens[i]}];
  }
  require(!freq.empty(), ErrorCode::corpus_format, "cluster " + cluster.id + " has no bigrams");

  struct Entry {
    FeatureSpace::Bigram words;
    std::pair<int, int> ids;
    int count;
  };
  std::vector<Entry> entries;
  entries.reserve(freq.size());
  for (const auto& [ids, count] : freq) {
    entries.push_back({{cluster.vocab.word(ids.first), cluster.vocab.word(ids.second)}, ids, count});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.words < b.words;
  });
  if (entries.size() > static_cast<std::size_t>(dim)) entries.resize(static_cast<std::size_t>(dim));

  FeatureSpace space;
  space.dim_ = dim;
  std::map<std::pair<int, int>, int> by_ids;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    space.bigrams_.push_back(entries[i].words);
    space.counts_.push_back(entries[i].count);
    space.index_.emplace(entries[i].words, static_cast<int>(i));
    by_ids.emplace(entries[i].ids, static_cast<int>(i));
  }
  space.sentence_features_.reserve(cluster.sentences.size());
  for (const auto& s : cluster.sentences) {
    std::vector<int> feats;
    for (std::size_t i = 1; i < s.tokens.size(); ++i) {
      auto it = by_ids.find({s.tokens[i - 1], s.tokens[i]});
      if (it != by_ids.end()) feats.push_back(it->second);
    }
    space.sentence_features_.push_back(std::move(feats));
  }
  return space;
}

/// phi(y, x): L2-normalized term-frequency vector over the indexed bigrams.
/// The zero vector is returned unnormalized.
template <typename Ids>
Vector featurize(const Ids& sentence_ids, const DocumentCluster& cluster,
                 const FeatureSpace& space) {
  Vector v = Vector::Zero(space.dim());
  for (int id : sentence_ids) {
    require(id >= 0 && id < cluster.size() && id < space.sentence_count(),
            ErrorCode::invalid_argument, "sentence index out of range: " + std::to_string(id));
    for (int f : space.sentence_features(id)) v[f] += 1.0;
  }
  const double n = v.norm();
  if (n > 0.0) v /= n;
  return v;
}

inline Vector featurize(std::initializer_list<int> ids, const DocumentCluster& cluster,
                        const FeatureSpace& space) {
  return featurize(std::vector<int>(ids), cluster, space);
}

struct Summary {
  int id = 0;
  std::vector<int> sentence_ids;
  int token_count = 0;
  Vector features;
};

inline Summary make_summary(std::vector<int> sentence_ids, const DocumentCluster& cluster,
                            const FeatureSpace& space, int id = 0) {
  Summary s;
  s.id = id;
  s.features = featurize(sentence_ids, cluster, space);
  for (int sid : sentence_ids) s.token_count += cluster.token_count(sid);
  s.sentence_ids = std::move(sentence_ids);
  return s;
}

inline std::vector<int> summary_tokens(const std::vector<int>& sentence_ids,
                                       const DocumentCluster& cluster) {
  std::vector<int> out;
  for (int sid : sentence_ids) {
    const auto& t = cluster.sentences.at(static_cast<std::size_t>(sid)).tokens;
    out.insert(out.end(), t.begin(), t.end());
  }
  return out;
}

inline std::string summary_text(const std::vector<int>& sentence_ids,
                                const DocumentCluster& cluster) {
  std::string out;
  for (int sid : sentence_ids) {
    if (!out.empty()) out += '\n';
    out += cluster.sentences.at(static_cast<std::size_t>(sid)).text;
  }
  return out;
}

}  // namespace april
