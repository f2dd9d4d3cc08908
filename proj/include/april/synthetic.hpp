#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "april/common.hpp"
#include "april/corpus.hpp"

namespace april {

/// Knobs for the generated test clusters. Sentences express "facts" (short
/// word sequences); references restate the key facts with paraphrase noise.
/// Filler facts are repeated across documents so the centroid prior only
/// partly agrees with the references.
struct SyntheticOptions {
  int sentences = 20;
  int documents = 3;
  int references = 2;
  int key_facts = 6;
  int novel_facts = 8;  // per reference, absent from the documents
  int vocabulary = 400;
  double sentence_noise = 0.35;  // per content word, swapped for a random word
  double reference_noise = 0.4;
  double key_repeat = 0.15;  // share of extra sentences that restate a key fact
  int length_limit = 60;
};

namespace detail {

inline std::string synthetic_word(int i) {
  static const char* onset[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"};
  static const char* nucleus[] = {"a", "e", "i", "o", "u"};
  std::string w;
  int x = i;
  do {
    w += onset[x % 14];
    x /= 14;
    w += nucleus[x % 5];
    x /= 5;
  } while (x > 0);
  return w + (i % 2 ? "n" : "r");
}

}  // namespace detail

inline DocumentCluster synthetic_cluster(const std::string& id, const SyntheticOptions& opt,
                                         std::uint64_t seed) {
  require(opt.sentences >= 1 && opt.documents >= 1 && opt.key_facts >= 1 && opt.vocabulary >= 10,
          ErrorCode::invalid_argument, "bad synthetic cluster options");
  std::mt19937_64 rng(seed);
  static const char* glue[] = {"the", "of", "and", "in", "a", "to", "was", "for", "on", "with"};
  std::vector<std::string> vocab;
  for (int i = 0; i < opt.vocabulary; ++i) vocab.push_back(detail::synthetic_word(i));

  // Zipf-ish content word draw.
  std::vector<double> zipf;
  for (int i = 0; i < opt.vocabulary; ++i) zipf.push_back(1.0 / (1.0 + i));
  std::discrete_distribution<int> content(zipf.begin(), zipf.end());
  std::uniform_int_distribution<int> glue_pick(0, 9);
  std::uniform_int_distribution<int> fact_len(4, 7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  using Fact = std::vector<std::string>;
  auto make_fact = [&] {
    Fact f;
    const int n = fact_len(rng);
    for (int i = 0; i < n; ++i) {
      f.push_back(vocab[static_cast<std::size_t>(content(rng))]);
      if (i + 1 < n) f.push_back(glue[glue_pick(rng)]);
    }
    return f;
  };
  auto render = [&](const Fact& f, double noise) {
    std::string out;
    for (std::size_t i = 0; i < f.size(); ++i) {
      std::string w = f[i];
      if (i % 2 == 0 && unit(rng) < noise) w = vocab[static_cast<std::size_t>(content(rng))];
      if (!out.empty()) out += ' ';
      out += w;
    }
    return out;
  };

  const int n_key = std::min(opt.key_facts, opt.sentences);
  const int n_filler = std::max(1, (opt.sentences - n_key) / 2);
  std::vector<Fact> keys, fillers;
  for (int i = 0; i < n_key; ++i) keys.push_back(make_fact());
  for (int i = 0; i < n_filler; ++i) fillers.push_back(make_fact());

  // Each key fact appears once; the rest are filler restatements or
  // occasional key repeats.
  std::vector<std::string> lines;
  for (const auto& k : keys) lines.push_back(render(k, opt.sentence_noise));
  std::uniform_int_distribution<int> key_pick(0, n_key - 1);
  std::uniform_int_distribution<int> filler_pick(0, n_filler - 1);
  while (static_cast<int>(lines.size()) < opt.sentences) {
    if (unit(rng) < opt.key_repeat)
      lines.push_back(render(keys[static_cast<std::size_t>(key_pick(rng))], opt.sentence_noise * 2));
    else
      lines.push_back(render(fillers[static_cast<std::size_t>(filler_pick(rng))], opt.sentence_noise));
  }
  std::shuffle(lines.begin(), lines.end(), rng);

  std::vector<RawDocument> docs(static_cast<std::size_t>(opt.documents));
  for (int d = 0; d < opt.documents; ++d) docs[static_cast<std::size_t>(d)].name = "d" + std::to_string(d) + ".txt";
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto& doc = docs[i % docs.size()];
    doc.text += lines[i] + ".\n";
  }
  std::vector<RawDocument> nonempty;
  for (auto& d : docs) {
    if (!d.text.empty()) nonempty.push_back(std::move(d));
  }

  std::vector<std::string> refs;
  for (int r = 0; r < opt.references; ++r) {
    auto order = keys;
    for (int k = 0; k < opt.novel_facts; ++k) order.push_back(make_fact());
    std::shuffle(order.begin(), order.end(), rng);
    std::string ref;
    for (const auto& k : order) ref += render(k, opt.reference_noise) + ". ";
    refs.push_back(ref);
  }
  return make_cluster(id, nonempty, refs, opt.length_limit, true);
}

}  // namespace april
