#include <gtest/gtest.h>

#include "april/harness.hpp"
#include "fixtures.hpp"

using namespace april;

namespace {

ExperimentConfig tiny(std::uint64_t seed) {
  ExperimentConfig c;
  c.synthetic_clusters = 3;
  c.min_sentences = 10;
  c.max_sentences = 14;
  c.db_size = 80;
  c.feature_dim = 60;
  c.rounds = {0, 5};
  c.repetitions = 2;
  c.episodes = 60;
  c.hidden = 8;
  c.seed = seed;
  return c;
}

int count_fields(const std::string& line) {
  std::stringstream ss(line);
  std::string w;
  int n = 0;
  while (ss >> w) ++n;
  return n;
}

std::string without_hash(std::string report) {
  const auto at = report.find("config_hash\t");
  return report.erase(at, report.find('\n', at) - at);
}

}  // namespace

TEST(Config, ParseSetAndHash) {
  const auto c = parse_config("# comment\nrounds = 10, 50\nbeta = 0.25\nsystems = sppi,april-ntd\n");
  EXPECT_EQ(c.rounds, (std::vector<int>{10, 50}));
  EXPECT_EQ(c.beta, 0.25);
  EXPECT_EQ(c.system_list(), (std::vector<std::string>{"sppi", "april-ntd"}));
  auto d = c;
  EXPECT_EQ(c.hash(), d.hash());
  d.set("m", "1.5");
  EXPECT_NE(c.hash(), d.hash());
  EXPECT_THROW(d.set("no_such_key", "1"), Error);
  EXPECT_THROW(d.set("db_size", "lots"), Error);
  EXPECT_EQ(parse_config(c.canonical()).hash(), c.hash());
}

TEST(Config, ValidationRejectsBadValues) {
  ExperimentConfig c;
  c.beta = 2;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.w_div = 0.9;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.oracle = "psychic";
  EXPECT_THROW(c.validate(), Error);
}

TEST(Report, DelimitedRoundTripIsLossless) {
  RunReport r;
  r.experiment = "x";
  r.config_hash = "abc";
  r.metrics = {"a", "b"};
  r.cells = {{"s1", 10, "c1", 0, {0.1, 1.0 / 3.0}}, {"s1", 10, "c2", 0, {0.2, 2.0 / 3.0}}};
  aggregate(r);
  r.tests.push_back({10, "s1", "s2", "a", 1.5, 3.25, 0.04});
  const auto tsv = emit_report(r, ReportFormat::delimited);
  const auto back = parse_report(tsv);
  EXPECT_EQ(emit_report(back, ReportFormat::delimited), tsv);
  EXPECT_EQ(back.cells[1].values[1], 2.0 / 3.0);
  EXPECT_EQ(back.aggregates[0].count, 2);
}

TEST(Report, EmptyReportIsError) {
  RunReport r;
  EXPECT_THROW(emit_report(r, ReportFormat::text_table), Error);
  EXPECT_THROW(aggregate(r), Error);
}

TEST(Report, TextTableHasOneColumnPerMetricPlusLabel) {
  RunReport r;
  r.metrics = {"r1", "r2", "u_star"};
  r.cells = {{"sppi", 10, "c", 0, {0.1, 0.2, 3}}, {"april-td", 10, "c", 0, {0.3, 0.1, 4}}};
  aggregate(r);
  const auto table = emit_report(r, ReportFormat::text_table);
  std::stringstream ss(table);
  std::string line;
  std::getline(ss, line);  // title
  std::getline(ss, line);
  EXPECT_EQ(count_fields(line), 4);
  while (std::getline(ss, line)) {
    if (line.empty()) break;
    // label is "system N=.." (two words) plus one value per metric
    EXPECT_EQ(count_fields(line), 2 + 3) << line;
  }
}

TEST(Aggregate, MeanOverClustersOfRepetitionMeans) {
  RunReport r;
  r.metrics = {"v"};
  r.cells = {{"s", 1, "a", 0, {1}}, {"s", 1, "a", 1, {3}}, {"s", 1, "b", 0, {6}}};
  aggregate(r);
  ASSERT_EQ(r.aggregates.size(), 1u);
  EXPECT_DOUBLE_EQ(r.aggregates[0].means[0], 4.0);
  EXPECT_DOUBLE_EQ(r.aggregates[0].std_errors[0], 2.0);
}

TEST(Stats, WelchMatchesReferenceValues) {
  const auto t = welch_t_test(std::vector<double>{1, 2, 3, 4}, std::vector<double>{2, 4, 6, 8, 10});
  EXPECT_NEAR(t.t, -2.2514363231593695, 1e-12);
  EXPECT_NEAR(t.df, 5.520787746170677, 1e-9);
  EXPECT_NEAR(t.p, 0.06913359319239236, 1e-9);
}

TEST(Stage1, LowerBoundIsSpearmanOfPriorAndGold) {
  auto cfg = tiny(3);
  cfg.rounds = {3};
  cfg.repetitions = 1;
  const auto r = run_stage1(cfg);
  const auto data = prepare_corpus(cfg);
  const auto lb = r.cluster_means("lower-bound", 0, "spearman");
  ASSERT_EQ(lb.size(), data.size());
  for (std::size_t i = 0; i < data.size(); ++i) EXPECT_NEAR(lb[i], spearman(data[i].h, data[i].gold), 1e-15);
}

TEST(Stage1, ZeroRoundsReproducesPriorRanking) {
  auto cfg = tiny(4);
  cfg.rounds = {0};
  cfg.repetitions = 1;
  const auto r = run_stage1(cfg);
  EXPECT_NEAR(r.aggregate("al", 0)->means[0], r.aggregate("lower-bound", 0)->means[0], 1e-12);
}

TEST(Determinism, Stage1AndFullReportsAreByteIdentical) {
  const auto cfg = tiny(5);
  EXPECT_EQ(emit_report(run_stage1(cfg), ReportFormat::delimited),
            emit_report(run_stage1(cfg), ReportFormat::delimited));
  auto par = cfg;
  par.workers = 3;
  // The worker count is a config field, so only the hash line may differ.
  EXPECT_EQ(without_hash(emit_report(run_full(cfg), ReportFormat::delimited)),
            without_hash(emit_report(run_full(par), ReportFormat::delimited)));
  auto other = cfg;
  other.seed = 6;
  EXPECT_NE(emit_report(run_stage1(cfg), ReportFormat::delimited),
            emit_report(run_stage1(other), ReportFormat::delimited));
}

TEST(Full, NoInteractionRowsShareOneSummary) {
  auto cfg = tiny(7);
  const auto r = run_full(cfg);
  // At N = 0 every interactive system returns the prior's best summary.
  const auto a = r.run_values("sppi", 0, "u_star");
  const auto b = r.run_values("april-td", 0, "u_star");
  const auto c = r.run_values("april-ntd", 0, "u_star");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  EXPECT_EQ(r.tests.size(), 4u);
}

TEST(Full, UnknownSystemRejected) {
  auto cfg = tiny(8);
  cfg.systems = "sppi,april-magic";
  EXPECT_THROW(run_full(cfg), Error);
}

TEST(Corpus, ClustersWithoutReferencesCannotBeSimulated) {
  fixtures::TempDir tmp("harness");
  fixtures::write(tmp.path() / "c" / "docs" / "a.txt", "One two three four. Five six seven eight. Nine ten eleven.");
  ExperimentConfig cfg;
  cfg.corpus = tmp.path().string();
  cfg.db_size = 5;
  try {
    prepare_corpus(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::gold_unavailable);
  }
}

TEST(Corpus, DbCacheRoundTrip) {
  fixtures::TempDir tmp("harness");
  auto cfg = tiny(9);
  auto clusters = load_corpus(cfg);
  const auto a = prepare_one(cfg, clusters[0], tmp.path());
  EXPECT_TRUE(std::filesystem::exists(tmp.path() / (clusters[0].id + ".db")));
  const auto b = prepare_one(cfg, clusters[0], tmp.path());
  EXPECT_EQ(db_checksum(a.db), db_checksum(b.db));
  EXPECT_EQ(a.gold, b.gold);
}

TEST(Budget, AlAndRandomExposeNPlusOneGibbsExposesTwoN) {
  auto cfg = tiny(10);
  const auto data = prepare_corpus(cfg);
  for (const char* strategy : {"al", "random", "div", "gibbs"}) {
    PerfectOracle o;
    const auto res = simulate_stage1(data[0], interaction_options(cfg, strategy), 7, o, 1);
    if (std::string(strategy) == "gibbs") {
      EXPECT_EQ(res.state.exposures, 14) << strategy;
    } else {
      EXPECT_EQ(res.state.shown.size(), 8u) << strategy;
      EXPECT_EQ(res.state.exposures, 8) << strategy;
    }
  }
}

TEST(Strategy, JnIsNotImplemented) {
  auto cfg = tiny(11);
  const auto data = prepare_corpus(cfg);
  try {
    InteractionSession s(data[0], interaction_options(cfg, "jn"), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_implemented);
  }
}
