#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

#include "tienet/pipeline.hpp"

using namespace tienet;
namespace fs = std::filesystem;

namespace {

using Rows = std::vector<std::vector<std::string>>;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Data rows of an output CSV; the hash comment and header are checked and dropped.
Rows read_csv(const fs::path& p, const std::string& hash) {
  std::istringstream in(slurp(p));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# config_hash=" + hash) << p;
  std::getline(in, line);  // header
  Rows rows;
  while (std::getline(in, line)) rows.push_back(detail::split_csv_record(line));
  return rows;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = slurp(e.path());
  return files;
}

class Scratch {
 public:
  Scratch() : root_(fs::temp_directory_path() / ("tienet_pipeline_" + std::to_string(getpid()) + "_" + std::to_string(counter_++))) {
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  ~Scratch() { fs::remove_all(root_); }
  fs::path operator/(const std::string& name) const { return root_ / name; }

 private:
  static inline int counter_ = 0;
  fs::path root_;
};

int run_cli(const std::string& args, const fs::path& stderr_path) {
  std::string cmd = std::string(TIENET_CLI) + " " + args + " > /dev/null 2> '" + stderr_path.string() + "'";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Three weeks: a, b, c play three consecutive bins together in week 0; a and
// b play two more bins in week 1; c meets stranger d once in week 2.
std::string toy_log() {
  const std::int64_t e = kDefaultEpoch;
  const std::int64_t week = kSecondsPerWeek;
  std::ostringstream out;
  auto line = [&](const std::string& id, std::int64_t ts, const std::string& players) {
    out << "{\"game_id\":\"" << id << "\",\"ts\":" << ts << ",\"players\":[" << players << "]}\n";
  };
  line("g1", e + 10, R"("a","b","c")");
  line("g2", e + 610, R"("a","b","c")");
  line("g3", e + 1210, R"("a","b","c")");
  line("g4", e + week + 5, R"("a","b")");
  line("g5", e + week + 605, R"("a","b")");
  line("g6", e + 2 * week + 3000, R"("c","d")");
  return out.str();
}

RunConfig toy_config(const fs::path& input, const fs::path& out) {
  RunConfig cfg;
  apply_settings(cfg, {{"input", input.string()},
                       {"out", out.string()},
                       {"weeks", "3"},
                       {"threshold", "3"},
                       {"threshold", "10"},
                       {"pairs-sample", "10"},
                       {"null-samples", "2"}});
  return cfg;
}

double num(const std::string& s) { return std::stod(s); }

}  // namespace

TEST(Config, ParseTextAndApply) {
  std::istringstream text("# comment\nbin_width = 300\n\nthreshold = 50, oversampled  # trailing\ntau-max=full\n");
  auto settings = parse_config_text(text);
  ASSERT_EQ(settings.size(), 3u);
  RunConfig cfg;
  apply_settings(cfg, settings);
  EXPECT_EQ(cfg.bin_width, 300);
  EXPECT_EQ(cfg.thresholds, (std::vector<std::uint64_t>{50, kOversampledThreshold}));
  EXPECT_FALSE(cfg.tau_max.has_value());

  std::istringstream bad("just words\n");
  EXPECT_THROW(parse_config_text(bad), ConfigError);
  EXPECT_THROW(apply_settings(cfg, {{"colour", "red"}}), ConfigError);
  EXPECT_THROW(apply_settings(cfg, {{"weeks", "many"}}), ConfigError);
  EXPECT_THROW(apply_settings(cfg, {{"mode", "lunar"}}), ConfigError);
}

TEST(Config, FlagsOverrideFileAndThresholdsReset) {
  RunConfig cfg;
  apply_settings(cfg, {{"seed", "5"}, {"threshold", "100"}, {"threshold", "200"}});
  EXPECT_EQ(cfg.thresholds, (std::vector<std::uint64_t>{100, 200}));
  // a second batch (flags) replaces the file's thresholds and wins on scalars
  apply_settings(cfg, {{"seed", "9"}, {"threshold", "undersampled"}});
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.thresholds, (std::vector<std::uint64_t>{kUndersampledThreshold}));
}

TEST(Config, ValidationAndDefaults) {
  RunConfig cfg;
  EXPECT_EQ(cfg.bin_width, 600);
  EXPECT_EQ(cfg.n_weeks, 44);
  EXPECT_EQ(cfg.pairs_sample, 1000u);
  EXPECT_EQ(cfg.thresholds, (std::vector<std::uint64_t>{197, 1900}));
  EXPECT_EQ(cfg.horizon_bins(), 44 * 1008);
  EXPECT_NO_THROW(cfg.validate());
  auto bad = cfg;
  bad.tau_max = cfg.horizon_bins();
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = cfg;
  bad.mode = ScoreMode::circadian;
  bad.bin_width = 300;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = cfg;
  bad.null_samples = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Config, HashIgnoresThreadsOnly) {
  RunConfig a, b;
  b.threads = 8;
  EXPECT_EQ(a.hash(), b.hash());
  b.seed = 2;
  EXPECT_NE(a.hash(), b.hash());
}

TEST(OutputDirTest, RejectsDifferentConfig) {
  Scratch s;
  RunConfig cfg;
  cfg.out = (s / "out").string();
  {
    OutputDir dir(cfg);
    dir.finish("x", json::object());
  }
  EXPECT_NO_THROW(OutputDir{cfg});
  cfg.seed = 99;
  EXPECT_THROW(OutputDir{cfg}, ConfigError);
}

TEST(Cli, ExitCodes) {
  Scratch s;
  const auto err = s / "stderr.txt";
  EXPECT_EQ(run_cli("ingest-stats --input '" + (s / "missing.jsonl").string() + "' --out '" + (s / "o1").string() + "'", err), 1);
  EXPECT_NE(slurp(err).find("error"), std::string::npos);

  std::ofstream(s / "empty.jsonl").close();
  EXPECT_EQ(run_cli("ingest-stats --input '" + (s / "empty.jsonl").string() + "' --out '" + (s / "o2").string() + "'", err), 0);
  EXPECT_NE(slurp(err).find("warning"), std::string::npos);
  EXPECT_TRUE(fs::exists(s / "o2" / "ingest_stats.json"));

  EXPECT_EQ(run_cli("report --bogus-flag", err), 1);
  EXPECT_EQ(run_cli("ingest-stats --input x --bin-width 0 --out '" + (s / "o3").string() + "'", err), 1);

  // empty log through report: no friendship graph, a data error
  EXPECT_EQ(run_cli("report --input '" + (s / "empty.jsonl").string() + "' --out '" + (s / "o4").string() + "'", err), 2);
  auto manifest = json::parse(slurp(s / "o4" / "manifest.json"));
  EXPECT_EQ(manifest["commands"]["report"]["status"], "failed");
  EXPECT_EQ(manifest["commands"]["report"]["failed_stage"], "metrics");
}

TEST(Cli, ConfigFileAndFlags) {
  Scratch s;
  { std::ofstream(s / "log.jsonl") << toy_log(); }
  {
    std::ofstream cfg(s / "run.cfg");
    cfg << "weeks = 3\nthreshold = 3\nseed = 4\n";
  }
  const auto err = s / "stderr.txt";
  ASSERT_EQ(run_cli("infer --config '" + (s / "run.cfg").string() + "' --input '" + (s / "log.jsonl").string() +
                    "' --threshold 10 --out '" + (s / "o").string() + "'", err),
            0)
      << slurp(err);
  auto manifest = json::parse(slurp(s / "o" / "manifest.json"));
  EXPECT_EQ(manifest["config"]["thresholds"], json({10}));
  EXPECT_EQ(manifest["config"]["seed"], 4);
  EXPECT_TRUE(fs::exists(s / "o" / "edges_t10.csv"));
  EXPECT_FALSE(fs::exists(s / "o" / "edges_t3.csv"));
}

TEST(Report, ToyLogMatchesHandValues) {
  Scratch s;
  { std::ofstream(s / "log.jsonl") << toy_log(); }
  auto cfg = toy_config(s / "log.jsonl", s / "out");
  cmd_report(cfg);
  const fs::path out = s / "out";
  const auto hash = cfg.hash();

  auto manifest = json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(manifest["config_hash"], hash);
  EXPECT_EQ(manifest["config"], cfg.to_json());
  const auto& report = manifest["commands"]["report"];
  EXPECT_EQ(report["status"], "complete");
  EXPECT_EQ(report["completed_stages"].size(), 6u);
  for (const char* f : {"ccdf.csv", "clustering_hist.csv", "component_sizes.csv", "weekly_metrics.csv", "turnover.csv",
                        "densification.csv", "densification_fit.json", "engagement.csv", "engagement_fit.json",
                        "null_comparison.csv", "null_summary.json", "scores.csv", "players_per_timebin.csv"})
    EXPECT_TRUE(fs::exists(out / f)) << f;

  EXPECT_EQ(read_csv(out / "scores.csv", hash), (Rows{{"a", "b", "10"}, {"a", "c", "3"}, {"b", "c", "3"}}));
  EXPECT_EQ(read_csv(out / "edges_t10.csv", hash), (Rows{{"a", "b", "10"}}));
  EXPECT_EQ(read_csv(out / "edges_t3.csv", hash).size(), 3u);

  EXPECT_EQ(read_csv(out / "snapshots_t3/week_000.csv", hash).size(), 3u);
  EXPECT_EQ(read_csv(out / "snapshots_t3/week_001.csv", hash), (Rows{{"1", "a", "b"}}));
  EXPECT_TRUE(read_csv(out / "snapshots_t3/week_002.csv", hash).empty());

  // weekly metrics at threshold 3
  std::vector<std::vector<std::string>> weekly;
  for (auto& r : read_csv(out / "weekly_metrics.csv", hash))
    if (r[0] == "3") weekly.push_back(r);
  ASSERT_EQ(weekly.size(), 3u);
  EXPECT_EQ(weekly[0][2], "3");
  EXPECT_EQ(weekly[0][3], "3");
  EXPECT_DOUBLE_EQ(num(weekly[0][4]), 2.0);
  EXPECT_DOUBLE_EQ(num(weekly[0][5]), 1.0);
  EXPECT_EQ(weekly[0][6], "3");
  EXPECT_DOUBLE_EQ(num(weekly[0][7]), 1.0);
  EXPECT_EQ(weekly[0][9], "1");
  EXPECT_DOUBLE_EQ(num(weekly[1][4]), 1.0);
  EXPECT_DOUBLE_EQ(num(weekly[1][5]), 0.0);
  EXPECT_EQ(weekly[2][2], "0");
  EXPECT_EQ(weekly[2][4], "");
  EXPECT_EQ(weekly[2][7], "");

  Rows turnover;
  for (auto& r : read_csv(out / "turnover.csv", hash))
    if (r[0] == "3") turnover.push_back(r);
  ASSERT_EQ(turnover.size(), 3u);
  const double cum[] = {1.0, 1.0, 1.0}, surv[] = {1.0, 2.0 / 3.0, 0.0};
  for (int w = 0; w < 3; ++w) {
    EXPECT_NEAR(num(turnover[w][2]), cum[w], 1e-9);
    EXPECT_NEAR(num(turnover[w][3]), surv[w], 1e-9);
  }

  // engagement: c and d aside, a and b last two weeks at mean C 0.5; c one week at C 1
  Rows eng;
  for (auto& r : read_csv(out / "engagement.csv", hash))
    if (r[0] == "3") eng.push_back(r);
  ASSERT_EQ(eng.size(), 2u);
  EXPECT_EQ(eng[0][1], "1");
  EXPECT_DOUBLE_EQ(num(eng[0][2]), 1.0);
  EXPECT_EQ(eng[0][3], "1");
  EXPECT_EQ(eng[1][1], "2");
  EXPECT_DOUBLE_EQ(num(eng[1][2]), 0.5);
  EXPECT_EQ(eng[1][3], "2");
  EXPECT_DOUBLE_EQ(num(eng[1][4]), 1.0);

  // two non-empty weeks cannot support the linear densification fit
  auto dens = json::parse(slurp(out / "densification_fit.json"));
  EXPECT_TRUE(dens["fits"]["3"]["linear"].is_null());
  EXPECT_EQ(dens["config_hash"], hash);

  Rows ccdf;
  for (auto& r : read_csv(out / "ccdf.csv", hash))
    if (r[0] == "3") ccdf.push_back(r);
  ASSERT_EQ(ccdf.size(), 4u);
  EXPECT_DOUBLE_EQ(num(ccdf[2][3]), 1.0);
  EXPECT_DOUBLE_EQ(num(ccdf[3][3]), 0.0);
  EXPECT_EQ(read_csv(out / "component_sizes.csv", hash), (Rows{{"3", "cumulative", "3", "1"}, {"10", "cumulative", "2", "1"}}));

  // every CSV names the config hash
  for (const auto& [name, body] : read_tree(out)) {
    if (name.size() > 4 && name.substr(name.size() - 4) == ".csv") {
      EXPECT_EQ(body.rfind("# config_hash=" + hash + "\n", 0), 0u) << name;
    }
  }
}

TEST(Report, DeterministicAcrossRunsAndThreads) {
  Scratch s;
  RunConfig synth_cfg;
  synth_cfg.out = (s / "data").string();
  synth_cfg.n_weeks = 6;
  synth_cfg.seed = 3;
  auto synth = synth_preset("paper-like");
  synth.n_players = 400;
  cmd_synth(synth_cfg, synth);
  ASSERT_TRUE(fs::exists(s / "data" / "log.jsonl"));
  ASSERT_TRUE(fs::exists(s / "data" / "truth.csv"));

  std::vector<std::map<std::string, std::string>> trees;
  for (unsigned threads : {1u, 1u, 3u}) {
    RunConfig cfg;
    apply_settings(cfg, {{"input", (s / "data" / "log.jsonl").string()},
                         {"out", (s / "run").string()},
                         {"weeks", "6"},
                         {"threshold", "50"},
                         {"pairs-sample", "200"},
                         {"null-samples", "3"},
                         {"per-week-static", "true"}});
    cfg.threads = threads;
    fs::remove_all(s / "run");
    cmd_report(cfg);
    trees.push_back(read_tree(s / "run"));
  }
  EXPECT_GT(trees[0].size(), 10u);
  EXPECT_TRUE(trees[0] == trees[1]);
  EXPECT_TRUE(trees[0] == trees[2]);
}

TEST(Report, IngestStreamRejectsMissingInput) {
  RunConfig cfg;
  EXPECT_THROW(ingest_file(cfg), ConfigError);
  cfg.input = "/nonexistent/path/log.jsonl";
  EXPECT_THROW(ingest_file(cfg), ConfigError);
}
