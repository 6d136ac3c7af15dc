#pragma once

// End-to-end orchestration behind the command-line tool: run configuration,
// pipeline stages and the plot-ready output files of each stage.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tienet/core.hpp"
#include "tienet/dynamics.hpp"
#include "tienet/graph.hpp"
#include "tienet/ingest.hpp"
#include "tienet/io.hpp"
#include "tienet/nullmodels.hpp"
#include "tienet/pairs.hpp"
#include "tienet/snapshots.hpp"
#include "tienet/synth.hpp"

namespace tienet {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunConfig {
  std::string input;
  std::string out = "out";
  LogFormat format = LogFormat::jsonl;
  std::int64_t bin_width = 600;
  std::int64_t epoch = kDefaultEpoch;
  std::optional<std::int64_t> tau_max;
  std::vector<std::uint64_t> thresholds{kUndersampledThreshold, kOversampledThreshold};
  int n_weeks = kDefaultWeeks;
  std::size_t pairs_sample = kDefaultGeodesicPairs;
  std::uint64_t seed = 1;
  ScoreMode mode = ScoreMode::absolute;
  std::size_t null_samples = kDefaultNullSamples;
  std::string preset = "paper-like";
  std::size_t max_participants = 16;
  bool per_week_static = false;
  // Scheduling only; outputs do not depend on it and it is not hashed.
  unsigned threads = 1;

  std::int64_t horizon_bins() const {
    return (static_cast<std::int64_t>(n_weeks) * kSecondsPerWeek + bin_width - 1) / bin_width;
  }

  InferenceConfig inference() const {
    InferenceConfig ic;
    ic.bin_width = bin_width;
    ic.tau_max = tau_max;
    ic.thresholds = thresholds;
    ic.mode = mode;
    return ic;
  }

  void validate() const {
    if (bin_width <= 0) throw ConfigError("--bin-width must be positive");
    if (n_weeks < 1) throw ConfigError("--weeks must be >= 1");
    if (thresholds.empty()) throw ConfigError("at least one --threshold is required");
    for (auto t : thresholds)
      if (t == 0) throw ConfigError("--threshold values must be positive");
    if (pairs_sample == 0) throw ConfigError("--pairs-sample must be positive");
    if (null_samples == 0) throw ConfigError("--null-samples must be >= 1");
    if (max_participants == 0) throw ConfigError("max-participants must be >= 1");
    if (mode == ScoreMode::circadian && bin_width != kTimeOfDayBinWidth)
      throw ConfigError("circadian mode requires --bin-width 600");
    if (tau_max && (*tau_max < 1 || (mode == ScoreMode::absolute && *tau_max > horizon_bins() - 1)))
      throw ConfigError("--tau-max must lie in [1, T-1]");
    if (threads == 0) throw ConfigError("--threads must be >= 1");
  }

  // Effective configuration as echoed into manifests.
  json to_json() const {
    json j;
    j["input"] = input;
    j["out"] = out;
    j["format"] = format == LogFormat::jsonl ? "jsonl" : "csv";
    j["bin_width"] = bin_width;
    j["epoch"] = epoch;
    j["tau_max"] = tau_max ? json(*tau_max) : json(nullptr);
    j["thresholds"] = thresholds;
    j["weeks"] = n_weeks;
    j["pairs_sample"] = pairs_sample;
    j["seed"] = seed;
    j["mode"] = mode == ScoreMode::absolute ? "absolute" : "circadian";
    j["null_samples"] = null_samples;
    j["preset"] = preset;
    j["max_participants"] = max_participants;
    j["per_week_static"] = per_week_static;
    return j;
  }

  std::string hash() const { return hex64(fnv1a64(to_json().dump())); }
};

namespace detail {

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty())
    throw ConfigError("invalid value '" + value + "' for " + key);
  return out;
}

inline std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace detail

// Applies key/value settings in order. The first `threshold` in a batch
// replaces the current list; later ones append. Comma lists are accepted.
inline void apply_settings(RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& settings) {
  using detail::parse_number;
  bool thresholds_reset = false;
  for (const auto& [raw_key, value] : settings) {
    std::string key = raw_key;
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "input") cfg.input = value;
    else if (key == "out") cfg.out = value;
    else if (key == "format") {
      if (value == "jsonl") cfg.format = LogFormat::jsonl;
      else if (value == "csv") cfg.format = LogFormat::csv;
      else throw ConfigError("format must be jsonl or csv");
    } else if (key == "bin-width") cfg.bin_width = parse_number<std::int64_t>(key, value);
    else if (key == "epoch") cfg.epoch = parse_number<std::int64_t>(key, value);
    else if (key == "tau-max") {
      if (value == "full" || value.empty()) cfg.tau_max.reset();
      else cfg.tau_max = parse_number<std::int64_t>(key, value);
    } else if (key == "threshold") {
      if (!thresholds_reset) {
        cfg.thresholds.clear();
        thresholds_reset = true;
      }
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = detail::trim(item);
        if (item == "undersampled") cfg.thresholds.push_back(kUndersampledThreshold);
        else if (item == "oversampled") cfg.thresholds.push_back(kOversampledThreshold);
        else cfg.thresholds.push_back(parse_number<std::uint64_t>(key, item));
      }
    } else if (key == "weeks") cfg.n_weeks = parse_number<int>(key, value);
    else if (key == "pairs-sample") cfg.pairs_sample = parse_number<std::size_t>(key, value);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "mode") {
      if (value == "absolute") cfg.mode = ScoreMode::absolute;
      else if (value == "circadian") cfg.mode = ScoreMode::circadian;
      else throw ConfigError("mode must be absolute or circadian");
    } else if (key == "null-samples") cfg.null_samples = parse_number<std::size_t>(key, value);
    else if (key == "preset") cfg.preset = value;
    else if (key == "max-participants") cfg.max_participants = parse_number<std::size_t>(key, value);
    else if (key == "per-week-static") {
      if (value == "true" || value == "1") cfg.per_week_static = true;
      else if (value == "false" || value == "0") cfg.per_week_static = false;
      else throw ConfigError("per-week-static must be true or false");
    } else if (key == "threads") cfg.threads = parse_number<unsigned>(key, value);
    else throw ConfigError("unknown config key '" + raw_key + "'");
  }
  std::sort(cfg.thresholds.begin(), cfg.thresholds.end());
  cfg.thresholds.erase(std::unique(cfg.thresholds.begin(), cfg.thresholds.end()), cfg.thresholds.end());
}

// `key = value` lines; '#' starts a comment.
inline std::vector<std::pair<std::string, std::string>> parse_config_text(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    out.emplace_back(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return out;
}

inline std::vector<std::pair<std::string, std::string>> load_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse_config_text(in);
}

// ---------------------------------------------------------------- stages

struct IngestStage {
  ParseReport parse;
  PlayerIndex index;
  CooccurrenceTable table;
};

inline IngestConfig ingest_config(const RunConfig& cfg) {
  IngestConfig ic;
  ic.format = cfg.format;
  ic.max_participants = cfg.max_participants;
  ic.window_start = cfg.epoch;
  ic.window_end = cfg.epoch + static_cast<std::int64_t>(cfg.n_weeks) * kSecondsPerWeek;
  return ic;
}

inline IngestStage ingest_parsed(ParseReport parse, const RunConfig& cfg) {
  IngestStage stage;
  stage.parse = std::move(parse);
  stage.index = index_players(stage.parse.events);
  stage.table = build_cooccurrences(stage.parse.events, stage.index, {cfg.epoch, cfg.bin_width});
  return stage;
}

inline IngestStage ingest_stream(std::istream& in, const RunConfig& cfg) {
  return ingest_parsed(parse_event_log(in, ingest_config(cfg)), cfg);
}

inline IngestStage ingest_file(const RunConfig& cfg) {
  if (cfg.input.empty()) throw ConfigError("--input is required");
  if (!fs::exists(cfg.input)) throw ConfigError("input file not found: " + cfg.input);
  std::ifstream in(cfg.input, std::ios::binary);
  if (!in) throw ConfigError("cannot open input " + cfg.input);
  return ingest_stream(in, cfg);
}

// In-memory events pass the same validation as parsed lines.
inline IngestStage ingest_events(std::span<const InteractionEvent> events, const RunConfig& cfg) {
  std::ostringstream log;
  write_event_log(log, events);
  std::istringstream in(log.str());
  return ingest_stream(in, cfg);
}

struct InferStage {
  std::size_t series_count = 0;
  std::vector<TieScore> scores;                                          // by pair
  std::vector<std::pair<std::uint64_t, std::vector<TieScore>>> edges;    // per threshold
};

inline InferStage infer_stage(const IngestStage& ingest, const RunConfig& cfg) {
  InferStage stage;
  auto series = aggregate_series(ingest.table.records, cfg.horizon_bins());
  stage.series_count = series.size();
  stage.scores = score_pairs(series, cfg.inference(), cfg.epoch, cfg.threads);
  for (auto t : cfg.thresholds) stage.edges.emplace_back(t, classify_ties(stage.scores, t));
  return stage;
}

struct ThresholdRun {
  std::uint64_t threshold = 0;
  SnapshotSet snapshots;
};

inline std::vector<ThresholdRun> snapshot_stage(const IngestStage& ingest, const InferStage& infer,
                                                const RunConfig& cfg) {
  std::vector<ThresholdRun> runs;
  for (const auto& [t, edges] : infer.edges)
    runs.push_back({t, build_snapshots(ingest.table.records, edges, cfg.bin_width, cfg.n_weeks)});
  return runs;
}

struct DynamicsStage {
  std::vector<WeeklyMetricRow> weekly;
  std::vector<double> cumulative;
  std::vector<double> survival;
  std::optional<DensificationFit> linear;
  std::optional<FitResult> loglog;
  std::optional<EngagementResult> engagement;
  std::vector<std::string> errors;  // fits that could not be computed, with reasons
};

inline DynamicsStage dynamics_stage(const ThresholdRun& run, const RunConfig& cfg) {
  DynamicsStage d;
  const auto& weeks = run.snapshots.weeks;
  d.weekly = weekly_metrics(weeks, cfg.pairs_sample, derive_seed(cfg.seed, 0xd1, run.threshold), cfg.threads);
  auto presence = presence_of(weeks);
  d.cumulative = cumulative_appearance(presence);
  d.survival = survival_after(presence);
  auto points = vertex_edge_counts(weeks);
  try {
    d.linear = densification_fit(points);
  } catch (const DataError& e) {
    d.errors.push_back(std::string("densification: ") + e.what());
  }
  try {
    std::vector<VertexEdgeCount> positive;
    for (const auto& p : points)
      if (p.vertices > 0 && p.edges > 0) positive.push_back(p);
    d.loglog = loglog_exponent(positive);
  } catch (const DataError& e) {
    d.errors.push_back(std::string("loglog: ") + e.what());
  }
  try {
    d.engagement = clustering_vs_engagement(weeks, &run.snapshots.cumulative);
  } catch (const DataError& e) {
    d.errors.push_back(std::string("engagement: ") + e.what());
  }
  return d;
}

struct NullItem {
  std::uint64_t threshold = 0;
  std::string week;  // week number or "cumulative"
  NullComparisonReport report;
};

inline std::vector<NullItem> null_stage(const std::vector<ThresholdRun>& runs, const RunConfig& cfg) {
  struct Job {
    std::uint64_t threshold;
    std::string week;
    const Graph* graph;
    std::uint64_t stream;
  };
  std::vector<Job> jobs;
  for (const auto& run : runs) {
    for (const auto& s : run.snapshots.weeks)
      if (!s.graph.empty())
        jobs.push_back({run.threshold, std::to_string(s.week), &s.graph, static_cast<std::uint64_t>(s.week)});
    if (!run.snapshots.cumulative.empty())
      jobs.push_back({run.threshold, "cumulative", &run.snapshots.cumulative, 0xffffULL});
  }
  std::vector<NullItem> items(jobs.size());
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
    const auto& job = jobs[i];
    items[i] = {job.threshold, job.week,
                null_comparison(*job.graph, cfg.null_samples, cfg.pairs_sample,
                                derive_seed(cfg.seed, job.threshold, job.stream))};
  });
  return items;
}

// ---------------------------------------------------------------- outputs

inline json fit_to_json(const FitResult& f) {
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"slope", num(f.slope)},         {"intercept", num(f.intercept)}, {"r2", num(f.r2)},
          {"p_value", num(f.p_value)},     {"slope_stderr", num(f.slope_stderr)},
          {"n_points", f.n_points},        {"degenerate", f.degenerate}};
}

// Output directory bound to one config hash. Opening a directory whose
// manifest names a different hash is refused.
class OutputDir {
 public:
  explicit OutputDir(const RunConfig& cfg) : root_(cfg.out), hash_(cfg.hash()), config_(cfg.to_json()) {
    if (cfg.out.empty()) throw ConfigError("--out is required");
    fs::create_directories(root_);
    auto manifest_path = root_ / "manifest.json";
    if (fs::exists(manifest_path)) {
      std::ifstream in(manifest_path);
      json existing;
      try {
        existing = json::parse(in);
      } catch (const json::parse_error&) {
        throw ConfigError("unreadable manifest in " + root_.string());
      }
      if (existing.value("config_hash", std::string()) != hash_)
        throw ConfigError("output directory " + root_.string() + " holds results of a different config (hash " +
                          existing.value("config_hash", std::string("?")) + ")");
      if (existing.contains("commands")) commands_ = existing["commands"];
    }
  }

  const std::string& hash() const { return hash_; }
  fs::path path(const std::string& name) const { return root_ / name; }

  CsvWriter csv(const std::string& name, std::initializer_list<std::string_view> header) {
    files_.push_back(name);
    return CsvWriter(root_ / name, hash_, header);
  }

  void json_file(const std::string& name, json body) {
    files_.push_back(name);
    body["config_hash"] = hash_;
    write_text_file(root_ / name, body.dump(2) + "\n");
  }

  void finish(const std::string& command, json details) {
    std::sort(files_.begin(), files_.end());
    files_.erase(std::unique(files_.begin(), files_.end()), files_.end());
    details["files"] = files_;
    commands_[command] = std::move(details);
    json manifest{{"config", config_}, {"config_hash", hash_}, {"commands", commands_}};
    write_text_file(root_ / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  fs::path root_;
  std::string hash_;
  json config_;
  json commands_ = json::object();
  std::vector<std::string> files_;
};

inline std::string threshold_tag(std::uint64_t t) { return "t" + std::to_string(t); }

inline json write_ingest_outputs(OutputDir& dir, const IngestStage& ingest) {
  const auto& parse = ingest.parse;
  auto hist = players_per_timebin(parse.events);
  auto timebin = dir.csv("players_per_timebin.csv", {"bin", "unique_players"});
  for (std::size_t b = 0; b < hist.size(); ++b) timebin.row(b, hist[b]);
  timebin.close();
  auto rejections = dir.csv("rejections.csv", {"line_no", "reason"});
  for (const auto& r : parse.rejections) rejections.row(r.line_no, r.reason);
  rejections.close();
  json stats{{"lines_read", parse.lines_read},
             {"blank_lines", parse.blank_lines},
             {"events", parse.events.size()},
             {"rejected_lines", parse.rejections.size()},
             {"duplicate_player_warnings", parse.duplicate_player_warnings},
             {"distinct_players", ingest.index.size()},
             {"raw_pair_cooccurrences", ingest.table.raw_pairs},
             {"binned_cooccurrences", ingest.table.records.size()}};
  dir.json_file("ingest_stats.json", stats);
  return stats;
}

inline json write_infer_outputs(OutputDir& dir, const IngestStage& ingest, const InferStage& infer) {
  const auto& names = ingest.index;
  auto scores = dir.csv("scores.csv", {"lo", "hi", "score"});
  for (const auto& s : infer.scores) scores.row(names.name(s.pair.lo), names.name(s.pair.hi), s.score);
  scores.close();
  auto dist = dir.csv("score_ccdf.csv", {"score", "ccdf"});
  for (const auto& r : score_distribution(infer.scores)) dist.row(r.value, r.ccdf);
  dist.close();
  json per_threshold = json::object();
  for (const auto& [t, edges] : infer.edges) {
    auto csv = dir.csv("edges_" + threshold_tag(t) + ".csv", {"lo", "hi", "score"});
    for (const auto& e : edges) csv.row(names.name(e.pair.lo), names.name(e.pair.hi), e.score);
    csv.close();
    per_threshold[std::to_string(t)] = edges.size();
  }
  return {{"scored_pairs", infer.series_count}, {"edges", per_threshold}};
}

inline json write_snapshot_outputs(OutputDir& dir, const IngestStage& ingest,
                                   const std::vector<ThresholdRun>& runs, const RunConfig& cfg) {
  json out = json::object();
  for (const auto& run : runs) {
    const std::string sub = "snapshots_" + threshold_tag(run.threshold);
    for (const auto& s : run.snapshots.weeks) {
      char name[32];
      std::snprintf(name, sizeof name, "/week_%03d.csv", s.week);
      auto csv = dir.csv(sub + name, {"week", "lo", "hi"});
      for (const auto& p : s.graph.label_pairs())
        csv.row(s.week, ingest.index.name(p.lo), ingest.index.name(p.hi));
      csv.close();
    }
    dir.json_file(sub + "/manifest.json", {{"epoch", cfg.epoch},
                                           {"bin_width", cfg.bin_width},
                                           {"threshold", run.threshold},
                                           {"n_weeks", cfg.n_weeks},
                                           {"excluded_cooccurrences", run.snapshots.excluded_cooccurrences}});
    out[std::to_string(run.threshold)] = {{"cumulative_vertices", run.snapshots.cumulative.vertex_count()},
                                          {"cumulative_edges", run.snapshots.cumulative.edge_count()}};
  }
  return out;
}

inline json write_metrics_outputs(OutputDir& dir, const std::vector<ThresholdRun>& runs, const RunConfig& cfg) {
  auto ccdf = dir.csv("ccdf.csv", {"threshold", "graph", "k", "ccdf"});
  auto hist = dir.csv("clustering_hist.csv", {"threshold", "graph", "bin", "lower", "upper", "count"});
  auto comps = dir.csv("component_sizes.csv", {"threshold", "graph", "size", "count"});
  json stats = json::object();
  for (const auto& run : runs) {
    std::vector<std::pair<std::string, const Graph*>> graphs{{"cumulative", &run.snapshots.cumulative}};
    if (cfg.per_week_static)
      for (const auto& s : run.snapshots.weeks) graphs.emplace_back("week_" + std::to_string(s.week), &s.graph);
    for (const auto& [label, g] : graphs) {
      if (g->empty()) {
        if (label == "cumulative") throw DataError("cumulative friendship graph is empty at threshold " + std::to_string(run.threshold));
        continue;
      }
      auto c = degree_ccdf(*g);
      for (std::size_t k = 0; k < c.size(); ++k) ccdf.row(run.threshold, label, k, c[k]);
      auto h = clustering_histogram(*g);
      for (std::size_t b = 0; b < h.counts.size(); ++b)
        hist.row(run.threshold, label, b, static_cast<double>(b) / 10.0, static_cast<double>(b + 1) / 10.0, h.counts[b]);
      hist.row(run.threshold, label, "low_degree", "", "", h.low_degree);
      auto summary = connected_components(*g);
      for (const auto& [size, count] : summary.size_distribution()) comps.row(run.threshold, label, size, count);
      if (label == "cumulative")
        stats[std::to_string(run.threshold)] = {{"vertices", g->vertex_count()},
                                                {"edges", g->edge_count()},
                                                {"components", summary.count()},
                                                {"giant_component", summary.giant_size()},
                                                {"mean_degree", mean_degree(*g)},
                                                {"mean_clustering", mean_clustering(*g)}};
    }
  }
  ccdf.close();
  hist.close();
  comps.close();
  return stats;
}

inline json write_dynamics_outputs(OutputDir& dir, const std::vector<ThresholdRun>& runs, const RunConfig& cfg) {
  auto weekly = dir.csv("weekly_metrics.csv", {"threshold", "week", "vertices", "edges", "mean_degree",
                                               "mean_clustering", "giant_size", "mean_geodesic",
                                               "geodesic_stderr", "geodesic_exact"});
  auto turnover = dir.csv("turnover.csv", {"threshold", "week", "cumulative_fraction", "survival_fraction"});
  auto dens = dir.csv("densification.csv", {"threshold", "week", "vertices", "edges"});
  auto eng = dir.csv("engagement.csv", {"threshold", "c", "mean_clustering", "cohort_size", "mean_cumulative_clustering"});
  json dens_fit = json::object(), eng_fit = json::object(), stats = json::object();
  for (const auto& run : runs) {
    auto d = dynamics_stage(run, cfg);
    const auto key = std::to_string(run.threshold);
    for (const auto& r : d.weekly) {
      std::optional<double> geo, se;
      std::string exact;
      if (r.geodesic) {
        geo = r.geodesic->mean;
        se = r.geodesic->standard_error;
        exact = r.geodesic->exact ? "1" : "0";
      }
      weekly.row(run.threshold, r.week, r.vertices, r.edges, r.mean_degree, r.mean_clustering, r.giant_size, geo, se, exact);
      dens.row(run.threshold, r.week, r.vertices, r.edges);
    }
    for (std::size_t w = 0; w < d.cumulative.size(); ++w)
      turnover.row(run.threshold, w, d.cumulative[w], d.survival[w]);
    json df{{"linear", d.linear ? fit_to_json(d.linear->fit) : json(nullptr)},
            {"excluded_empty_weeks", d.linear ? json(d.linear->excluded_empty) : json(nullptr)},
            {"loglog", d.loglog ? fit_to_json(*d.loglog) : json(nullptr)}};
    dens_fit[key] = df;
    if (d.engagement) {
      for (const auto& row : d.engagement->rows)
        eng.row(run.threshold, row.c, row.mean_clustering, row.cohort_size, row.mean_cumulative_clustering);
      eng_fit[key] = fit_to_json(d.engagement->fit);
    } else {
      eng_fit[key] = nullptr;
    }
    stats[key] = {{"errors", d.errors}};
  }
  weekly.close();
  turnover.close();
  dens.close();
  eng.close();
  dir.json_file("densification_fit.json", {{"fits", dens_fit}});
  dir.json_file("engagement_fit.json", {{"fits", eng_fit}});
  return stats;
}

inline json write_null_outputs(OutputDir& dir, const std::vector<ThresholdRun>& runs, const RunConfig& cfg) {
  auto items = null_stage(runs, cfg);
  auto csv = dir.csv("null_comparison.csv", {"threshold", "graph", "sample_id", "gc_size", "mean_geodesic",
                                             "mean_clustering", "erased_stub_fraction"});
  json summary = json::array();
  for (const auto& item : items) {
    const auto& r = item.report;
    csv.row(item.threshold, item.week, "observed", r.observed.gc_size, r.observed.mean_geodesic,
            r.observed.mean_clustering, r.observed.erased_stub_fraction);
    for (std::size_t s = 0; s < r.samples.size(); ++s) {
      const auto& m = r.samples[s];
      csv.row(item.threshold, item.week, std::to_string(s), m.gc_size, m.mean_geodesic, m.mean_clustering,
              m.erased_stub_fraction);
    }
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    summary.push_back({{"threshold", item.threshold},
                       {"graph", item.week},
                       {"samples", r.samples.size()},
                       {"observed", {{"gc_size", r.observed.gc_size},
                                     {"mean_geodesic", opt(r.observed.mean_geodesic)},
                                     {"mean_clustering", r.observed.mean_clustering}}},
                       {"null_mean", {{"gc_size", r.mean_gc_size},
                                      {"mean_geodesic", opt(r.mean_geodesic)},
                                      {"mean_clustering", r.mean_clustering}}}});
  }
  csv.close();
  dir.json_file("null_summary.json", {{"comparisons", summary}});
  return {{"comparisons", items.size()}};
}

// ---------------------------------------------------------------- commands

inline void warn_if_empty(const IngestStage& ingest) {
  if (ingest.parse.events.empty()) std::cerr << "warning: no valid events in input\n";
  if (!ingest.parse.rejections.empty())
    std::cerr << "warning: " << ingest.parse.rejections.size() << " malformed line(s) rejected\n";
}

inline void cmd_ingest_stats(const RunConfig& cfg) {
  cfg.validate();
  OutputDir dir(cfg);
  auto ingest = ingest_file(cfg);
  warn_if_empty(ingest);
  dir.finish("ingest-stats", {{"ingest", write_ingest_outputs(dir, ingest)}});
}

inline void cmd_infer(const RunConfig& cfg) {
  cfg.validate();
  OutputDir dir(cfg);
  auto ingest = ingest_file(cfg);
  warn_if_empty(ingest);
  auto infer = infer_stage(ingest, cfg);
  dir.finish("infer", {{"infer", write_infer_outputs(dir, ingest, infer)}});
}

inline void cmd_snapshot(const RunConfig& cfg) {
  cfg.validate();
  OutputDir dir(cfg);
  auto ingest = ingest_file(cfg);
  warn_if_empty(ingest);
  auto infer = infer_stage(ingest, cfg);
  auto runs = snapshot_stage(ingest, infer, cfg);
  dir.finish("snapshot", {{"snapshot", write_snapshot_outputs(dir, ingest, runs, cfg)}});
}

inline void cmd_metrics(const RunConfig& cfg) {
  cfg.validate();
  OutputDir dir(cfg);
  auto ingest = ingest_file(cfg);
  warn_if_empty(ingest);
  auto infer = infer_stage(ingest, cfg);
  auto runs = snapshot_stage(ingest, infer, cfg);
  dir.finish("metrics", {{"metrics", write_metrics_outputs(dir, runs, cfg)}});
}

inline void cmd_dynamics(const RunConfig& cfg) {
  cfg.validate();
  OutputDir dir(cfg);
  auto ingest = ingest_file(cfg);
  warn_if_empty(ingest);
  auto infer = infer_stage(ingest, cfg);
  auto runs = snapshot_stage(ingest, infer, cfg);
  dir.finish("dynamics", {{"dynamics", write_dynamics_outputs(dir, runs, cfg)}});
}

inline void cmd_nullmodel(const RunConfig& cfg) {
  cfg.validate();
  OutputDir dir(cfg);
  auto ingest = ingest_file(cfg);
  warn_if_empty(ingest);
  auto infer = infer_stage(ingest, cfg);
  auto runs = snapshot_stage(ingest, infer, cfg);
  dir.finish("nullmodel", {{"nullmodel", write_null_outputs(dir, runs, cfg)}});
}

// Writes log.jsonl, truth.csv and presence.csv for a named preset.
inline void cmd_synth(const RunConfig& cfg, SynthConfig synth) {
  cfg.validate();
  synth.n_weeks = cfg.n_weeks;
  synth.epoch = cfg.epoch;
  synth.bin_width = cfg.bin_width;
  synth.validate();
  OutputDir dir(cfg);
  auto generated = generate(synth, cfg.seed);
  std::ostringstream log;
  write_event_log(log, generated.events);
  write_text_file(dir.path("log.jsonl"), log.str());
  auto truth = dir.csv("truth.csv", {"lo", "hi"});
  for (const auto& [a, b] : generated.truth.friend_pairs) truth.row(a, b);
  truth.close();
  auto presence = dir.csv("presence.csv", {"player", "week"});
  for (const auto& [p, w] : generated.truth.presence) presence.row(p, w);
  presence.close();
  dir.finish("synth", {{"preset", cfg.preset},
                       {"scenario", scenario_name(synth.scenario)},
                       {"players", synth.n_players},
                       {"events", generated.events.size()},
                       {"friend_pairs", generated.truth.friend_pairs.size()},
                       {"log", "log.jsonl"}});
}

// Full pipeline. A failing stage still leaves a manifest naming the stages
// that completed and the one that failed.
inline void cmd_report(const RunConfig& cfg) {
  cfg.validate();
  OutputDir dir(cfg);
  json details{{"status", "running"}, {"completed_stages", json::array()}};
  auto stage = [&](const char* name, auto&& body) {
    try {
      details[name] = body();
      details["completed_stages"].push_back(name);
    } catch (const std::exception& e) {
      details["status"] = "failed";
      details["failed_stage"] = name;
      details["error"] = e.what();
      dir.finish("report", details);
      throw;
    }
  };
  std::optional<IngestStage> ingest;
  std::optional<InferStage> infer;
  std::vector<ThresholdRun> runs;
  stage("ingest", [&] {
    ingest = ingest_file(cfg);
    warn_if_empty(*ingest);
    return write_ingest_outputs(dir, *ingest);
  });
  stage("infer", [&] {
    infer = infer_stage(*ingest, cfg);
    return write_infer_outputs(dir, *ingest, *infer);
  });
  stage("snapshot", [&] {
    runs = snapshot_stage(*ingest, *infer, cfg);
    return write_snapshot_outputs(dir, *ingest, runs, cfg);
  });
  stage("metrics", [&] { return write_metrics_outputs(dir, runs, cfg); });
  stage("dynamics", [&] { return write_dynamics_outputs(dir, runs, cfg); });
  stage("nullmodel", [&] { return write_null_outputs(dir, runs, cfg); });
  details["status"] = "complete";
  dir.finish("report", details);
}

}  // namespace tienet
