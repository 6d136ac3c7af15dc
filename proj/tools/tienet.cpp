// tienet: command-line driver for the friendship-network pipeline.

#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "tienet/pipeline.hpp"

namespace {

using Settings = std::vector<std::pair<std::string, std::string>>;

struct Flags {
  std::string config;
  std::optional<std::string> input, out, format, mode, preset, tau_max;
  std::optional<std::int64_t> bin_width, epoch;
  std::optional<int> weeks;
  std::optional<std::size_t> pairs_sample, null_samples;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::vector<std::string> thresholds;
  bool per_week_static = false;
};

void add_common(CLI::App& cmd, Flags& f) {
  cmd.add_option("--config", f.config, "key = value config file; flags override it");
  cmd.add_option("--input", f.input, "interaction log");
  cmd.add_option("--out", f.out, "output directory");
  cmd.add_option("--format", f.format, "jsonl or csv");
  cmd.add_option("--bin-width", f.bin_width, "bin width in seconds");
  cmd.add_option("--epoch", f.epoch, "unix time of bin 0");
  cmd.add_option("--tau-max", f.tau_max, "largest lag in bins, or 'full'");
  cmd.add_option("--threshold", f.thresholds, "score threshold (repeatable)");
  cmd.add_option("--weeks", f.weeks, "number of weekly snapshots");
  cmd.add_option("--pairs-sample", f.pairs_sample, "sampled pairs for mean geodesic");
  cmd.add_option("--seed", f.seed, "random seed");
  cmd.add_option("--mode", f.mode, "absolute or circadian");
  cmd.add_option("--null-samples", f.null_samples, "configuration-model ensemble size");
  cmd.add_option("--preset", f.preset, "synth scenario preset");
  cmd.add_option("--threads", f.threads, "worker threads");
  cmd.add_flag("--per-week-static", f.per_week_static, "also write static metrics for each week");
}

tienet::RunConfig resolve(const Flags& f) {
  tienet::RunConfig cfg;
  if (!f.config.empty()) tienet::apply_settings(cfg, tienet::load_config_file(f.config));
  Settings s;
  auto put = [&](const char* key, const auto& opt) {
    if (opt) {
      if constexpr (std::is_same_v<std::decay_t<decltype(*opt)>, std::string>) s.emplace_back(key, *opt);
      else s.emplace_back(key, std::to_string(*opt));
    }
  };
  put("input", f.input);
  put("out", f.out);
  put("format", f.format);
  put("bin-width", f.bin_width);
  put("epoch", f.epoch);
  put("tau-max", f.tau_max);
  put("weeks", f.weeks);
  put("pairs-sample", f.pairs_sample);
  put("seed", f.seed);
  put("mode", f.mode);
  put("null-samples", f.null_samples);
  put("preset", f.preset);
  put("threads", f.threads);
  for (const auto& t : f.thresholds) s.emplace_back("threshold", t);
  if (f.per_week_static) s.emplace_back("per-week-static", "true");
  tienet::apply_settings(cfg, s);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent friendship inference and weekly network analysis for game logs"};
  app.require_subcommand(1);
  Flags flags;
  std::string chosen;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"ingest-stats", "players per time-of-day bin and parse report"},
      {"infer", "tie scores and edge lists per threshold"},
      {"snapshot", "weekly friendship snapshots"},
      {"metrics", "static metrics of the cumulative network"},
      {"dynamics", "weekly metrics, turnover, densification, engagement"},
      {"nullmodel", "configuration-model comparison"},
      {"synth", "write a synthetic log with ground truth"},
      {"report", "full pipeline"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_common(*sub, flags);
    sub->callback([&chosen, n = name] { chosen = n; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    auto cfg = resolve(flags);
    if (chosen == "ingest-stats") tienet::cmd_ingest_stats(cfg);
    else if (chosen == "infer") tienet::cmd_infer(cfg);
    else if (chosen == "snapshot") tienet::cmd_snapshot(cfg);
    else if (chosen == "metrics") tienet::cmd_metrics(cfg);
    else if (chosen == "dynamics") tienet::cmd_dynamics(cfg);
    else if (chosen == "nullmodel") tienet::cmd_nullmodel(cfg);
    else if (chosen == "synth") tienet::cmd_synth(cfg, tienet::synth_preset(cfg.preset));
    else tienet::cmd_report(cfg);
  } catch (const tienet::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const tienet::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const tienet::InvariantError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
