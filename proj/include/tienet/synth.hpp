#pragma once

// Synthetic interaction logs with planted friend groups.
//
// Friend groups play contiguous sessions of `session_length` bins every
// `session_period` bins (group-specific phase), each scheduled session taking
// place with the group's adherence probability while the group is present.
// Matchmaking injects lobbies of strangers drawn uniformly from the players
// present that week. Presence follows a join/leave process: units that have
// not joined yet join with `join_probability` per week, present units leave
// for good with `leave_probability` per week.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <boost/math/distributions/poisson.hpp>
#include <json.hpp>

#include "tienet/core.hpp"
#include "tienet/graph.hpp"
#include "tienet/ingest.hpp"
#include "tienet/pairs.hpp"

namespace tienet {

enum class Scenario { equilibrium, densifying, graded_adherence };

inline std::string_view scenario_name(Scenario s) {
  switch (s) {
    case Scenario::equilibrium: return "equilibrium";
    case Scenario::densifying: return "densifying";
    case Scenario::graded_adherence: return "graded-adherence";
  }
  return "?";
}

struct GroupSizeWeight {
  int size = 2;
  double probability = 1.0;
};

// Monday 2010-09-13 00:00 UTC, the start of ISO week 37 of 2010.
inline constexpr std::int64_t kDefaultEpoch = 1284336000;

struct SynthConfig {
  std::size_t n_players = 5000;
  std::vector<GroupSizeWeight> group_sizes{{2, 0.40}, {3, 0.22}, {4, 0.15}, {5, 0.09},
                                           {6, 0.06}, {7, 0.04}, {8, 0.04}};
  std::int64_t session_period = 144;  // bins
  std::int64_t session_length = 6;    // bins
  double adherence = 0.7;
  // Expected non-friend co-occurrences per present player per week.
  double matchmaking_rate = 10.0;
  std::size_t lobby_size = 8;
  int n_weeks = 44;
  double join_probability = 0.02;
  double leave_probability = 0.02;
  double initial_active_fraction = 0.6;
  Scenario scenario = Scenario::equilibrium;
  std::int64_t epoch = kDefaultEpoch;
  std::int64_t bin_width = 600;
  // densifying: player j befriends about coefficient * sqrt(j) earlier players
  double densify_coefficient = 0.3;
  // graded-adherence: adherence rises linearly with group size over this range
  double adherence_min = 0.1;
  double adherence_max = 0.9;
  // Members attend each scheduled session independently instead of the
  // whole group attending together.
  bool per_member_attendance = false;

  void validate() const {
    auto prob = [](double p, const char* what) {
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(what) + " must lie in [0, 1]");
    };
    prob(adherence, "adherence");
    prob(join_probability, "join_probability");
    prob(leave_probability, "leave_probability");
    prob(initial_active_fraction, "initial_active_fraction");
    prob(adherence_min, "adherence_min");
    prob(adherence_max, "adherence_max");
    if (n_weeks < 1) throw ConfigError("n_weeks must be >= 1");
    if (n_players < 2) throw ConfigError("n_players must be >= 2");
    if (session_length < 1 || session_length >= session_period)
      throw ConfigError("session length must satisfy 1 <= L < P");
    if (bin_width <= 0 || kSecondsPerWeek % bin_width != 0)
      throw ConfigError("bin width must divide a week");
    if (matchmaking_rate < 0) throw ConfigError("matchmaking rate must be non-negative");
    if (lobby_size < 2) throw ConfigError("lobby size must be >= 2");
    if (densify_coefficient < 0) throw ConfigError("densify coefficient must be non-negative");
    if (scenario != Scenario::densifying) {
      if (group_sizes.empty()) throw ConfigError("group size distribution is empty");
      double total = 0;
      for (const auto& g : group_sizes) {
        if (g.size < 2) throw ConfigError("group sizes must be >= 2");
        if (static_cast<std::size_t>(g.size) > n_players)
          throw ConfigError("group size exceeds n_players");
        if (g.probability < 0) throw ConfigError("group size weights must be non-negative");
        total += g.probability;
      }
      if (total <= 0) throw ConfigError("group size weights sum to zero");
    }
  }
};

struct GroundTruth {
  std::vector<std::pair<std::string, std::string>> friend_pairs;  // sorted, lo < hi
  std::vector<std::pair<std::string, int>> presence;              // (player, week), sorted

  // True friend pairs whose players both appear in `index`.
  std::vector<PairKey> friend_keys(const PlayerIndex& index) const {
    std::vector<PairKey> keys;
    for (const auto& [a, b] : friend_pairs) {
      auto x = index.find(a), y = index.find(b);
      if (x && y) keys.push_back(PairKey::make(*x, *y));
    }
    std::sort(keys.begin(), keys.end());
    return keys;
  }
};

struct SynthOutput {
  std::vector<InteractionEvent> events;  // sorted by (timestamp, game_id)
  GroundTruth truth;
};

namespace detail {

inline std::string player_name(std::size_t i, std::size_t n) {
  const auto width = std::to_string(n == 0 ? 0 : n - 1).size();
  auto digits = std::to_string(i);
  return "p" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

struct GroupPlan {
  std::vector<std::uint32_t> members;  // sorted player numbers
  double adherence = 0.0;
};

inline std::vector<GroupPlan> partition_groups(const SynthConfig& cfg, std::mt19937_64& rng) {
  std::vector<double> weights;
  for (const auto& g : cfg.group_sizes) weights.push_back(g.probability);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  int smin = cfg.group_sizes.front().size, smax = smin;
  for (const auto& g : cfg.group_sizes) {
    smin = std::min(smin, g.size);
    smax = std::max(smax, g.size);
  }
  std::vector<GroupPlan> groups;
  std::size_t next = 0;
  while (cfg.n_players - next >= 2) {
    auto size = static_cast<std::size_t>(cfg.group_sizes[pick(rng)].size);
    size = std::min(size, cfg.n_players - next);
    GroupPlan g;
    for (std::size_t i = 0; i < size; ++i) g.members.push_back(static_cast<std::uint32_t>(next + i));
    next += size;
    if (cfg.scenario == Scenario::graded_adherence) {
      double frac = smax == smin ? 1.0
                                 : static_cast<double>(static_cast<int>(size) - smin) / (smax - smin);
      g.adherence = cfg.adherence_min + (cfg.adherence_max - cfg.adherence_min) * std::clamp(frac, 0.0, 1.0);
    } else {
      g.adherence = cfg.adherence;
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

// Friend pairs from sqrt-attachment: player j links to ~coefficient*sqrt(j)
// distinct earlier players, so a prefix of V players holds ~V^1.5 pairs.
inline std::vector<GroupPlan> attachment_pairs(const SynthConfig& cfg, std::mt19937_64& rng) {
  std::vector<GroupPlan> groups;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::uint32_t> targets;
  for (std::uint32_t j = 1; j < cfg.n_players; ++j) {
    auto d = static_cast<std::size_t>(std::floor(cfg.densify_coefficient * std::sqrt(static_cast<double>(j)) + unit(rng)));
    d = std::min<std::size_t>(d, j);
    targets.clear();
    std::uniform_int_distribution<std::uint32_t> earlier(0, j - 1);
    while (targets.size() < d) {
      auto t = earlier(rng);
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    std::sort(targets.begin(), targets.end());
    for (auto t : targets) groups.push_back({{t, j}, cfg.adherence});
  }
  return groups;
}

// Presence interval [join, leave) in weeks.
struct Interval {
  int join = -1;
  int leave = -1;
};

// Disjoint presence intervals in ascending order; empty means never present.
using Schedule = std::vector<Interval>;

inline bool present(const Schedule& s, int w) {
  for (const auto& iv : s)
    if (w >= iv.join && w < iv.leave) return true;
  return false;
}

// Two-state weekly churn: an absent unit joins with the join probability,
// a present one leaves with the leave probability. Units that leave return
// to the pool and may join again.
inline std::vector<Schedule> churn_units(std::size_t units, const SynthConfig& cfg, std::mt19937_64& rng) {
  std::bernoulli_distribution initial(cfg.initial_active_fraction);
  std::bernoulli_distribution joins(cfg.join_probability);
  std::bernoulli_distribution leaves(cfg.leave_probability);
  std::vector<Schedule> out(units);
  for (auto& u : out) {
    bool in = initial(rng);
    int since = 0;
    for (int w = 1; w < cfg.n_weeks; ++w) {
      bool next = in ? !leaves(rng) : joins(rng);
      if (next != in) {
        if (in) u.push_back({since, w});
        since = w;
        in = next;
      }
    }
    if (in) u.push_back({since, cfg.n_weeks});
  }
  return out;
}

// Prefix joining: players join in index order, so earlier indices are older.
inline std::vector<Interval> churn_prefix(std::size_t players, const SynthConfig& cfg, std::mt19937_64& rng) {
  std::vector<Interval> out(players);
  std::bernoulli_distribution leaves(cfg.leave_probability);
  auto joined = static_cast<std::size_t>(std::llround(cfg.initial_active_fraction * static_cast<double>(players)));
  for (std::size_t i = 0; i < joined; ++i) out[i].join = 0;
  for (int w = 1; w < cfg.n_weeks && joined < players; ++w) {
    std::binomial_distribution<std::size_t> arrivals(players - joined, cfg.join_probability);
    std::size_t a = arrivals(rng);
    for (std::size_t i = 0; i < a; ++i) out[joined + i].join = w;
    joined += a;
  }
  for (auto& u : out) {
    if (u.join < 0) continue;
    u.leave = cfg.n_weeks;
    for (int v = u.join + 1; v < cfg.n_weeks; ++v)
      if (leaves(rng)) {
        u.leave = v;
        break;
      }
  }
  return out;
}

}  // namespace detail

// Planted log plus ground truth. Identical (config, seed) gives identical output.
inline SynthOutput generate(const SynthConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 structure_rng(derive_seed(seed, 1));
  auto groups = cfg.scenario == Scenario::densifying ? detail::attachment_pairs(cfg, structure_rng)
                                                     : detail::partition_groups(cfg, structure_rng);

  // Per-player presence. Partition scenarios churn whole groups; the
  // densifying scenario churns players joining in index order.
  std::mt19937_64 churn_rng(derive_seed(seed, 2));
  std::vector<detail::Schedule> player_presence(cfg.n_players);
  std::vector<detail::Schedule> group_presence(groups.size());
  if (cfg.scenario == Scenario::densifying) {
    auto intervals = detail::churn_prefix(cfg.n_players, cfg, churn_rng);
    for (std::size_t p = 0; p < cfg.n_players; ++p)
      if (intervals[p].join >= 0) player_presence[p] = {intervals[p]};
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const auto& a = intervals[groups[g].members[0]];
      const auto& b = intervals[groups[g].members[1]];
      if (a.join < 0 || b.join < 0) continue;
      detail::Interval both{std::max(a.join, b.join), std::min(a.leave, b.leave)};
      if (both.join < both.leave) group_presence[g] = {both};
    }
  } else {
    group_presence = detail::churn_units(groups.size(), cfg, churn_rng);
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (auto m : groups[g].members) player_presence[m] = group_presence[g];
  }

  std::vector<std::string> names(cfg.n_players);
  for (std::size_t i = 0; i < cfg.n_players; ++i) names[i] = detail::player_name(i, cfg.n_players);

  const std::int64_t bins_per_week = kSecondsPerWeek / cfg.bin_width;
  SynthOutput out;
  auto& events = out.events;

  // Friend sessions, one independent stream per group.
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& schedule = group_presence[g];
    if (schedule.empty()) continue;
    std::mt19937_64 rng(derive_seed(seed, 3, g));
    std::uniform_int_distribution<std::int64_t> phase_pick(0, cfg.session_period - 1);
    std::uniform_int_distribution<std::int64_t> offset(0, cfg.bin_width - 1);
    std::bernoulli_distribution attends(groups[g].adherence);
    std::vector<std::string> members;
    for (auto m : groups[g].members) members.push_back(names[m]);
    std::sort(members.begin(), members.end());
    std::vector<std::string> attendees;
    const std::int64_t phase = phase_pick(rng);
    for (const auto& presence : schedule) {
      const std::int64_t first = presence.join * bins_per_week;
      const std::int64_t end = static_cast<std::int64_t>(presence.leave) * bins_per_week;
      std::int64_t start = phase;
      if (start < first) start += ((first - start + cfg.session_period - 1) / cfg.session_period) * cfg.session_period;
      // sessions are cut at the end of the presence interval
      for (; start < end; start += cfg.session_period) {
        const std::vector<std::string>* players = &members;
        if (cfg.per_member_attendance) {
          attendees.clear();
          for (const auto& m : members)
            if (attends(rng)) attendees.push_back(m);
          if (attendees.size() < 2) continue;
          players = &attendees;
        } else if (!attends(rng)) {
          continue;
        }
        for (std::int64_t b = start; b < std::min(start + cfg.session_length, end); ++b) {
          events.push_back({"s" + std::to_string(g) + "-" + std::to_string(b),
                            cfg.epoch + b * cfg.bin_width + offset(rng), *players});
        }
      }
    }
  }

  // Matchmaking lobbies. The weekly game count is an inverse-CDF Poisson draw
  // from one uniform and each game has its own stream, so raising the rate
  // only appends games and never alters earlier ones.
  if (cfg.matchmaking_rate > 0) {
    namespace bm = boost::math;
    using RoundUp = bm::policies::policy<bm::policies::discrete_quantile<bm::policies::integer_round_up>>;
    for (int w = 0; w < cfg.n_weeks; ++w) {
      std::vector<std::uint32_t> active;
      for (std::uint32_t p = 0; p < cfg.n_players; ++p)
        if (detail::present(player_presence[p], w)) active.push_back(p);
      if (active.size() < 2) continue;
      const std::size_t m = std::min(cfg.lobby_size, active.size());
      const auto week_seed = derive_seed(seed, 4, static_cast<std::uint64_t>(w));
      const double mean_games = cfg.matchmaking_rate * static_cast<double>(active.size()) /
                                static_cast<double>(m * (m - 1));
      std::mt19937_64 count_rng(week_seed);
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(count_rng);
      const auto n_games = static_cast<std::size_t>(
          bm::quantile(bm::poisson_distribution<double, RoundUp>(mean_games), u));
      std::uniform_int_distribution<std::int64_t> bin_pick(w * bins_per_week, (w + 1) * bins_per_week - 1);
      std::uniform_int_distribution<std::int64_t> offset(0, cfg.bin_width - 1);
      std::uniform_int_distribution<std::size_t> who(0, active.size() - 1);
      for (std::size_t i = 0; i < n_games; ++i) {
        std::mt19937_64 rng(derive_seed(week_seed, 5, i));
        std::vector<std::uint32_t> lobby;
        while (lobby.size() < m) {
          auto p = active[who(rng)];
          if (std::find(lobby.begin(), lobby.end(), p) == lobby.end()) lobby.push_back(p);
        }
        std::vector<std::string> members;
        for (auto p : lobby) members.push_back(names[p]);
        std::sort(members.begin(), members.end());
        const std::int64_t b = bin_pick(rng);
        events.push_back({"m" + std::to_string(w) + "-" + std::to_string(i),
                          cfg.epoch + b * cfg.bin_width + offset(rng), std::move(members)});
      }
    }
  }

  std::sort(events.begin(), events.end(), [](const InteractionEvent& a, const InteractionEvent& b) {
    return std::tie(a.timestamp, a.game_id) < std::tie(b.timestamp, b.game_id);
  });

  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& mem = groups[g].members;
    for (std::size_t i = 0; i < mem.size(); ++i)
      for (std::size_t j = i + 1; j < mem.size(); ++j) {
        auto a = names[mem[i]], b = names[mem[j]];
        if (b < a) std::swap(a, b);
        out.truth.friend_pairs.emplace_back(std::move(a), std::move(b));
      }
  }
  auto& fp = out.truth.friend_pairs;
  std::sort(fp.begin(), fp.end());
  fp.erase(std::unique(fp.begin(), fp.end()), fp.end());
  for (std::size_t p = 0; p < cfg.n_players; ++p) {
    for (const auto& iv : player_presence[p])
      for (int w = iv.join; w < iv.leave; ++w) out.truth.presence.emplace_back(names[p], w);
  }
  std::sort(out.truth.presence.begin(), out.truth.presence.end());
  return out;
}

// Named scenario presets addressable from the CLI.
inline SynthConfig synth_preset(std::string_view name) {
  SynthConfig cfg;
  if (name == "paper-like") {
    return cfg;
  }
  if (name == "equilibrium") {
    // Large pool with fast turnover: about 2000 groups present per week,
    // starting at three times that so the first weeks relax towards it.
    cfg.scenario = Scenario::equilibrium;
    cfg.n_players = 250000;
    cfg.join_probability = 0.01;
    cfg.leave_probability = 0.35;
    cfg.initial_active_fraction = 0.083;
    return cfg;
  }
  if (name == "densifying") {
    cfg.scenario = Scenario::densifying;
    cfg.n_players = 800;
    cfg.initial_active_fraction = 0.05;
    cfg.join_probability = 0.08;
    cfg.leave_probability = 0.0;
    cfg.session_period = 288;
    cfg.session_length = 3;
    cfg.adherence = 1.0;
    cfg.matchmaking_rate = 1.0;
    return cfg;
  }
  if (name == "graded-adherence") {
    cfg.scenario = Scenario::graded_adherence;
    cfg.initial_active_fraction = 1.0;
    cfg.leave_probability = 0.0;
    cfg.session_period = 72;
    cfg.session_length = 3;
    cfg.adherence_min = 0.05;
    cfg.adherence_max = 0.6;
    cfg.per_member_attendance = true;
    return cfg;
  }
  throw ConfigError("unknown synth preset '" + std::string(name) + "'");
}

inline std::vector<std::string> synth_preset_names() {
  return {"paper-like", "equilibrium", "densifying", "graded-adherence"};
}

// JSONL in the ingest format, one event per line.
inline void write_event_log(std::ostream& out, std::span<const InteractionEvent> events) {
  for (const auto& e : events) {
    out << "{\"game_id\":" << nlohmann::json(e.game_id).dump() << ",\"ts\":" << e.timestamp
        << ",\"players\":[";
    for (std::size_t i = 0; i < e.participants.size(); ++i) {
      if (i) out << ',';
      out << nlohmann::json(e.participants[i]).dump();
    }
    out << "]}\n";
  }
}

// Chains of cliques: consecutive cliques in a chain are joined by one edge
// between distinct members, giving high clustering with long paths.
inline Graph chained_cliques(std::size_t n_chains, std::size_t cliques_per_chain,
                             std::size_t clique_size = 4) {
  if (clique_size < 3) throw ConfigError("clique size must be >= 3");
  std::vector<LocalEdge> edges;
  Vertex next = 0;
  for (std::size_t c = 0; c < n_chains; ++c) {
    for (std::size_t k = 0; k < cliques_per_chain; ++k) {
      Vertex base = next;
      for (Vertex i = 0; i < clique_size; ++i)
        for (Vertex j = i + 1; j < clique_size; ++j) edges.emplace_back(base + i, base + j);
      if (k > 0) edges.emplace_back(base - static_cast<Vertex>(clique_size) + 1, base);
      next += static_cast<Vertex>(clique_size);
    }
  }
  return Graph(next, edges);
}

struct InferenceEvaluation {
  double precision = 0.0;
  double recall = 0.0;
  double accuracy = 0.0;
  double auc = 0.0;
  std::size_t true_positives = 0, false_positives = 0, true_negatives = 0, false_negatives = 0;
  std::size_t pairs = 0;  // co-occurring pairs evaluated
};

inline std::vector<PairKey> cooccurring_pairs(std::span<const BinnedCooccurrence> records) {
  std::vector<PairKey> pairs;
  for (const auto& r : records)
    if (pairs.empty() || pairs.back() != r.pair) pairs.push_back(r.pair);
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

namespace detail {

// Score per co-occurring pair (0 when unscored), aligned with `pairs`.
inline std::vector<std::uint64_t> aligned_scores(std::span<const PairKey> pairs,
                                                 std::span<const TieScore> scores) {
  std::vector<TieScore> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end(), [](const TieScore& a, const TieScore& b) { return a.pair < b.pair; });
  std::vector<std::uint64_t> out(pairs.size(), 0);
  std::size_t j = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    while (j < sorted.size() && sorted[j].pair < pairs[i]) ++j;
    if (j < sorted.size() && sorted[j].pair == pairs[i]) out[i] = sorted[j].score;
  }
  return out;
}

inline std::vector<bool> aligned_labels(std::span<const PairKey> pairs, std::span<const PairKey> truth) {
  std::vector<bool> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i)
    out[i] = std::binary_search(truth.begin(), truth.end(), pairs[i]);
  return out;
}

// Mann-Whitney AUC, ties counted one half.
inline double rank_auc(std::span<const std::uint64_t> scores, const std::vector<bool>& labels) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
  double pos = 0, neg = 0, rank_sum = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]]) {
        rank_sum += mid_rank;
        ++pos;
      } else {
        ++neg;
      }
    i = j;
  }
  if (pos == 0 || neg == 0) return std::numeric_limits<double>::quiet_NaN();
  return (rank_sum - pos * (pos + 1) / 2.0) / (pos * neg);
}

}  // namespace detail

// Binary-classification metrics over all co-occurring pairs. `truth` and
// `inferred` are pair keys in the same player index as `cooccurring`.
inline InferenceEvaluation evaluate_inference(std::span<const PairKey> truth,
                                              std::span<const PairKey> cooccurring,
                                              std::span<const TieScore> scores,
                                              std::span<const PairKey> inferred) {
  if (truth.empty()) throw DataError("ground truth has no friend pairs");
  std::vector<PairKey> t(truth.begin(), truth.end()), inf(inferred.begin(), inferred.end());
  std::sort(t.begin(), t.end());
  std::sort(inf.begin(), inf.end());
  InferenceEvaluation ev;
  ev.pairs = cooccurring.size();
  auto labels = detail::aligned_labels(cooccurring, t);
  for (std::size_t i = 0; i < cooccurring.size(); ++i) {
    bool predicted = std::binary_search(inf.begin(), inf.end(), cooccurring[i]);
    if (labels[i]) (predicted ? ev.true_positives : ev.false_negatives)++;
    else (predicted ? ev.false_positives : ev.true_negatives)++;
  }
  auto ratio = [](std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); };
  ev.precision = ratio(ev.true_positives, ev.true_positives + ev.false_positives);
  ev.recall = ratio(ev.true_positives, ev.true_positives + ev.false_negatives);
  ev.accuracy = ratio(ev.true_positives + ev.true_negatives, ev.pairs);
  auto aligned = detail::aligned_scores(cooccurring, scores);
  ev.auc = detail::rank_auc(aligned, labels);
  return ev;
}

// Threshold maximising accuracy on a labelled run; ties go to the smallest.
inline std::uint64_t select_threshold(std::span<const PairKey> truth, std::span<const PairKey> cooccurring,
                                      std::span<const TieScore> scores) {
  std::vector<PairKey> t(truth.begin(), truth.end());
  std::sort(t.begin(), t.end());
  auto labels = detail::aligned_labels(cooccurring, t);
  auto aligned = detail::aligned_scores(cooccurring, scores);
  // Sweep thresholds from high to low: predicted set = scores >= threshold.
  std::vector<std::size_t> order(aligned.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return aligned[a] > aligned[b]; });
  std::size_t positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  std::uint64_t best_threshold = aligned.empty() ? 1 : *std::max_element(aligned.begin(), aligned.end()) + 1;
  std::int64_t correct = static_cast<std::int64_t>(aligned.size() - positives);  // nothing predicted
  std::int64_t best = correct;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && aligned[order[j]] == aligned[order[i]]) {
      correct += labels[order[j]] ? 1 : -1;
      ++j;
    }
    std::uint64_t threshold = aligned[order[i]];
    if (threshold == 0) break;
    if (correct >= best) {
      best = correct;
      best_threshold = threshold;
    }
    i = j;
  }
  return best_threshold;
}

}  // namespace tienet
