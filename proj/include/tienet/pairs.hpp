#pragma once

// Per-pair binary interaction series and the lagged autocorrelation tie score.
//
// For a binary series n(t) with active bins b_0 < b_1 < ... < b_{k-1}, the
// double sum over lags 1..tau_max of sum_t n(t) n(t - tau) counts exactly the
// index pairs i < j with b_j - b_i <= tau_max. A two-pointer sweep over the
// sorted bins evaluates it in O(k).

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tienet/core.hpp"
#include "tienet/ingest.hpp"

namespace tienet {

inline constexpr std::uint64_t kUndersampledThreshold = 197;
inline constexpr std::uint64_t kOversampledThreshold = 1900;

struct PairSeries {
  PairKey pair;
  std::vector<std::int64_t> active_bins;  // strictly increasing, within [0, horizon)
  std::int64_t horizon = 0;
};

struct TieScore {
  PairKey pair;
  std::uint64_t score = 0;
  std::uint64_t k = 0;  // number of active bins

  friend bool operator==(const TieScore&, const TieScore&) = default;
};

enum class ScoreMode { absolute, circadian };

struct InferenceConfig {
  std::int64_t bin_width = 600;
  // Largest lag in bins. Unset means every lag the horizon allows.
  std::optional<std::int64_t> tau_max;
  std::vector<std::uint64_t> thresholds{kUndersampledThreshold, kOversampledThreshold};
  ScoreMode mode = ScoreMode::absolute;

  void validate() const {
    if (bin_width <= 0) throw ConfigError("bin width must be positive");
    if (thresholds.empty()) throw ConfigError("at least one threshold is required");
    for (auto t : thresholds)
      if (t == 0) throw ConfigError("thresholds must be positive");
    if (tau_max && *tau_max < 1) throw ConfigError("tau_max must be >= 1");
  }
};

// Groups co-occurrences by pair. Pairs with fewer than two active bins are
// dropped: their score is zero for every lag bound, so no positive threshold
// can select them.
inline std::vector<PairSeries> aggregate_series(std::span<const BinnedCooccurrence> cooccurrences,
                                                std::int64_t horizon) {
  std::vector<BinnedCooccurrence> sorted;
  std::span<const BinnedCooccurrence> records = cooccurrences;
  if (!std::is_sorted(records.begin(), records.end())) {
    sorted.assign(records.begin(), records.end());
    std::sort(sorted.begin(), sorted.end());
    records = sorted;
  }
  std::vector<PairSeries> out;
  std::size_t i = 0;
  while (i < records.size()) {
    std::size_t j = i;
    PairSeries series{records[i].pair, {}, horizon};
    for (; j < records.size() && records[j].pair == records[i].pair; ++j) {
      std::int64_t bin = records[j].bin;
      if (bin < 0 || bin >= horizon) throw DataError("co-occurrence bin outside horizon");
      if (series.active_bins.empty() || series.active_bins.back() != bin)
        series.active_bins.push_back(bin);
    }
    if (series.active_bins.size() >= 2) out.push_back(std::move(series));
    i = j;
  }
  return out;
}

inline std::uint64_t autocorrelation_score(std::span<const std::int64_t> active_bins,
                                           std::int64_t horizon, std::int64_t tau_max) {
  if (tau_max < 1 || tau_max > horizon - 1)
    throw ConfigError("tau_max must lie in [1, T-1]");
  std::uint64_t score = 0;
  std::size_t lo = 0;
  for (std::size_t hi = 1; hi < active_bins.size(); ++hi) {
    while (active_bins[hi] - active_bins[lo] > tau_max) ++lo;
    score += hi - lo;
  }
  return score;
}

inline std::uint64_t autocorrelation_score(const PairSeries& series, std::int64_t tau_max) {
  return autocorrelation_score(series.active_bins, series.horizon, tau_max);
}

// Circular autocorrelation of a 144-bin time-of-day count series over lag set L.
inline std::uint64_t circadian_score(std::span<const std::uint64_t> counts,
                                     std::span<const std::int64_t> lags) {
  constexpr auto n = static_cast<std::int64_t>(kTimeOfDayBins);
  if (counts.size() != kTimeOfDayBins) throw DataError("circadian series must have 144 bins");
  std::uint64_t score = 0;
  for (auto tau : lags) {
    if (tau < 1 || tau >= n) throw ConfigError("circadian lag must lie in [1, 143]");
    for (std::int64_t t = 0; t < n; ++t)
      score += counts[static_cast<std::size_t>(t)] * counts[static_cast<std::size_t>((t - tau + n) % n)];
  }
  return score;
}

// Folds an absolute-time series into time-of-day counts. Requires 600 s bins.
inline std::array<std::uint64_t, kTimeOfDayBins> circadian_counts(const PairSeries& series,
                                                                  BinSpec spec) {
  if (spec.width != kTimeOfDayBinWidth) throw ConfigError("circadian mode requires 600 s bins");
  std::array<std::uint64_t, kTimeOfDayBins> counts{};
  for (auto bin : series.active_bins) ++counts[time_of_day_bin(spec.epoch + bin * spec.width)];
  return counts;
}

// Scores every series under one mode; output follows the input pair order.
inline std::vector<TieScore> score_pairs(std::span<const PairSeries> series,
                                         const InferenceConfig& config, std::int64_t epoch,
                                         unsigned threads = 1) {
  config.validate();
  std::vector<TieScore> out(series.size());
  std::vector<std::int64_t> lags;
  if (config.mode == ScoreMode::circadian) {
    std::int64_t bound = std::min<std::int64_t>(config.tau_max.value_or(143), 143);
    for (std::int64_t tau = 1; tau <= bound; ++tau) lags.push_back(tau);
  }
  parallel_for(series.size(), threads, [&](std::size_t i) {
    const auto& s = series[i];
    std::uint64_t score = 0;
    if (config.mode == ScoreMode::absolute) {
      score = autocorrelation_score(s, config.tau_max.value_or(s.horizon - 1));
    } else {
      auto counts = circadian_counts(s, {epoch, config.bin_width});
      score = circadian_score(counts, lags);
    }
    out[i] = {s.pair, score, s.active_bins.size()};
  });
  return out;
}

// Friend edges: pairs with score >= threshold, sorted by pair.
inline std::vector<TieScore> classify_ties(std::span<const TieScore> scores, std::uint64_t threshold) {
  if (threshold == 0) throw ConfigError("threshold must be positive");
  std::vector<TieScore> edges;
  for (const auto& s : scores)
    if (s.score >= threshold) edges.push_back(s);
  std::sort(edges.begin(), edges.end(),
            [](const TieScore& a, const TieScore& b) { return a.pair < b.pair; });
  return edges;
}

struct CcdfRow {
  std::uint64_t value = 0;
  double ccdf = 0.0;  // fraction of items >= value
};

// Empirical CCDF at each distinct score, closed by a zero row at max + 1.
inline std::vector<CcdfRow> score_distribution(std::span<const TieScore> scores) {
  if (scores.empty()) return {};
  std::vector<std::uint64_t> values;
  values.reserve(scores.size());
  for (const auto& s : scores) values.push_back(s.score);
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  std::vector<CcdfRow> rows;
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    rows.push_back({values[i], static_cast<double>(values.size() - i) / n});
    i = j;
  }
  rows.push_back({values.back() + 1, 0.0});
  return rows;
}

// Step-function lookup into a table produced by score_distribution.
inline double ccdf_at(std::span<const CcdfRow> table, std::uint64_t value) {
  auto it = std::lower_bound(table.begin(), table.end(), value,
                             [](const CcdfRow& r, std::uint64_t v) { return r.value < v; });
  return it == table.end() ? 0.0 : it->ccdf;
}

}  // namespace tienet
