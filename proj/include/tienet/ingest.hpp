#pragma once

// Interaction-log parsing, clique expansion of game instances into binned
// pairwise co-occurrences, and time-of-day activity statistics.

#include <array>
#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "tienet/core.hpp"

namespace tienet {

enum class LogFormat { jsonl, csv };

struct IngestConfig {
  LogFormat format = LogFormat::jsonl;
  std::size_t max_participants = 16;
  // Observation window [window_start, window_end).
  std::int64_t window_start = 0;
  std::optional<std::int64_t> window_end;
};

// One game instance. Participants are sorted and unique.
struct InteractionEvent {
  std::string game_id;
  std::int64_t timestamp = 0;
  std::vector<std::string> participants;

  friend bool operator==(const InteractionEvent&, const InteractionEvent&) = default;
};

struct Rejection {
  std::size_t line_no = 0;
  std::string reason;
};

struct ParseReport {
  std::vector<InteractionEvent> events;
  std::vector<Rejection> rejections;
  std::size_t lines_read = 0;
  std::size_t blank_lines = 0;
  // Events in which at least one player id was listed more than once.
  std::size_t duplicate_player_warnings = 0;
};

namespace detail {

struct LineError {
  std::string reason;
};

inline std::vector<std::string> split_csv_record(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.emplace_back();
    } else {
      fields.back() += ch;
    }
  }
  if (quoted) throw LineError{"unterminated quote"};
  return fields;
}

inline std::int64_t parse_integer_field(std::string_view text) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw LineError{"ts is not an integer"};
  return value;
}

inline InteractionEvent parse_csv_line(std::string_view line) {
  auto fields = split_csv_record(line);
  if (fields.size() != 3) throw LineError{"expected 3 fields"};
  InteractionEvent event;
  event.game_id = fields[0];
  event.timestamp = parse_integer_field(fields[1]);
  std::string_view players = fields[2];
  std::size_t start = 0;
  while (start <= players.size()) {
    std::size_t bar = players.find('|', start);
    if (bar == std::string_view::npos) bar = players.size();
    event.participants.emplace_back(players.substr(start, bar - start));
    start = bar + 1;
  }
  return event;
}

inline InteractionEvent parse_json_line(std::string_view line) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error&) {
    throw LineError{"invalid json"};
  }
  if (!doc.is_object()) throw LineError{"record is not an object"};
  InteractionEvent event;
  auto id = doc.find("game_id");
  if (id == doc.end() || !id->is_string()) throw LineError{"game_id missing or not a string"};
  event.game_id = id->get<std::string>();
  auto ts = doc.find("ts");
  if (ts == doc.end()) throw LineError{"ts missing"};
  if (ts->is_number_unsigned()) {
    auto raw = ts->get<std::uint64_t>();
    if (raw > static_cast<std::uint64_t>(INT64_MAX)) throw LineError{"ts out of range"};
    event.timestamp = static_cast<std::int64_t>(raw);
  } else if (ts->is_number_integer()) {
    event.timestamp = ts->get<std::int64_t>();
  } else {
    throw LineError{"ts is not an integer"};
  }
  auto players = doc.find("players");
  if (players == doc.end() || !players->is_array()) throw LineError{"players missing or not an array"};
  for (const auto& p : *players) {
    if (!p.is_string()) throw LineError{"player id is not a string"};
    event.participants.push_back(p.get<std::string>());
  }
  return event;
}

}  // namespace detail

// Sorts and deduplicates participants; returns true if duplicates were removed.
inline bool normalize_participants(InteractionEvent& event) {
  auto& p = event.participants;
  std::sort(p.begin(), p.end());
  auto last = std::unique(p.begin(), p.end());
  bool had_duplicates = last != p.end();
  p.erase(last, p.end());
  return had_duplicates;
}

// Parses a line-delimited log. Every non-blank line either yields an event or
// a rejection record carrying its 1-based line number.
inline ParseReport parse_event_log(std::istream& in, const IngestConfig& config) {
  if (!in.good()) throw DataError("input stream is not readable");
  if (config.max_participants < 1) throw ConfigError("max_participants must be >= 1");
  ParseReport report;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      ++report.blank_lines;
      continue;
    }
    try {
      InteractionEvent event = config.format == LogFormat::jsonl ? detail::parse_json_line(line)
                                                                 : detail::parse_csv_line(line);
      if (event.game_id.empty()) throw detail::LineError{"empty game_id"};
      for (const auto& p : event.participants)
        if (p.empty()) throw detail::LineError{"empty player id"};
      if (normalize_participants(event)) ++report.duplicate_player_warnings;
      if (event.participants.empty()) throw detail::LineError{"no participants"};
      if (event.participants.size() > config.max_participants)
        throw detail::LineError{"too many participants"};
      if (event.timestamp < config.window_start) throw detail::LineError{"ts before window start"};
      if (config.window_end && event.timestamp >= *config.window_end)
        throw detail::LineError{"ts after window end"};
      report.events.push_back(std::move(event));
    } catch (const detail::LineError& err) {
      report.rejections.push_back({line_no, err.reason});
    }
  }
  if (in.bad()) throw DataError("read failure after line " + std::to_string(line_no));
  report.lines_read = line_no;
  return report;
}

// Builds the player index over every participant of every event.
inline PlayerIndex index_players(std::span<const InteractionEvent> events) {
  std::vector<std::string> names;
  for (const auto& e : events) names.insert(names.end(), e.participants.begin(), e.participants.end());
  return PlayerIndex(std::move(names));
}

struct BinSpec {
  std::int64_t epoch = 0;
  std::int64_t width = 600;
};

struct BinnedCooccurrence {
  PairKey pair;
  std::int64_t bin = 0;

  friend auto operator<=>(const BinnedCooccurrence&, const BinnedCooccurrence&) = default;
};

inline std::int64_t bin_of(std::int64_t timestamp, BinSpec spec) {
  if (spec.width <= 0) throw ConfigError("bin width must be positive");
  if (timestamp < spec.epoch) throw DataError("timestamp before epoch");
  return (timestamp - spec.epoch) / spec.width;
}

// Clique expansion: k participants yield k(k-1)/2 co-occurrences in one bin,
// returned sorted by pair.
inline std::vector<BinnedCooccurrence> expand_pairs(const InteractionEvent& event,
                                                    const PlayerIndex& index, BinSpec spec) {
  std::int64_t bin = bin_of(event.timestamp, spec);
  std::vector<PlayerIdx> ids;
  ids.reserve(event.participants.size());
  for (const auto& p : event.participants) ids.push_back(index.at(p));
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<BinnedCooccurrence> out;
  out.reserve(ids.size() * (ids.size() - (ids.empty() ? 0 : 1)) / 2);
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j) out.push_back({{ids[i], ids[j]}, bin});
  return out;
}

struct CooccurrenceTable {
  // Sorted by (pair, bin); at most one record per (pair, bin).
  std::vector<BinnedCooccurrence> records;
  std::size_t raw_pairs = 0;
};

inline void sort_unique(std::vector<BinnedCooccurrence>& records) {
  std::sort(records.begin(), records.end());
  records.erase(std::unique(records.begin(), records.end()), records.end());
}

// Expands every event and collapses repeated (pair, bin) records.
inline CooccurrenceTable build_cooccurrences(std::span<const InteractionEvent> events,
                                             const PlayerIndex& index, BinSpec spec) {
  CooccurrenceTable table;
  for (const auto& e : events) {
    auto pairs = expand_pairs(e, index, spec);
    table.raw_pairs += pairs.size();
    table.records.insert(table.records.end(), pairs.begin(), pairs.end());
  }
  sort_unique(table.records);
  return table;
}

// Merges independently built shards; associative and order-independent.
inline CooccurrenceTable merge_cooccurrences(std::span<const CooccurrenceTable> shards) {
  CooccurrenceTable merged;
  for (const auto& s : shards) {
    merged.raw_pairs += s.raw_pairs;
    merged.records.insert(merged.records.end(), s.records.begin(), s.records.end());
  }
  sort_unique(merged.records);
  return merged;
}

inline constexpr std::int64_t kTimeOfDayBinWidth = 600;
inline constexpr std::size_t kTimeOfDayBins = kSecondsPerDay / kTimeOfDayBinWidth;

inline std::size_t time_of_day_bin(std::int64_t timestamp) {
  std::int64_t sec = ((timestamp % kSecondsPerDay) + kSecondsPerDay) % kSecondsPerDay;
  return static_cast<std::size_t>(sec / kTimeOfDayBinWidth);
}

// Unique players ever seen in each UTC 10-minute time-of-day bin. Empty input
// gives an empty histogram; otherwise the result has kTimeOfDayBins entries.
inline std::vector<std::size_t> players_per_timebin(std::span<const InteractionEvent> events) {
  if (events.empty()) return {};
  std::array<std::unordered_set<std::string_view>, kTimeOfDayBins> seen;
  for (const auto& e : events) {
    auto& bucket = seen[time_of_day_bin(e.timestamp)];
    for (const auto& p : e.participants) bucket.insert(p);
  }
  std::vector<std::size_t> counts(kTimeOfDayBins);
  for (std::size_t b = 0; b < kTimeOfDayBins; ++b) counts[b] = seen[b].size();
  return counts;
}

}  // namespace tienet
