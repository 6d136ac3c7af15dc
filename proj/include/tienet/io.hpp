#pragma once

// Output helpers: stable number formatting, CSV files stamped with the
// producing config hash, and FNV-1a hashing.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "tienet/core.hpp"

namespace tienet {

// Shortest round-trip representation; "nan"/"inf" spelled out.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw InvariantError("double formatting failed");
  return std::string(buf, ptr);
}

inline std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string csv_quote(std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

// Buffered CSV file whose first line names the producing config hash.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::string_view config_hash,
            std::initializer_list<std::string_view> header)
      : path_(path) {
    if (!config_hash.empty()) buf_ << "# config_hash=" << config_hash << '\n';
    bool first = true;
    for (auto h : header) {
      if (!first) buf_ << ',';
      buf_ << h;
      first = false;
    }
    buf_ << '\n';
  }

  template <typename... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((emit(fields, first)), ...);
    buf_ << '\n';
  }

  void close() {
    if (!path_.parent_path().empty()) std::filesystem::create_directories(path_.parent_path());
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path_.string());
    out << buf_.str();
    if (!out) throw ConfigError("write failed for " + path_.string());
  }

 private:
  template <typename T>
  void emit(const T& value, bool& first) {
    if (!first) buf_ << ',';
    first = false;
    if constexpr (std::is_same_v<T, double>) {
      buf_ << format_double(value);
    } else if constexpr (std::is_same_v<T, std::optional<double>>) {
      buf_ << format_optional(value);
    } else if constexpr (std::is_convertible_v<T, std::string_view>) {
      buf_ << csv_quote(std::string_view(value));
    } else {
      buf_ << value;
    }
  }

  std::filesystem::path path_;
  std::ostringstream buf_;
};

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (!path.parent_path().empty()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("write failed for " + path.string());
}

}  // namespace tienet
