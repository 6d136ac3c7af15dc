#pragma once

// Shared vocabulary types: errors, player interning, canonical pair keys,
// seed derivation and a deterministic parallel-for.

#include <algorithm>
#include <atomic>
#include <compare>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace tienet {

// Error hierarchy. The CLI maps each class onto a distinct exit code.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad flags, missing files, out-of-range parameters (exit 1).
struct ConfigError : Error {
  using Error::Error;
};

// Malformed or inconsistent input data (exit 2).
struct DataError : Error {
  using Error::Error;
};

// A checked internal invariant did not hold (exit 3).
struct InvariantError : Error {
  using Error::Error;
};

using PlayerIdx = std::uint32_t;

// Unordered player pair with lo < hi. Player indices are assigned in
// lexicographic order of player names, so index order is name order.
struct PairKey {
  PlayerIdx lo = 0;
  PlayerIdx hi = 0;

  static PairKey make(PlayerIdx a, PlayerIdx b) {
    if (a == b) throw DataError("pair key requires two distinct players");
    return a < b ? PairKey{a, b} : PairKey{b, a};
  }

  friend auto operator<=>(const PairKey&, const PairKey&) = default;
};

// Interns player names. Indices follow sorted name order.
class PlayerIndex {
 public:
  PlayerIndex() = default;

  explicit PlayerIndex(std::vector<std::string> names) : names_(std::move(names)) {
    std::sort(names_.begin(), names_.end());
    names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
  }

  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }

  std::optional<PlayerIdx> find(std::string_view name) const {
    auto it = std::lower_bound(names_.begin(), names_.end(), name);
    if (it == names_.end() || *it != name) return std::nullopt;
    return static_cast<PlayerIdx>(it - names_.begin());
  }

  PlayerIdx at(std::string_view name) const {
    if (auto idx = find(name)) return *idx;
    throw DataError("unknown player id '" + std::string(name) + "'");
  }

  const std::string& name(PlayerIdx idx) const { return names_.at(idx); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
};

// splitmix64 finalizer; used to derive independent sub-seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Sub-seed for work item (stream, item) under a master seed. Results do not
// depend on the order in which work items are scheduled.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t item = 0) {
  return mix64(mix64(mix64(seed) ^ stream) ^ (item * 0xd6e8feb86659fd93ULL));
}

// Runs fn(i) for i in [0, n) on up to `threads` workers. fn must write only
// to slot i of preallocated output, which keeps results scheduling-independent.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  unsigned count = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  pool.reserve(count);
  for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

inline constexpr std::int64_t kSecondsPerDay = 86400;
inline constexpr std::int64_t kSecondsPerWeek = 604800;

}  // namespace tienet
