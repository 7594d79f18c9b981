#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cstream {

// FNV-1a, used wherever a stable cross-run hash is needed (browser ids in
// file names and CSV dumps). std::hash is not stable across builds.
std::uint64_t fnv1a64(std::string_view s);
std::string to_hex16(std::uint64_t v);

// splitmix64 step; used to derive independent per-partition RNG seeds.
std::uint64_t splitmix64(std::uint64_t& state);

std::vector<std::string_view> split(std::string_view line, char sep);

// Shortest round-trip decimal form; all numeric output goes through these so
// serialize/parse round trips are byte-identical.
std::string format_double(double v);
std::string format_i64(std::int64_t v);

std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_i64(std::string_view s);

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);

// UTC calendar handling for daily graph attribution.
std::int64_t day_index_utc(std::int64_t timestamp_ms);
std::string day_string(std::int64_t day_index);               // YYYY-MM-DD
std::optional<std::int64_t> day_index_from_string(std::string_view ymd);

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Falls back to the
// calling thread for jobs <= 1 or tiny n. fn must not throw.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace cstream
