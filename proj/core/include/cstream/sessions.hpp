#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cstream/trace.hpp"

namespace cstream {

// A maximal run of one browser's user-actions with no gap exceeding the
// session threshold. A single-action session has duration 0.
struct Session {
  BrowserId browser;
  std::int64_t start_ts = 0;
  std::int64_t end_ts = 0;
  std::size_t action_count = 0;

  double duration_s() const { return static_cast<double>(end_ts - start_ts) / 1000.0; }

  bool operator==(const Session&) const = default;
};

inline constexpr double kDefaultSessionGapS = 1800.0;

// Seconds between consecutive user-actions of one browser (n-1 values).
// Throws std::invalid_argument on unsorted input.
std::vector<double> think_times(std::span<const std::int64_t> action_ts);

// Splits where the think-time strictly exceeds `gap_s`; a delta equal to the
// gap continues the session.
std::vector<Session> segment_sessions(const BrowserId& browser,
                                      std::span<const std::int64_t> action_ts,
                                      double gap_s = kDefaultSessionGapS);

// next.start - prev.end for consecutive sessions; all values exceed the gap
// by construction.
std::vector<double> idle_times(std::span<const Session> sessions);

struct SessionRow {
  Session session;
  DeviceClass device = DeviceClass::Other;
};

// CSV dump: household_id, user-agent hash, device class, bounds, count.
void write_sessions_csv(std::ostream& out, std::span<const SessionRow> rows);

}  // namespace cstream
