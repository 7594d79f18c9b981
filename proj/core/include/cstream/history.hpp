#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cstream/features.hpp"
#include "cstream/trace.hpp"

namespace cstream {

// One browsing-history export row: a page visit the user actually made.
struct HistoryEntry {
  std::int64_t timestamp_ms = 0;
  std::string url;
  std::optional<std::string> transition;  // e.g. link, typed, redirect

  bool operator==(const HistoryEntry&) const = default;
};

std::vector<HistoryEntry> read_history(std::istream& in);
void write_history(std::ostream& out, const std::vector<HistoryEntry>& entries);

struct MatchReport {
  std::size_t entries_total = 0;
  std::size_t entries_matched = 0;
  std::size_t records_labeled = 0;  // equals entries_matched (one-to-one)
  std::size_t chain_matches = 0;    // labeled via the redirection-chain rule only
};

// Labels one browser's records against its history. A record becomes a
// user_action when its normalized URL matches an entry within `tolerance_s`,
// or when it terminates a redirection chain (3xx/referer succession) that
// passes within tolerance of the entry. Each entry labels at most one
// record, nearest in time first. Inputs must be sorted by timestamp.
std::vector<Label> match_history(const std::vector<HistoryEntry>& history,
                                 const std::vector<HttpRecord>& records, double tolerance_s = 10.0,
                                 MatchReport* report = nullptr);

}  // namespace cstream
