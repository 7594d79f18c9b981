#include "cstream/history.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "cstream/util.hpp"

namespace cstream {

std::vector<HistoryEntry> read_history(std::istream& in) {
  std::vector<HistoryEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto cols = split(line, '\t');
    if (cols.size() < 2 || cols.size() > 3) {
      throw ParseError(line_no, "history line needs 'timestamp_ms<TAB>url[<TAB>transition]'");
    }
    HistoryEntry e;
    const auto ts = parse_i64(cols[0]);
    if (!ts || *ts <= 0) throw ParseError(line_no, "malformed history timestamp");
    e.timestamp_ms = *ts;
    if (cols[1].empty()) throw ParseError(line_no, "empty history url");
    e.url = std::string(cols[1]);
    if (cols.size() == 3 && !cols[2].empty() && cols[2] != "-") e.transition = std::string(cols[2]);
    out.push_back(std::move(e));
  }
  return out;
}

void write_history(std::ostream& out, const std::vector<HistoryEntry>& entries) {
  std::string line;
  for (const auto& e : entries) {
    line.clear();
    line += format_i64(e.timestamp_ms);
    line.push_back('\t');
    line += e.url;
    line.push_back('\t');
    line += e.transition ? *e.transition : "-";
    line.push_back('\n');
    out << line;
  }
}

namespace {

bool is_redirect_status(const std::optional<int>& status) {
  return !status || (*status >= 300 && *status <= 399);
}

constexpr std::size_t kNoPred = static_cast<std::size_t>(-1);

}  // namespace

std::vector<Label> match_history(const std::vector<HistoryEntry>& history,
                                 const std::vector<HttpRecord>& records, double tolerance_s,
                                 MatchReport* report) {
  if (tolerance_s <= 0) throw std::invalid_argument("match_history: tolerance must be positive");
  for (std::size_t i = 1; i < history.size(); ++i) {
    if (history[i].timestamp_ms < history[i - 1].timestamp_ms) {
      throw std::invalid_argument("match_history: history not sorted by timestamp");
    }
  }
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].timestamp_ms < records[i - 1].timestamp_ms) {
      throw std::invalid_argument("match_history: records not sorted by timestamp");
    }
  }
  const auto tol_ms = static_cast<std::int64_t>(std::llround(tolerance_s * 1000.0));

  // record indices per normalized URL, in timestamp order
  std::unordered_map<std::string, std::vector<std::size_t>> by_url;
  for (std::size_t i = 0; i < records.size(); ++i) {
    by_url[normalize_url(records[i].url).normalized_url].push_back(i);
  }

  // redirection-chain predecessor: most recent earlier record whose
  // normalized URL the referer names, within tolerance, with a 3xx (or
  // absent) status
  std::vector<std::size_t> chain_pred(records.size(), kNoPred);
  std::vector<bool> has_successor(records.size(), false);
  std::vector<std::int64_t> chain_start_ts(records.size(), 0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    chain_start_ts[i] = records[i].timestamp_ms;
    if (!records[i].referer) continue;
    const auto it = by_url.find(normalize_url(*records[i].referer).normalized_url);
    if (it == by_url.end()) continue;
    const auto& list = it->second;
    auto pos = std::lower_bound(list.begin(), list.end(), i);
    while (pos != list.begin()) {
      --pos;
      const std::size_t j = *pos;
      if (records[i].timestamp_ms - records[j].timestamp_ms > tol_ms) break;
      if (is_redirect_status(records[j].status_code)) {
        chain_pred[i] = j;
        has_successor[j] = true;
        chain_start_ts[i] = chain_start_ts[j];
        break;
      }
    }
  }

  std::vector<bool> matched(records.size(), false);
  std::vector<bool> via_chain_only(records.size(), false);
  std::size_t entries_matched = 0;

  for (const auto& entry : history) {
    const auto it = by_url.find(normalize_url(entry.url).normalized_url);
    if (it == by_url.end()) continue;
    const auto& list = it->second;

    std::size_t best = kNoPred;
    std::int64_t best_dist = 0;
    bool best_direct = false;
    for (std::size_t idx : list) {
      if (matched[idx]) continue;
      const std::int64_t ts = records[idx].timestamp_ms;
      const std::int64_t dist = std::llabs(ts - entry.timestamp_ms);
      const bool direct = dist <= tol_ms;
      // a chain terminal also matches when the entry falls within tolerance
      // of any record of its chain
      const bool via_chain = !has_successor[idx] && entry.timestamp_ms >= chain_start_ts[idx] - tol_ms &&
                             entry.timestamp_ms <= ts + tol_ms;
      if (!direct && !via_chain) continue;
      if (best == kNoPred || dist < best_dist || (dist == best_dist && idx < best)) {
        best = idx;
        best_dist = dist;
        best_direct = direct;
      }
    }
    if (best != kNoPred) {
      matched[best] = true;
      via_chain_only[best] = !best_direct;
      ++entries_matched;
    }
  }

  std::vector<Label> labels(records.size(), Label::automatic);
  std::size_t chain_matches = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (matched[i]) labels[i] = Label::user_action;
    if (via_chain_only[i]) ++chain_matches;
  }
  if (report) {
    report->entries_total = history.size();
    report->entries_matched = entries_matched;
    report->records_labeled = entries_matched;
    report->chain_matches = chain_matches;
  }
  return labels;
}

}  // namespace cstream
