#include "cstream/sessions.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "cstream/util.hpp"

namespace cstream {

namespace {

void require_sorted(std::span<const std::int64_t> ts, const char* who) {
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (ts[i] < ts[i - 1]) throw std::invalid_argument(std::string(who) + ": actions not sorted");
  }
}

}  // namespace

std::vector<double> think_times(std::span<const std::int64_t> action_ts) {
  require_sorted(action_ts, "think_times");
  std::vector<double> out;
  if (action_ts.size() < 2) return out;
  out.reserve(action_ts.size() - 1);
  for (std::size_t i = 1; i < action_ts.size(); ++i) {
    out.push_back(static_cast<double>(action_ts[i] - action_ts[i - 1]) / 1000.0);
  }
  return out;
}

std::vector<Session> segment_sessions(const BrowserId& browser,
                                      std::span<const std::int64_t> action_ts, double gap_s) {
  require_sorted(action_ts, "segment_sessions");
  std::vector<Session> out;
  if (action_ts.empty()) return out;
  const auto gap_ms = static_cast<std::int64_t>(std::llround(gap_s * 1000.0));

  Session current{browser, action_ts[0], action_ts[0], 1};
  for (std::size_t i = 1; i < action_ts.size(); ++i) {
    if (action_ts[i] - action_ts[i - 1] > gap_ms) {
      out.push_back(current);
      current = Session{browser, action_ts[i], action_ts[i], 1};
    } else {
      current.end_ts = action_ts[i];
      ++current.action_count;
    }
  }
  out.push_back(current);
  return out;
}

std::vector<double> idle_times(std::span<const Session> sessions) {
  std::vector<double> out;
  if (sessions.size() < 2) return out;
  out.reserve(sessions.size() - 1);
  for (std::size_t i = 1; i < sessions.size(); ++i) {
    if (sessions[i].start_ts < sessions[i - 1].start_ts) {
      throw std::invalid_argument("idle_times: sessions not sorted by start");
    }
    out.push_back(static_cast<double>(sessions[i].start_ts - sessions[i - 1].end_ts) / 1000.0);
  }
  return out;
}

void write_sessions_csv(std::ostream& out, std::span<const SessionRow> rows) {
  out << "household_id,user_agent_hash,device_class,start_ts,end_ts,action_count\n";
  std::string line;
  for (const auto& row : rows) {
    line.clear();
    line += row.session.browser.household_id;
    line.push_back(',');
    line += to_hex16(fnv1a64(row.session.browser.user_agent));
    line.push_back(',');
    line += std::string(device_class_name(row.device));
    line.push_back(',');
    line += format_i64(row.session.start_ts);
    line.push_back(',');
    line += format_i64(row.session.end_ts);
    line.push_back(',');
    line += format_i64(static_cast<std::int64_t>(row.session.action_count));
    line.push_back('\n');
    out << line;
  }
}

}  // namespace cstream
