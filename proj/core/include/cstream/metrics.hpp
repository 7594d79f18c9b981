#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cstream/graph.hpp"
#include "cstream/sessions.hpp"
#include "cstream/stats.hpp"
#include "cstream/trace.hpp"

namespace cstream {

// Every distribution the analyses report, recomputed from one classified
// user-action stream. Deterministic for a given input, so a zero-change
// rerun is bit-for-bit identical.
struct MetricSuite {
  std::size_t n_actions = 0;
  std::size_t n_browsers = 0;
  std::size_t n_graphs = 0;
  std::size_t n_sessions = 0;

  stats::DistSummary think_time_s;
  stats::DistSummary session_duration_s;
  stats::DistSummary actions_per_session;
  stats::DistSummary idle_time_s;
  stats::DistSummary pages_per_day;
  stats::DistSummary domains_per_day;
  stats::DistSummary revisit_ratio;
  stats::DistSummary longest_path_vertices;
  stats::DistSummary domains_in_longest_path;
  stats::DistSummary wcc_ratio;
  stats::DistSummary graph_vertices;

  // per-unit counts backing the migration invariants
  std::map<BrowserId, std::size_t> sessions_per_browser;
  std::map<std::pair<BrowserId, std::int64_t>, std::size_t> vertices_per_graph;
};

// `user_actions` is a classified stream (any order); it is grouped per
// browser internally.
MetricSuite compute_metric_suite(std::vector<HttpRecord> user_actions, const SuffixList& suffixes,
                                 double session_gap_s = kDefaultSessionGapS, unsigned jobs = 1);

// Scalar part of the suite (counts + summaries) as a canonical JSON string.
std::string metric_suite_to_json(const MetricSuite& suite);

}  // namespace cstream
