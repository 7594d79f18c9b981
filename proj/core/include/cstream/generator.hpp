#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cstream/features.hpp"
#include "cstream/history.hpp"
#include "cstream/trace.hpp"

namespace cstream {

// Knobs of the synthetic trace generator. Defaults are tuned so that
// user-actions make up roughly 2% of all requests (children mean 49).
struct GenConfig {
  std::uint64_t seed = 42;
  std::size_t n_browsers = 25;
  std::size_t n_days = 3;
  std::string start_day = "2013-07-01";

  double device_mix_pc = 0.6;
  double device_mix_smartphone = 0.3;
  double device_mix_tablet = 0.1;

  double sessions_per_browser_mean = 6.0;   // geometric, >= 1
  double actions_per_session_mean = 8.0;    // geometric, >= 1
  double children_per_action_mean = 49.0;   // geometric, >= 0

  double child_delay_median_s = 0.8;  // log-normal; heavy tail up to the clamp
  double child_delay_sigma = 1.5;
  double max_child_delay_s = 25.0;  // clamp, below the default linking window

  double think_time_median_s = 15.0;  // log-normal; short-think tail overlaps page loads
  double think_time_sigma = 1.4;
  double max_think_time_s = 1500.0;  // clamp, below the session gap

  double idle_extra_median_s = 7200.0;  // added on top of the session gap
  double idle_extra_sigma = 0.9;

  double promoter_visit_probability = 0.35;
  double promoter_path_mean = 4.0;  // pages followed after a promoter start
  double redirect_chain_probability = 0.04;
  double ad_fraction = 0.12;        // children fetched from ad domains
  double iframe_probability = 0.06; // children that spawn their own fan-out
  double iframe_children_mean = 1.5;  // capped at 4; frames are small sub-pages
  double zero_children_action_fraction = 0.01;

  std::size_t n_content_domains = 30;
  std::size_t pages_per_domain = 40;
  double history_jitter_s = 2.0;

  std::vector<std::string> promoters = {"google.it", "facebook.com"};
  std::set<std::string> https_domains;  // registrable domains served encrypted
  std::set<std::string> https_retain;   // subset that still emits referers

  void validate() const;  // throws std::invalid_argument on infeasible values
};

GenConfig load_gen_config(std::istream& in);

// Ground-truth clickstream of one (browser, day), kept independently of
// build_graph: URLs are normalized, referer-only vertices carry count 0,
// self-loops are excluded.
struct TruthGraph {
  BrowserId browser;
  std::int64_t day = 0;
  std::map<std::string, std::size_t> visit_count;
  std::set<std::pair<std::string, std::string>> edges;
};

struct GeneratedTrace {
  std::vector<HttpRecord> records;  // timestamp order
  std::vector<Label> labels;        // parallel to records
  std::vector<TruthGraph> truth_graphs;
  std::map<BrowserId, std::vector<HistoryEntry>> history;  // all true visits
  std::size_t emitted_user_actions = 0;
  std::size_t hidden_user_actions = 0;  // withheld by HTTPS domains
};

// Deterministic for a given config (browsers derive independent seeds).
GeneratedTrace generate(const GenConfig& config);

void write_trace(std::ostream& out, const GeneratedTrace& trace);
// line_number \t label, 1-based over the trace file lines
void write_truth_labels(std::ostream& out, const GeneratedTrace& trace);
void write_truth_graph(std::ostream& out, const TruthGraph& graph);

}  // namespace cstream
