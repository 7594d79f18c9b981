#include "cstream/metrics.hpp"

#include <algorithm>

#include <json.hpp>

#include "cstream/util.hpp"

namespace cstream {

MetricSuite compute_metric_suite(std::vector<HttpRecord> user_actions, const SuffixList& suffixes,
                                 double session_gap_s, unsigned jobs) {
  MetricSuite suite;
  suite.n_actions = user_actions.size();

  sort_records_per_browser(user_actions);
  const auto parts = browser_partitions(user_actions);
  suite.n_browsers = parts.size();

  std::vector<double> think_all;
  std::vector<double> durations;
  std::vector<double> actions_per;
  std::vector<double> idles;
  for (const auto& [begin, end] : parts) {
    const BrowserId browser{user_actions[begin].household_id, user_actions[begin].user_agent};
    std::vector<std::int64_t> ts;
    ts.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) ts.push_back(user_actions[i].timestamp_ms);

    const auto thinks = think_times(ts);
    think_all.insert(think_all.end(), thinks.begin(), thinks.end());

    const auto sessions = segment_sessions(browser, ts, session_gap_s);
    suite.n_sessions += sessions.size();
    suite.sessions_per_browser[browser] = sessions.size();
    for (const auto& s : sessions) {
      durations.push_back(s.duration_s());
      actions_per.push_back(static_cast<double>(s.action_count));
    }
    const auto between = idle_times(sessions);
    idles.insert(idles.end(), between.begin(), between.end());
  }

  const auto graphs = build_daily_graphs(std::move(user_actions), jobs);
  suite.n_graphs = graphs.size();

  std::vector<double> path_lens(graphs.size());
  std::vector<double> path_domains(graphs.size());
  std::vector<double> wcc(graphs.size());
  std::vector<double> vertices(graphs.size());
  parallel_for(graphs.size(), jobs, [&](std::size_t i) {
    const auto& g = graphs[i];
    const auto longest = longest_path_length(g);
    path_lens[i] = static_cast<double>(longest.length);
    std::vector<std::string> urls;
    urls.reserve(longest.witness.size());
    for (std::size_t v : longest.witness) urls.push_back(g.vertex_urls()[v]);
    path_domains[i] = urls.empty() ? 0.0 : static_cast<double>(domains_in_path(urls, suffixes));
    wcc[i] = g.vertex_count() ? biggest_wcc_ratio(g) : 0.0;
    vertices[i] = static_cast<double>(g.vertex_count());
  });
  for (const auto& g : graphs) {
    suite.vertices_per_graph[{g.browser, g.day}] = g.vertex_count();
  }

  std::vector<double> pages;
  std::vector<double> domains;
  std::vector<double> revisit;
  for (const auto& row : daily_consumption(graphs, suffixes)) {
    pages.push_back(static_cast<double>(row.pages));
    domains.push_back(static_cast<double>(row.domains));
    revisit.push_back(row.revisit_ratio);
  }

  suite.think_time_s = stats::summarize(think_all);
  suite.session_duration_s = stats::summarize(durations);
  suite.actions_per_session = stats::summarize(actions_per);
  suite.idle_time_s = stats::summarize(idles);
  suite.pages_per_day = stats::summarize(pages);
  suite.domains_per_day = stats::summarize(domains);
  suite.revisit_ratio = stats::summarize(revisit);
  suite.longest_path_vertices = stats::summarize(path_lens);
  suite.domains_in_longest_path = stats::summarize(path_domains);
  suite.wcc_ratio = stats::summarize(wcc);
  suite.graph_vertices = stats::summarize(vertices);
  return suite;
}

namespace {

nlohmann::json summary_json(const stats::DistSummary& s) {
  nlohmann::json j;
  j["count"] = s.count;
  j["mean"] = s.mean;
  j["min"] = s.min;
  j["p25"] = s.p25;
  j["median"] = s.median;
  j["p75"] = s.p75;
  j["max"] = s.max;
  return j;
}

}  // namespace

std::string metric_suite_to_json(const MetricSuite& suite) {
  nlohmann::json j;
  j["n_actions"] = suite.n_actions;
  j["n_browsers"] = suite.n_browsers;
  j["n_graphs"] = suite.n_graphs;
  j["n_sessions"] = suite.n_sessions;
  j["think_time_s"] = summary_json(suite.think_time_s);
  j["session_duration_s"] = summary_json(suite.session_duration_s);
  j["actions_per_session"] = summary_json(suite.actions_per_session);
  j["idle_time_s"] = summary_json(suite.idle_time_s);
  j["pages_per_day"] = summary_json(suite.pages_per_day);
  j["domains_per_day"] = summary_json(suite.domains_per_day);
  j["revisit_ratio"] = summary_json(suite.revisit_ratio);
  j["longest_path_vertices"] = summary_json(suite.longest_path_vertices);
  j["domains_in_longest_path"] = summary_json(suite.domains_in_longest_path);
  j["wcc_ratio"] = summary_json(suite.wcc_ratio);
  j["graph_vertices"] = summary_json(suite.graph_vertices);
  return j.dump(2);
}

}  // namespace cstream
