#include "cstream/https_sim.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "cstream/util.hpp"

namespace cstream {

namespace {

std::vector<MigrationEntry> rank(std::map<Domain, std::size_t>&& counts) {
  std::vector<MigrationEntry> order;
  order.reserve(counts.size());
  for (auto& [domain, count] : counts) order.push_back({domain, count});
  std::sort(order.begin(), order.end(), [](const MigrationEntry& a, const MigrationEntry& b) {
    if (a.action_count != b.action_count) return a.action_count > b.action_count;
    return a.domain < b.domain;
  });
  return order;
}

}  // namespace

std::vector<MigrationEntry> migration_order(std::span<const ClickstreamGraph> graphs,
                                            const SuffixList& suffixes) {
  std::map<Domain, std::size_t> counts;
  for (const auto& g : graphs) {
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      if (g.visit_counts()[v] == 0) continue;
      counts[extract_domain(g.vertex_urls()[v], suffixes)] += g.visit_counts()[v];
    }
  }
  return rank(std::move(counts));
}

std::vector<MigrationEntry> migration_order(std::span<const HttpRecord> user_actions,
                                            const SuffixList& suffixes) {
  std::map<Domain, std::size_t> counts;
  for (const auto& r : user_actions) ++counts[extract_domain(r.url, suffixes)];
  return rank(std::move(counts));
}

std::set<Domain> retaining_domains(const PromoterConfig& config) {
  std::set<Domain> out = config.search_engines;
  out.insert(config.social_networks.begin(), config.social_networks.end());
  return out;
}

SimulationResult simulate_migration(std::vector<HttpRecord> user_actions,
                                    std::span<const MigrationEntry> order, double target,
                                    const std::set<Domain>& retaining, const SuffixList& suffixes,
                                    double session_gap_s, unsigned jobs) {
  if (user_actions.empty()) throw std::invalid_argument("simulate_migration: empty corpus");
  if (target < 0.0 || target > 1.0) {
    throw std::invalid_argument("simulate_migration: target outside [0,1]");
  }

  SimulationResult result;
  result.target = target;
  result.actions_total = user_actions.size();

  const auto total = static_cast<double>(user_actions.size());
  std::set<Domain> migrated;
  std::size_t removed = 0;
  for (const auto& entry : order) {
    if (static_cast<double>(removed) >= target * total) break;
    migrated.insert(entry.domain);
    result.migrated.push_back(entry.domain);
    removed += entry.action_count;
  }
  result.actions_removed = removed;
  result.achieved_fraction = static_cast<double>(removed) / total;

  result.baseline = compute_metric_suite(user_actions, suffixes, session_gap_s, jobs);

  result.survivors.reserve(user_actions.size() - std::min(removed, user_actions.size()));
  for (auto& r : user_actions) {
    if (migrated.count(extract_domain(r.url, suffixes))) continue;
    if (r.referer && !url_host(*r.referer).empty()) {
      const Domain rd = extract_domain(*r.referer, suffixes);
      // migrated promoters keep informing destinations of the visit origin;
      // everyone else goes silent per RFC behavior
      if (migrated.count(rd) && !retaining.count(rd)) r.referer.reset();
    }
    result.survivors.push_back(std::move(r));
  }

  result.degraded = compute_metric_suite(result.survivors, suffixes, session_gap_s, jobs);
  return result;
}

namespace {

nlohmann::json delta_json(const stats::DistSummary& base, const stats::DistSummary& sim) {
  nlohmann::json j;
  j["mean"] = sim.mean - base.mean;
  j["median"] = sim.median - base.median;
  return j;
}

}  // namespace

std::string simulation_report_json(std::span<const SimulationResult> checkpoints) {
  nlohmann::json report = nlohmann::json::array();
  for (const auto& c : checkpoints) {
    nlohmann::json j;
    j["target"] = c.target;
    j["achieved_fraction"] = c.achieved_fraction;
    j["actions_total"] = c.actions_total;
    j["actions_removed"] = c.actions_removed;
    nlohmann::json migrated = nlohmann::json::array();
    for (const auto& d : c.migrated) migrated.push_back(d.label);
    j["migrated_domains"] = std::move(migrated);
    j["baseline"] = nlohmann::json::parse(metric_suite_to_json(c.baseline));
    j["degraded"] = nlohmann::json::parse(metric_suite_to_json(c.degraded));

    nlohmann::json deltas;
    deltas["n_actions"] =
        static_cast<std::int64_t>(c.degraded.n_actions) - static_cast<std::int64_t>(c.baseline.n_actions);
    deltas["n_sessions"] =
        static_cast<std::int64_t>(c.degraded.n_sessions) - static_cast<std::int64_t>(c.baseline.n_sessions);
    deltas["n_graphs"] =
        static_cast<std::int64_t>(c.degraded.n_graphs) - static_cast<std::int64_t>(c.baseline.n_graphs);
    deltas["think_time_s"] = delta_json(c.baseline.think_time_s, c.degraded.think_time_s);
    deltas["session_duration_s"] =
        delta_json(c.baseline.session_duration_s, c.degraded.session_duration_s);
    deltas["actions_per_session"] =
        delta_json(c.baseline.actions_per_session, c.degraded.actions_per_session);
    deltas["idle_time_s"] = delta_json(c.baseline.idle_time_s, c.degraded.idle_time_s);
    deltas["pages_per_day"] = delta_json(c.baseline.pages_per_day, c.degraded.pages_per_day);
    deltas["wcc_ratio"] = delta_json(c.baseline.wcc_ratio, c.degraded.wcc_ratio);
    deltas["longest_path_vertices"] =
        delta_json(c.baseline.longest_path_vertices, c.degraded.longest_path_vertices);
    j["deltas"] = std::move(deltas);
    report.push_back(std::move(j));
  }
  return report.dump(2);
}

}  // namespace cstream
