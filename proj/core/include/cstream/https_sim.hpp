#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cstream/metrics.hpp"
#include "cstream/promoters.hpp"
#include "cstream/trace.hpp"

namespace cstream {

struct MigrationEntry {
  Domain domain;
  std::size_t action_count = 0;
};

// Domains by total user-action count, descending; ties lexicographic.
std::vector<MigrationEntry> migration_order(std::span<const ClickstreamGraph> graphs,
                                            const SuffixList& suffixes);
std::vector<MigrationEntry> migration_order(std::span<const HttpRecord> user_actions,
                                            const SuffixList& suffixes);

// Domains that keep passing the referer after migrating (content promoters).
std::set<Domain> retaining_domains(const PromoterConfig& config);

struct SimulationResult {
  double target = 0.0;
  double achieved_fraction = 0.0;
  std::size_t actions_total = 0;
  std::size_t actions_removed = 0;
  std::vector<Domain> migrated;
  std::vector<HttpRecord> survivors;  // degraded user-action stream
  MetricSuite baseline;
  MetricSuite degraded;
};

// Removes whole domains in `order` until the removed user-action share
// reaches `target` (stopping right after the crossing domain), drops the
// referer of survivors that point into migrated non-retaining domains, and
// recomputes sessions, graphs and the metric suite on what is left.
// Throws std::invalid_argument on an empty corpus or target outside [0,1].
SimulationResult simulate_migration(std::vector<HttpRecord> user_actions,
                                    std::span<const MigrationEntry> order, double target,
                                    const std::set<Domain>& retaining, const SuffixList& suffixes,
                                    double session_gap_s = kDefaultSessionGapS, unsigned jobs = 1);

// JSON report over one or more checkpoints: migrated lists, achieved
// fractions, and per-metric deltas against the shared baseline.
std::string simulation_report_json(std::span<const SimulationResult> checkpoints);

}  // namespace cstream
