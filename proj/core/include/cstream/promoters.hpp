#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <vector>

#include "cstream/graph.hpp"
#include "cstream/trace.hpp"

namespace cstream {

// Configured content promoters: search engines and online social networks.
struct PromoterConfig {
  std::set<Domain> search_engines;
  std::set<Domain> social_networks;
  std::size_t min_pages_per_graph = 20;

  bool is_search_engine(const Domain& d) const { return search_engines.count(d) > 0; }
  bool is_social_network(const Domain& d) const { return social_networks.count(d) > 0; }
  bool is_promoter(const Domain& d) const { return is_search_engine(d) || is_social_network(d); }
};

const PromoterConfig& default_promoter_config();

// Text config with [search_engines] / [social_networks] section headers, one
// domain per line. Throws when the two sets overlap.
PromoterConfig load_promoter_config(std::istream& in);

struct PromoterRank {
  Domain domain;
  std::size_t promoted = 0;  // distinct other domains it parents
  double fraction = 0.0;     // promoted / all distinct domains observed
};

// Out-degree ranking across a corpus of graphs: for every domain observed as
// an edge source, the fraction of all observed domains it promoted at least
// once. Descending, ties lexicographic.
std::vector<PromoterRank> promoter_ranking(std::span<const ClickstreamGraph> graphs,
                                           const SuffixList& suffixes);

struct PromoterFractions {
  double direct_se = 0.0;
  double reachable_se = 0.0;
  double direct_osn = 0.0;
  double reachable_osn = 0.0;
};

// Fractions of a graph's visited non-promoter pages that are children of,
// or reachable from, SE/OSN vertices. The page threshold is not applied
// here; callers filter via promoter_fraction_table.
PromoterFractions promoter_fractions(const ClickstreamGraph& graph, const PromoterConfig& config,
                                     const SuffixList& suffixes);

struct PromoterFractionRow {
  BrowserId browser;
  std::int64_t day = 0;
  PromoterFractions fractions;
};

struct PromoterFractionTable {
  std::vector<PromoterFractionRow> rows;
  std::size_t graphs_filtered = 0;  // below min_pages_per_graph
};

PromoterFractionTable promoter_fraction_table(std::span<const ClickstreamGraph> graphs,
                                              const PromoterConfig& config,
                                              const SuffixList& suffixes);

}  // namespace cstream
