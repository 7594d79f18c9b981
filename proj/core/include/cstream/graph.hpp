#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cstream/trace.hpp"

namespace cstream {

// Directed graph of one browser's user-action web pages for one UTC day.
// Vertices are normalized URLs; an edge u->v records a user-action for v
// whose referer normalized to u. A vertex with visit_count 0 exists only
// because surviving actions cite it as referer (an encrypted hub, say).
class ClickstreamGraph {
 public:
  BrowserId browser;
  std::int64_t day = 0;  // UTC day index (days since epoch)

  std::size_t vertex_count() const { return urls_.size(); }
  std::size_t edge_count() const { return n_edges_; }
  const std::vector<std::string>& vertex_urls() const { return urls_; }
  const std::vector<std::size_t>& visit_counts() const { return visits_; }
  const std::vector<std::vector<std::size_t>>& out_edges() const { return out_; }
  const std::vector<std::vector<std::size_t>>& in_edges() const { return in_; }

  std::size_t total_actions() const;                 // sum of visit counts
  std::size_t visited_page_count() const;            // vertices with visit_count >= 1
  bool has_edge(std::size_t u, std::size_t v) const;

  // vertices are kept sorted by URL; index lookups are binary searches
  std::ptrdiff_t vertex_index(std::string_view normalized_url) const;

  // Assembles a graph from sorted-unique vertex URLs, per-vertex visit
  // counts, and an edge list; self-loops are dropped.
  static ClickstreamGraph assemble(BrowserId browser, std::int64_t day,
                                   std::vector<std::string> sorted_urls,
                                   std::vector<std::size_t> visits,
                                   const std::vector<std::pair<std::size_t, std::size_t>>& edges);

 private:
  std::vector<std::string> urls_;
  std::vector<std::size_t> visits_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
  std::size_t n_edges_ = 0;
};

// Builds the graph for one browser's user-actions within one UTC day.
// Referers naming pages never visited that day enter as visit_count-0
// vertices. Throws std::invalid_argument on mixed browsers or days.
ClickstreamGraph build_graph(std::span<const HttpRecord> user_actions);

// Groups a classified user-action stream by (browser, UTC day) and builds
// every graph; output sorted by (browser, day).
std::vector<ClickstreamGraph> build_daily_graphs(std::vector<HttpRecord> user_actions,
                                                 unsigned jobs = 1);

struct LongestPath {
  std::size_t length = 0;               // vertices on the path (edges + 1); 0 for empty graph
  std::vector<std::size_t> witness;     // vertex indices, source first
};

// Longest among the finite directed shortest paths between all vertex pairs
// (unweighted, per-vertex BFS).
LongestPath longest_path_length(const ClickstreamGraph& graph);

// Distinct registrable domains along a path of vertex URLs.
std::size_t domains_in_path(std::span<const std::string> path_urls, const SuffixList& suffixes);

// Weakly connected components as sets of vertex indices, largest first.
std::vector<std::vector<std::size_t>> wcc_partition(const ClickstreamGraph& graph);

// |largest WCC| / |V|. Throws std::invalid_argument on an empty graph.
double biggest_wcc_ratio(const ClickstreamGraph& graph);

struct ConsumptionRow {
  BrowserId browser;
  std::int64_t day = 0;
  std::size_t pages = 0;    // visited vertices (visit_count >= 1)
  std::size_t domains = 0;  // distinct domains of those pages
  std::size_t actions = 0;  // total user-actions
  double revisit_ratio = 0.0;  // actions / pages
};

// One row per (browser, day); empty days (no visited pages) are omitted.
std::vector<ConsumptionRow> daily_consumption(std::span<const ClickstreamGraph> graphs,
                                              const SuffixList& suffixes);

// Edge-list export: "# browser_hash day" header, "src<TAB>dst" per edge,
// isolated vertices as single-column lines.
void write_graph(std::ostream& out, const ClickstreamGraph& graph);

// Parses the edge-list format back. Visit counts are not part of the format;
// vertices that only ever appear as an edge source load as visit_count 0,
// everything else as 1.
ClickstreamGraph read_graph(std::istream& in);

}  // namespace cstream
