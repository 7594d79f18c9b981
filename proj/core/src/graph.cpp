#include "cstream/graph.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

#include "cstream/util.hpp"

namespace cstream {

std::size_t ClickstreamGraph::total_actions() const {
  std::size_t total = 0;
  for (std::size_t c : visits_) total += c;
  return total;
}

std::size_t ClickstreamGraph::visited_page_count() const {
  std::size_t n = 0;
  for (std::size_t c : visits_) {
    if (c >= 1) ++n;
  }
  return n;
}

bool ClickstreamGraph::has_edge(std::size_t u, std::size_t v) const {
  const auto& adj = out_[u];
  return std::binary_search(adj.begin(), adj.end(), v);
}

std::ptrdiff_t ClickstreamGraph::vertex_index(std::string_view normalized_url) const {
  const auto it = std::lower_bound(urls_.begin(), urls_.end(), normalized_url);
  if (it == urls_.end() || *it != normalized_url) return -1;
  return it - urls_.begin();
}

ClickstreamGraph ClickstreamGraph::assemble(
    BrowserId browser, std::int64_t day, std::vector<std::string> sorted_urls,
    std::vector<std::size_t> visits, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  ClickstreamGraph g;
  g.browser = std::move(browser);
  g.day = day;
  g.urls_ = std::move(sorted_urls);
  g.visits_ = std::move(visits);
  g.out_.assign(g.urls_.size(), {});
  g.in_.assign(g.urls_.size(), {});
  for (const auto& [u, v] : edges) {
    if (u == v) continue;
    g.out_[u].push_back(v);
  }
  for (auto& adj : g.out_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    g.n_edges_ += adj.size();
  }
  for (std::size_t u = 0; u < g.out_.size(); ++u) {
    for (std::size_t v : g.out_[u]) g.in_[v].push_back(u);
  }
  for (auto& adj : g.in_) std::sort(adj.begin(), adj.end());
  return g;
}

ClickstreamGraph build_graph(std::span<const HttpRecord> user_actions) {
  if (user_actions.empty()) {
    return ClickstreamGraph::assemble(BrowserId{}, 0, {}, {}, {});
  }
  const BrowserId browser{user_actions.front().household_id, user_actions.front().user_agent};
  const std::int64_t day = day_index_utc(user_actions.front().timestamp_ms);
  for (const auto& r : user_actions) {
    if (r.household_id != browser.household_id || r.user_agent != browser.user_agent) {
      throw std::invalid_argument("build_graph: mixed browsers");
    }
    if (day_index_utc(r.timestamp_ms) != day) {
      throw std::invalid_argument("build_graph: mixed days");
    }
  }

  std::map<std::string, std::size_t> visit_tally;
  for (const auto& r : user_actions) {
    ++visit_tally[normalize_url(r.url).normalized_url];
  }
  // referers outside the visited set anchor their component as
  // visit_count-0 vertices
  for (const auto& r : user_actions) {
    if (r.referer) visit_tally.emplace(normalize_url(*r.referer).normalized_url, 0);
  }

  std::vector<std::string> urls;
  std::vector<std::size_t> visits;
  urls.reserve(visit_tally.size());
  visits.reserve(visit_tally.size());
  for (const auto& [url, count] : visit_tally) {
    urls.push_back(url);
    visits.push_back(count);
  }

  auto index_of = [&](const std::string& url) {
    return static_cast<std::size_t>(std::lower_bound(urls.begin(), urls.end(), url) - urls.begin());
  };
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& r : user_actions) {
    if (!r.referer) continue;
    edges.emplace_back(index_of(normalize_url(*r.referer).normalized_url),
                       index_of(normalize_url(r.url).normalized_url));
  }
  return ClickstreamGraph::assemble(browser, day, std::move(urls), std::move(visits), edges);
}

std::vector<ClickstreamGraph> build_daily_graphs(std::vector<HttpRecord> user_actions,
                                                 unsigned jobs) {
  struct Key {
    BrowserId browser;
    std::int64_t day;
    bool operator<(const Key& o) const { return std::tie(browser, day) < std::tie(o.browser, o.day); }
  };
  std::map<Key, std::vector<HttpRecord>> grouped;
  for (auto& r : user_actions) {
    Key key{BrowserId{r.household_id, r.user_agent}, day_index_utc(r.timestamp_ms)};
    grouped[key].push_back(std::move(r));
  }
  std::vector<std::vector<HttpRecord>> buckets;
  buckets.reserve(grouped.size());
  for (auto& [_, bucket] : grouped) buckets.push_back(std::move(bucket));

  std::vector<ClickstreamGraph> graphs(buckets.size());
  parallel_for(buckets.size(), jobs, [&](std::size_t i) { graphs[i] = build_graph(buckets[i]); });
  return graphs;
}

namespace {

// BFS over out-edges; fills dist (-1 unreachable) and pred.
void bfs(const ClickstreamGraph& g, std::size_t source, std::vector<std::ptrdiff_t>& dist,
         std::vector<std::size_t>& pred) {
  dist.assign(g.vertex_count(), -1);
  pred.assign(g.vertex_count(), static_cast<std::size_t>(-1));
  std::deque<std::size_t> queue;
  dist[source] = 0;
  queue.push_back(source);
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v : g.out_edges()[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        pred[v] = u;
        queue.push_back(v);
      }
    }
  }
}

}  // namespace

LongestPath longest_path_length(const ClickstreamGraph& graph) {
  LongestPath result;
  const std::size_t n = graph.vertex_count();
  if (n == 0) return result;

  std::size_t best_src = 0;
  std::size_t best_dst = 0;
  std::ptrdiff_t best_dist = 0;
  std::vector<std::ptrdiff_t> dist;
  std::vector<std::size_t> pred;
  for (std::size_t s = 0; s < n; ++s) {
    bfs(graph, s, dist, pred);
    for (std::size_t v = 0; v < n; ++v) {
      if (dist[v] > best_dist) {
        best_dist = dist[v];
        best_src = s;
        best_dst = v;
      }
    }
  }

  bfs(graph, best_src, dist, pred);
  std::vector<std::size_t> path;
  for (std::size_t at = best_dst;; at = pred[at]) {
    path.push_back(at);
    if (at == best_src) break;
  }
  std::reverse(path.begin(), path.end());
  result.length = static_cast<std::size_t>(best_dist) + 1;
  result.witness = std::move(path);
  return result;
}

std::size_t domains_in_path(std::span<const std::string> path_urls, const SuffixList& suffixes) {
  if (path_urls.empty()) throw std::invalid_argument("domains_in_path: empty path");
  std::set<Domain> domains;
  for (const auto& url : path_urls) domains.insert(extract_domain(url, suffixes));
  return domains.size();
}

std::vector<std::vector<std::size_t>> wcc_partition(const ClickstreamGraph& graph) {
  const std::size_t n = graph.vertex_count();
  std::vector<std::vector<std::size_t>> components;
  std::vector<bool> seen(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> component;
    std::deque<std::size_t> queue{s};
    seen[s] = true;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      component.push_back(u);
      for (const auto* adj : {&graph.out_edges()[u], &graph.in_edges()[u]}) {
        for (std::size_t v : *adj) {
          if (!seen[v]) {
            seen[v] = true;
            queue.push_back(v);
          }
        }
      }
    }
    std::sort(component.begin(), component.end());
    components.push_back(std::move(component));
  }
  std::stable_sort(components.begin(), components.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
  return components;
}

double biggest_wcc_ratio(const ClickstreamGraph& graph) {
  if (graph.vertex_count() == 0) throw std::invalid_argument("biggest_wcc_ratio: empty graph");
  const auto components = wcc_partition(graph);
  return static_cast<double>(components.front().size()) /
         static_cast<double>(graph.vertex_count());
}

std::vector<ConsumptionRow> daily_consumption(std::span<const ClickstreamGraph> graphs,
                                              const SuffixList& suffixes) {
  std::vector<ConsumptionRow> rows;
  for (const auto& g : graphs) {
    ConsumptionRow row;
    row.browser = g.browser;
    row.day = g.day;
    std::set<Domain> domains;
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      if (g.visit_counts()[v] == 0) continue;  // referer-only vertices don't count as pages
      ++row.pages;
      row.actions += g.visit_counts()[v];
      domains.insert(extract_domain(g.vertex_urls()[v], suffixes));
    }
    if (row.pages == 0) continue;
    row.domains = domains.size();
    row.revisit_ratio = static_cast<double>(row.actions) / static_cast<double>(row.pages);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_graph(std::ostream& out, const ClickstreamGraph& graph) {
  out << "# " << to_hex16(browser_hash(graph.browser)) << ' ' << day_string(graph.day) << '\n';
  std::string line;
  for (std::size_t u = 0; u < graph.vertex_count(); ++u) {
    for (std::size_t v : graph.out_edges()[u]) {
      line.clear();
      line += graph.vertex_urls()[u];
      line.push_back('\t');
      line += graph.vertex_urls()[v];
      line.push_back('\n');
      out << line;
    }
  }
  for (std::size_t u = 0; u < graph.vertex_count(); ++u) {
    if (graph.out_edges()[u].empty() && graph.in_edges()[u].empty()) {
      out << graph.vertex_urls()[u] << '\n';
    }
  }
}

ClickstreamGraph read_graph(std::istream& in) {
  std::string line;
  BrowserId browser;
  std::int64_t day = 0;
  std::set<std::string> urls;
  std::set<std::string> edge_targets;
  std::set<std::string> isolated;
  std::vector<std::pair<std::string, std::string>> edges;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto parts = split(trim(std::string_view(line).substr(1)), ' ');
      if (parts.size() != 2) throw ParseError(line_no, "graph header needs '# browser_hash day'");
      browser.household_id = std::string(parts[0]);  // hash stands in for the pair
      const auto d = day_index_from_string(parts[1]);
      if (!d) throw ParseError(line_no, "bad day in graph header");
      day = *d;
      header_seen = true;
      continue;
    }
    const auto cols = split(line, '\t');
    if (cols.size() == 1) {
      urls.insert(std::string(cols[0]));
      isolated.insert(std::string(cols[0]));
    } else if (cols.size() == 2) {
      urls.insert(std::string(cols[0]));
      urls.insert(std::string(cols[1]));
      edge_targets.insert(std::string(cols[1]));
      edges.emplace_back(std::string(cols[0]), std::string(cols[1]));
    } else {
      throw ParseError(line_no, "graph line needs 1 or 2 columns");
    }
  }
  if (!header_seen) throw std::invalid_argument("graph file missing '#' header");

  std::vector<std::string> sorted_urls(urls.begin(), urls.end());
  std::vector<std::size_t> visits;
  visits.reserve(sorted_urls.size());
  for (const auto& url : sorted_urls) {
    const bool source_only = !edge_targets.count(url) && !isolated.count(url);
    visits.push_back(source_only ? 0 : 1);
  }
  auto index_of = [&](const std::string& url) {
    return static_cast<std::size_t>(
        std::lower_bound(sorted_urls.begin(), sorted_urls.end(), url) - sorted_urls.begin());
  };
  std::vector<std::pair<std::size_t, std::size_t>> indexed;
  indexed.reserve(edges.size());
  for (const auto& [u, v] : edges) indexed.emplace_back(index_of(u), index_of(v));
  return ClickstreamGraph::assemble(std::move(browser), day, std::move(sorted_urls),
                                    std::move(visits), indexed);
}

}  // namespace cstream
