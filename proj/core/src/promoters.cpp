#include "cstream/promoters.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <map>
#include <stdexcept>

#include "cstream/util.hpp"

namespace cstream {

const PromoterConfig& default_promoter_config() {
  // Table-style defaults; the full top-50 list is deployment configuration.
  static const PromoterConfig config{
      {Domain{"google.it"}, Domain{"google.com"}, Domain{"bing.com"}, Domain{"yahoo.com"},
       Domain{"duckduckgo.com"}, Domain{"ask.com"}},
      {Domain{"facebook.com"}, Domain{"twitter.com"}, Domain{"instagram.com"},
       Domain{"linkedin.com"}, Domain{"pinterest.com"}},
      20};
  return config;
}

PromoterConfig load_promoter_config(std::istream& in) {
  PromoterConfig config;
  config.search_engines.clear();
  config.social_networks.clear();
  std::set<Domain>* section = nullptr;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto entry = trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    if (entry == "[search_engines]") {
      section = &config.search_engines;
    } else if (entry == "[social_networks]") {
      section = &config.social_networks;
    } else if (entry.front() == '[') {
      throw ParseError(line_no, "unknown section '" + std::string(entry) + "'");
    } else {
      if (!section) throw ParseError(line_no, "domain outside any section");
      section->insert(Domain{to_lower(entry)});
    }
  }
  for (const auto& d : config.search_engines) {
    if (config.social_networks.count(d)) {
      throw std::invalid_argument("promoter config: '" + d.label + "' is in both sections");
    }
  }
  return config;
}

std::vector<PromoterRank> promoter_ranking(std::span<const ClickstreamGraph> graphs,
                                           const SuffixList& suffixes) {
  std::set<Domain> universe;
  std::map<Domain, std::set<Domain>> promoted;
  for (const auto& g : graphs) {
    std::vector<Domain> domain_of(g.vertex_count());
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      domain_of[v] = extract_domain(g.vertex_urls()[v], suffixes);
      universe.insert(domain_of[v]);
    }
    for (std::size_t u = 0; u < g.vertex_count(); ++u) {
      for (std::size_t v : g.out_edges()[u]) {
        if (domain_of[u] != domain_of[v]) promoted[domain_of[u]].insert(domain_of[v]);
      }
    }
    // intra-domain-only parents still rank, with zero promoted domains
    for (std::size_t u = 0; u < g.vertex_count(); ++u) {
      if (!g.out_edges()[u].empty()) promoted.try_emplace(domain_of[u]);
    }
  }

  std::vector<PromoterRank> ranking;
  ranking.reserve(promoted.size());
  const double total = static_cast<double>(universe.size());
  for (const auto& [domain, targets] : promoted) {
    PromoterRank r;
    r.domain = domain;
    r.promoted = targets.size();
    r.fraction = total > 0 ? static_cast<double>(targets.size()) / total : 0.0;
    ranking.push_back(std::move(r));
  }
  std::sort(ranking.begin(), ranking.end(), [](const PromoterRank& a, const PromoterRank& b) {
    if (a.promoted != b.promoted) return a.promoted > b.promoted;
    return a.domain < b.domain;
  });
  return ranking;
}

PromoterFractions promoter_fractions(const ClickstreamGraph& graph, const PromoterConfig& config,
                                     const SuffixList& suffixes) {
  const std::size_t n = graph.vertex_count();
  std::vector<Domain> domain_of(n);
  std::vector<bool> is_se(n, false);
  std::vector<bool> is_osn(n, false);
  std::vector<bool> eligible(n, false);  // visited, not a promoter
  std::size_t denom = 0;
  for (std::size_t v = 0; v < n; ++v) {
    domain_of[v] = extract_domain(graph.vertex_urls()[v], suffixes);
    is_se[v] = config.is_search_engine(domain_of[v]);
    is_osn[v] = config.is_social_network(domain_of[v]);
    if (graph.visit_counts()[v] >= 1 && !is_se[v] && !is_osn[v]) {
      eligible[v] = true;
      ++denom;
    }
  }

  PromoterFractions out;
  if (denom == 0) return out;

  auto compute = [&](const std::vector<bool>& is_promoter, double& direct, double& reachable) {
    std::vector<bool> reached(n, false);
    std::deque<std::size_t> queue;
    std::size_t direct_count = 0;
    std::vector<bool> direct_hit(n, false);
    for (std::size_t p = 0; p < n; ++p) {
      if (!is_promoter[p]) continue;
      for (std::size_t v : graph.out_edges()[p]) {
        if (eligible[v] && !direct_hit[v]) {
          direct_hit[v] = true;
          ++direct_count;
        }
        if (!reached[v]) {
          reached[v] = true;
          queue.push_back(v);
        }
      }
    }
    std::size_t reachable_count = 0;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      if (eligible[u]) ++reachable_count;
      for (std::size_t v : graph.out_edges()[u]) {
        if (!reached[v]) {
          reached[v] = true;
          queue.push_back(v);
        }
      }
    }
    direct = static_cast<double>(direct_count) / static_cast<double>(denom);
    reachable = static_cast<double>(reachable_count) / static_cast<double>(denom);
  };
  compute(is_se, out.direct_se, out.reachable_se);
  compute(is_osn, out.direct_osn, out.reachable_osn);
  return out;
}

PromoterFractionTable promoter_fraction_table(std::span<const ClickstreamGraph> graphs,
                                              const PromoterConfig& config,
                                              const SuffixList& suffixes) {
  PromoterFractionTable table;
  for (const auto& g : graphs) {
    if (g.visited_page_count() < config.min_pages_per_graph) {
      ++table.graphs_filtered;
      continue;
    }
    table.rows.push_back({g.browser, g.day, promoter_fractions(g, config, suffixes)});
  }
  return table;
}

}  // namespace cstream
