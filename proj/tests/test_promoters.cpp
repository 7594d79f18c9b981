#include <doctest.h>

#include <random>
#include <sstream>

#include "cstream/promoters.hpp"
#include "oracles.hpp"

using namespace cstream;

namespace {

ClickstreamGraph graph_of(std::vector<std::string> urls, std::vector<std::size_t> visits,
                          std::vector<std::pair<std::size_t, std::size_t>> edges) {
  std::vector<std::size_t> order(urls.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return urls[a] < urls[b]; });
  std::vector<std::size_t> rank(urls.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
  std::vector<std::string> sorted_urls;
  std::vector<std::size_t> sorted_visits;
  for (std::size_t i : order) {
    sorted_urls.push_back(urls[i]);
    sorted_visits.push_back(visits[i]);
  }
  for (auto& [u, v] : edges) {
    u = rank[u];
    v = rank[v];
  }
  return ClickstreamGraph::assemble(BrowserId{"H1", "UA"}, 0, std::move(sorted_urls),
                                    std::move(sorted_visits), edges);
}

}  // namespace

TEST_CASE("promoter config parsing") {
  std::istringstream in(
      "# promoters\n"
      "[search_engines]\n"
      "google.it\n"
      "bing.com\n"
      "[social_networks]\n"
      "facebook.com\n");
  const auto config = load_promoter_config(in);
  CHECK(config.search_engines.size() == 2);
  CHECK(config.is_search_engine(Domain{"google.it"}));
  CHECK(config.is_social_network(Domain{"facebook.com"}));
  CHECK(config.is_promoter(Domain{"bing.com"}));
  CHECK_FALSE(config.is_promoter(Domain{"other.org"}));

  std::istringstream overlapping("[search_engines]\nboth.com\n[social_networks]\nboth.com\n");
  CHECK_THROWS_AS(load_promoter_config(overlapping), std::invalid_argument);

  std::istringstream stray("google.it\n");
  CHECK_THROWS_AS(load_promoter_config(stray), ParseError);
}

TEST_CASE("promoter_ranking") {
  const SuffixList none;
  SUBCASE("counts distinct promoted domains over the universe") {
    // se.com -> a.com, se.com -> b.com, a.com -> b.com
    const auto g = graph_of({"http://se.com/s", "http://a.com/1", "http://b.com/1"}, {1, 1, 1},
                            {{0, 1}, {0, 2}, {1, 2}});
    const std::vector<ClickstreamGraph> graphs{g};
    const auto ranking = promoter_ranking(graphs, none);
    REQUIRE(ranking.size() == 2);
    CHECK(ranking[0].domain.label == "se.com");
    CHECK(ranking[0].promoted == 2);
    CHECK(ranking[0].fraction == doctest::Approx(2.0 / 3.0));
    CHECK(ranking[1].domain.label == "a.com");
    CHECK(ranking[1].fraction == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("intra-domain parents rank with zero promoted domains") {
    const auto g = graph_of({"http://one.com/a", "http://one.com/b"}, {1, 1}, {{0, 1}});
    const std::vector<ClickstreamGraph> graphs{g};
    const auto ranking = promoter_ranking(graphs, none);
    REQUIRE(ranking.size() == 1);
    CHECK(ranking[0].domain.label == "one.com");
    CHECK(ranking[0].promoted == 0);
    CHECK(ranking[0].fraction == 0.0);
  }
  SUBCASE("order of graphs does not matter") {
    std::mt19937_64 rng(81);
    std::vector<ClickstreamGraph> graphs;
    for (int i = 0; i < 6; ++i) graphs.push_back(oracle::random_graph(rng, 8).graph);
    auto shuffled = graphs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto a = promoter_ranking(graphs, none);
    const auto b = promoter_ranking(shuffled, none);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].domain == b[i].domain);
      CHECK(a[i].fraction == b[i].fraction);
    }
  }
}

TEST_CASE("promoter_fractions") {
  PromoterConfig config;
  config.search_engines = {Domain{"se.com"}};
  config.social_networks = {Domain{"osn.com"}};
  const SuffixList none;

  SUBCASE("path enumeration on the toy graph") {
    // P(SE) -> A -> B, plus isolated C
    const auto g = graph_of(
        {"http://se.com/q", "http://a.com/1", "http://b.com/1", "http://c.com/1"}, {1, 1, 1, 1},
        {{0, 1}, {1, 2}});
    const auto f = promoter_fractions(g, config, none);
    CHECK(f.direct_se == doctest::Approx(1.0 / 3.0));
    CHECK(f.reachable_se == doctest::Approx(2.0 / 3.0));
    CHECK(f.direct_osn == 0.0);
    CHECK(f.reachable_osn == 0.0);
  }
  SUBCASE("no promoter vertices means all four are zero") {
    const auto g = graph_of({"http://a.com/1", "http://b.com/1"}, {1, 1}, {{0, 1}});
    const auto f = promoter_fractions(g, config, none);
    CHECK(f.direct_se == 0.0);
    CHECK(f.reachable_se == 0.0);
    CHECK(f.direct_osn == 0.0);
    CHECK(f.reachable_osn == 0.0);
  }
  SUBCASE("a referer-only promoter hub still promotes") {
    const auto g = graph_of({"http://se.com/q", "http://a.com/1"}, {0, 1}, {{0, 1}});
    const auto f = promoter_fractions(g, config, none);
    CHECK(f.direct_se == 1.0);  // denominator is just a.com
    CHECK(f.reachable_se == 1.0);
  }
  SUBCASE("when every OSN child is a leaf, reachable equals direct") {
    const auto g = graph_of(
        {"http://osn.com/feed", "http://x.com/1", "http://y.com/1", "http://z.com/1"},
        {1, 1, 1, 1}, {{0, 1}, {0, 2}});
    const auto f = promoter_fractions(g, config, none);
    CHECK(f.direct_osn == f.reachable_osn);
    CHECK(f.direct_osn == doctest::Approx(2.0 / 3.0));
  }
  SUBCASE("reachable is never below direct on random graphs") {
    std::mt19937_64 rng(82);
    PromoterConfig rnd_config;
    rnd_config.search_engines = {Domain{"site00.com"}, Domain{"site03.com"}};
    rnd_config.social_networks = {Domain{"site01.com"}};
    for (int trial = 0; trial < 2'000; ++trial) {
      const auto rg = oracle::random_graph(rng, 10);
      const auto f = promoter_fractions(rg.graph, rnd_config, none);
      CHECK(f.reachable_se >= f.direct_se);
      CHECK(f.reachable_osn >= f.direct_osn);
      CHECK(f.reachable_se <= 1.0);
      CHECK(f.reachable_osn <= 1.0);
    }
  }
}

TEST_CASE("promoter_fraction_table applies the page threshold") {
  PromoterConfig config;
  config.search_engines = {Domain{"se.com"}};
  config.min_pages_per_graph = 3;
  const SuffixList none;

  const auto small = graph_of({"http://se.com/q", "http://a.com/1"}, {1, 1}, {{0, 1}});
  const auto big = graph_of(
      {"http://se.com/q", "http://a.com/1", "http://b.com/1", "http://c.com/1"}, {1, 1, 1, 1},
      {{0, 1}, {0, 2}, {0, 3}});
  const std::vector<ClickstreamGraph> graphs{small, big};
  const auto table = promoter_fraction_table(graphs, config, none);
  CHECK(table.graphs_filtered == 1);
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0].fractions.direct_se == 1.0);
}
