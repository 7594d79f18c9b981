#include <doctest.h>

#include <random>
#include <sstream>

#include "cstream/generator.hpp"
#include "cstream/history.hpp"
#include "oracles.hpp"

using namespace cstream;

namespace {

HttpRecord rec(std::int64_t ts, const char* url, const char* referer = nullptr, int status = 0) {
  HttpRecord r;
  r.timestamp_ms = ts;
  r.household_id = "H1";
  r.user_agent = "UA";
  r.url = url;
  if (referer) r.referer = referer;
  if (status) r.status_code = status;
  return r;
}

HistoryEntry entry(std::int64_t ts, const char* url) {
  HistoryEntry e;
  e.timestamp_ms = ts;
  e.url = url;
  return e;
}

}  // namespace

TEST_CASE("match_history labels URL+time matches") {
  const std::vector<HistoryEntry> history{entry(100'000, "http://a.com/p")};
  const std::vector<HttpRecord> records{
      rec(100'400, "http://a.com/p"),
      rec(100'500, "http://cdn.com/img.png", "http://a.com/p"),
  };
  MatchReport report;
  const auto labels = match_history(history, records, 10.0, &report);
  CHECK(labels[0] == Label::user_action);
  CHECK(labels[1] == Label::automatic);
  CHECK(report.entries_matched == 1);
  CHECK(report.chain_matches == 0);
}

TEST_CASE("the last request of a redirection chain gets the label") {
  SUBCASE("history holds only the terminal url") {
    const std::vector<HistoryEntry> history{entry(1'000, "http://b.com/long")};
    const std::vector<HttpRecord> records{
        rec(1'000, "http://short.io/x", nullptr, 301),
        rec(1'200, "http://b.com/long", "http://short.io/x", 200),
    };
    const auto labels = match_history(history, records, 10.0);
    CHECK(labels[0] == Label::automatic);
    CHECK(labels[1] == Label::user_action);
  }
  SUBCASE("a terminal outside direct tolerance still matches through the chain") {
    // the click is logged at chain start; the terminal lands 15 s later
    const std::vector<HistoryEntry> history{entry(1'000, "http://b.com/long")};
    const std::vector<HttpRecord> records{
        rec(1'000, "http://short.io/x", nullptr, 302),
        rec(9'500, "http://hop.io/y", "http://short.io/x", 301),
        rec(16'000, "http://b.com/long", "http://hop.io/y", 200),
    };
    MatchReport report;
    const auto labels = match_history(history, records, 10.0, &report);
    CHECK(labels[2] == Label::user_action);
    CHECK(report.chain_matches == 1);
  }
  SUBCASE("a non-3xx predecessor breaks the chain") {
    const std::vector<HistoryEntry> history{entry(1'000, "http://b.com/long")};
    const std::vector<HttpRecord> records{
        rec(1'000, "http://short.io/x", nullptr, 200),
        rec(16'000, "http://b.com/long", "http://short.io/x", 200),
    };
    const auto labels = match_history(history, records, 10.0);
    CHECK(labels[1] == Label::automatic);
  }
}

TEST_CASE("match_history edge cases") {
  SUBCASE("records without history counterparts stay automatic") {
    const std::vector<HistoryEntry> history{entry(1'000, "http://a.com/p")};
    const auto labels = match_history(history, {rec(1'000, "http://other.com/x")}, 10.0);
    CHECK(labels[0] == Label::automatic);
  }
  SUBCASE("an entry labels only its nearest record") {
    const std::vector<HistoryEntry> history{entry(10'000, "http://a.com/p")};
    const std::vector<HttpRecord> records{
        rec(5'000, "http://a.com/p"),
        rec(11'000, "http://a.com/p"),
    };
    const auto labels = match_history(history, records, 10.0);
    CHECK(labels[0] == Label::automatic);
    CHECK(labels[1] == Label::user_action);
  }
  SUBCASE("revisits match one-to-one") {
    const std::vector<HistoryEntry> history{entry(10'000, "http://a.com/p"),
                                            entry(20'000, "http://a.com/p")};
    const std::vector<HttpRecord> records{
        rec(10'100, "http://a.com/p"),
        rec(20'100, "http://a.com/p"),
    };
    const auto labels = match_history(history, records, 10.0);
    CHECK(labels[0] == Label::user_action);
    CHECK(labels[1] == Label::user_action);
  }
  SUBCASE("unsorted inputs throw") {
    const std::vector<HistoryEntry> bad{entry(2'000, "http://a.com"), entry(1'000, "http://b.com")};
    CHECK_THROWS_AS(match_history(bad, {}, 10.0), std::invalid_argument);
    const std::vector<HttpRecord> unsorted{rec(2'000, "http://a.com"), rec(1'000, "http://b.com")};
    CHECK_THROWS_AS(match_history({}, unsorted, 10.0), std::invalid_argument);
  }
  SUBCASE("labeled count never exceeds the entry count") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<HistoryEntry> history;
      std::vector<HttpRecord> records;
      std::int64_t t = 1'000;
      for (int i = 0; i < 30; ++i) {
        t += 4'000 + static_cast<std::int64_t>(rng() % 30'000);
        const std::string url = "http://s.com/p" + std::to_string(rng() % 6);
        if (rng() % 3 == 0) history.push_back(entry(t, url.c_str()));
        records.push_back(rec(t + static_cast<std::int64_t>(rng() % 3'000), url.c_str()));
      }
      const auto labels = match_history(history, records, 10.0);
      const auto labeled = static_cast<std::size_t>(
          std::count(labels.begin(), labels.end(), Label::user_action));
      CHECK(labeled <= history.size());
    }
  }
  SUBCASE("appending unrelated records does not disturb labels") {
    const std::vector<HistoryEntry> history{entry(10'000, "http://a.com/p")};
    std::vector<HttpRecord> records{rec(10'100, "http://a.com/p")};
    const auto before = match_history(history, records, 10.0);
    records.push_back(rec(50'000, "http://elsewhere.org/z"));
    const auto after = match_history(history, records, 10.0);
    CHECK(after[0] == before[0]);
    CHECK(after[1] == Label::automatic);
  }
}

TEST_CASE("match_history recovers generated user-actions") {
  GenConfig config;
  config.seed = 1234;
  config.n_browsers = 6;
  config.children_per_action_mean = 10;
  config.history_jitter_s = 2.0;
  const GeneratedTrace trace = generate(config);

  std::vector<HttpRecord> records = trace.records;
  std::vector<Label> truth = trace.labels;
  const auto order = browser_sort_order(records);
  std::vector<HttpRecord> sorted;
  std::vector<Label> sorted_truth;
  for (std::size_t i : order) {
    sorted.push_back(records[i]);
    sorted_truth.push_back(truth[i]);
  }

  std::size_t truth_actions = 0;
  std::size_t recovered = 0;
  const auto parts = browser_partitions(sorted);
  for (const auto& [begin, end] : parts) {
    const BrowserId browser{sorted[begin].household_id, sorted[begin].user_agent};
    const std::vector<HttpRecord> chunk(sorted.begin() + static_cast<std::ptrdiff_t>(begin),
                                        sorted.begin() + static_cast<std::ptrdiff_t>(end));
    const auto labels = match_history(trace.history.at(browser), chunk, 10.0);
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      if (sorted_truth[begin + i] == Label::user_action) {
        ++truth_actions;
        if (labels[i] == Label::user_action) ++recovered;
      }
    }
  }
  REQUIRE(truth_actions > 100);
  CHECK(static_cast<double>(recovered) / static_cast<double>(truth_actions) >= 0.99);
}

TEST_CASE("history TSV round trip") {
  std::vector<HistoryEntry> entries{entry(1'000, "http://a.com/p"), entry(2'000, "http://b.com/q")};
  entries[0].transition = "link";
  std::ostringstream out;
  write_history(out, entries);
  std::istringstream in(out.str());
  CHECK(read_history(in) == entries);

  std::istringstream bad("abc\thttp://a.com\n");
  CHECK_THROWS_AS(read_history(bad), ParseError);
}
