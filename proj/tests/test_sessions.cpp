#include <doctest.h>

#include <random>
#include <sstream>

#include "cstream/sessions.hpp"

using namespace cstream;

namespace {
const BrowserId kBrowser{"H1", "UA"};
}

TEST_CASE("think_times") {
  const std::int64_t ts[] = {0, 60'000, 90'000};
  CHECK(think_times(ts) == std::vector<double>{60.0, 30.0});

  const std::int64_t one[] = {42'000};
  CHECK(think_times(one).empty());

  const std::int64_t unsorted[] = {60'000, 0};
  CHECK_THROWS_AS(think_times(unsorted), std::invalid_argument);
}

TEST_CASE("segment_sessions") {
  SUBCASE("10 and 40 minute gaps split into sizes 2 and 1") {
    const std::int64_t ts[] = {0, 600'000, 3'000'000};
    const auto sessions = segment_sessions(kBrowser, ts);
    REQUIRE(sessions.size() == 2);
    CHECK(sessions[0].action_count == 2);
    CHECK(sessions[0].start_ts == 0);
    CHECK(sessions[0].end_ts == 600'000);
    CHECK(sessions[1].action_count == 1);
    CHECK(sessions[1].duration_s() == 0.0);
  }
  SUBCASE("a gap of exactly 30 minutes continues the session") {
    const std::int64_t ts[] = {0, 1'800'000};
    CHECK(segment_sessions(kBrowser, ts).size() == 1);
  }
  SUBCASE("boundary second by second") {
    const std::int64_t a[] = {0, 1'799'000};  // 29:59
    const std::int64_t b[] = {0, 1'800'000};  // 30:00
    const std::int64_t c[] = {0, 1'801'000};  // 30:01
    CHECK(segment_sessions(kBrowser, a).size() == 1);
    CHECK(segment_sessions(kBrowser, b).size() == 1);
    CHECK(segment_sessions(kBrowser, c).size() == 2);
  }
  SUBCASE("single action has duration 0") {
    const std::int64_t ts[] = {5'000};
    const auto sessions = segment_sessions(kBrowser, ts);
    REQUIRE(sessions.size() == 1);
    CHECK(sessions[0].duration_s() == 0.0);
    CHECK(sessions[0].action_count == 1);
  }
  SUBCASE("empty input gives empty output") {
    CHECK(segment_sessions(kBrowser, {}).empty());
  }
}

TEST_CASE("idle_times") {
  std::vector<Session> sessions{
      {kBrowser, 0, 0, 1},
      {kBrowser, 10'800'000, 10'900'000, 2},
  };
  CHECK(idle_times(sessions) == std::vector<double>{10'800.0});

  std::vector<Session> one{{kBrowser, 0, 0, 1}};
  CHECK(idle_times(one).empty());
}

TEST_CASE("session invariants on random timelines") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::int64_t> ts;
    std::int64_t t = 1'000;
    const std::size_t n = 1 + rng() % 60;
    for (std::size_t i = 0; i < n; ++i) {
      t += static_cast<std::int64_t>(rng() % 3'000'000);
      ts.push_back(t);
    }
    const auto sessions = segment_sessions(kBrowser, ts);

    std::size_t total = 0;
    for (const auto& s : sessions) total += s.action_count;
    CHECK(total == ts.size());

    // deltas within a session never exceed the gap; across sessions they do
    std::size_t at = 0;
    for (std::size_t s = 0; s < sessions.size(); ++s) {
      for (std::size_t i = 1; i < sessions[s].action_count; ++i) {
        CHECK(ts[at + i] - ts[at + i - 1] <= 1'800'000);
      }
      at += sessions[s].action_count;
      if (s + 1 < sessions.size()) CHECK(ts[at] - ts[at - 1] > 1'800'000);
    }

    for (double idle : idle_times(sessions)) CHECK(idle > 1'800.0);

    // re-segmenting each session's own actions changes nothing
    at = 0;
    for (const auto& s : sessions) {
      const std::span<const std::int64_t> slice(ts.data() + at, s.action_count);
      const auto again = segment_sessions(kBrowser, slice);
      REQUIRE(again.size() == 1);
      CHECK(again[0] == s);
      at += s.action_count;
    }
  }
}

TEST_CASE("sessions CSV dump") {
  std::vector<SessionRow> rows{{{kBrowser, 0, 60'000, 3}, DeviceClass::PC}};
  std::ostringstream out;
  write_sessions_csv(out, rows);
  const std::string text = out.str();
  CHECK(text.find("household_id,user_agent_hash,device_class,start_ts,end_ts,action_count\n") == 0);
  CHECK(text.find("H1,") != std::string::npos);
  CHECK(text.find(",pc,0,60000,3\n") != std::string::npos);
}
