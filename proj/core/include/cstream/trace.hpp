#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cstream {

// One parsed HTTP request/response log entry. Optionals are fields the probe
// may not have seen; absent is encoded as "-" on disk.
struct HttpRecord {
  std::int64_t timestamp_ms = 0;
  std::string household_id;
  std::string user_agent;
  std::string url;
  std::optional<std::string> referer;
  std::optional<std::string> content_type;
  std::optional<std::int64_t> content_length;
  std::optional<int> status_code;  // 100..599

  bool operator==(const HttpRecord&) const = default;
};

// A browser is the (household, user agent) pair; distinct user-agent strings
// are distinct browsers even on one household.
struct BrowserId {
  std::string household_id;
  std::string user_agent;

  bool operator==(const BrowserId&) const = default;
  auto operator<=>(const BrowserId&) const = default;
};

std::uint64_t browser_hash(const BrowserId& id);

enum class DeviceClass { PC, Smartphone, Tablet, Other };

std::string_view device_class_name(DeviceClass c);
std::optional<DeviceClass> device_class_from_name(std::string_view name);

// A web page is a URL without query parameters or fragments.
struct WebPage {
  std::string normalized_url;

  bool operator==(const WebPage&) const = default;
  auto operator<=>(const WebPage&) const = default;
};

// Registrable domain: second-level + top-level label pair (example.com),
// or the host verbatim for single labels and address literals.
struct Domain {
  std::string label;

  bool operator==(const Domain&) const = default;
  auto operator<=>(const Domain&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line_no, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + what), line_no_(line_no) {}

  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

// Column order of the tab-separated log format. Positions are 0-based; the
// default matches the documented order. `label` is present only in labeled
// dumps (classify/match output).
struct LogSchema {
  int timestamp = 0;
  int household = 1;
  int user_agent = 2;
  int url = 3;
  int referer = 4;
  int content_type = 5;
  int content_length = 6;
  int status_code = 7;
  int label = -1;  // -1: no label column
  int columns = 8;

  static LogSchema labeled() {
    LogSchema s;
    s.label = 8;
    s.columns = 9;
    return s;
  }
};

// Parses one record line. Absent optionals are "" or "-". Throws ParseError
// (carrying line_no) on malformed timestamp, wrong column count, non-integer
// or out-of-range status/length.
HttpRecord parse_log_line(std::string_view line, const LogSchema& schema, std::size_t line_no = 0);

// Inverse of parse_log_line for the default column order; append_label adds
// the trailing label column.
std::string format_log_line(const HttpRecord& r);
std::string format_log_line(const HttpRecord& r, std::string_view label);

// Truncate at the first '?' or '#'. Total on non-empty input.
WebPage normalize_url(std::string_view url);

// Host component of a URL: text after "scheme://" (and userinfo) up to the
// first '/', ':', '?' or '#'; lowercased. Empty when there is none.
std::string url_host(std::string_view url);

using SuffixList = std::set<std::string, std::less<>>;

// Longest matching public suffix plus one preceding label; with an empty
// suffix list, the last two labels. Single labels and address literals map
// to the host verbatim. Throws std::invalid_argument when there's no host.
Domain extract_domain(std::string_view url, const SuffixList& suffixes);

SuffixList load_suffix_list(std::istream& in);

struct DeviceRule {
  std::string pattern;  // case-sensitive substring of the user agent
  DeviceClass device = DeviceClass::Other;
};

using DeviceRules = std::vector<DeviceRule>;

// Shipped default table; overridable via a rule file (pattern\tclass lines).
const DeviceRules& default_device_rules();
DeviceRules load_device_rules(std::istream& in);

// First matching rule wins; no match -> Other.
DeviceClass classify_device(std::string_view user_agent, const DeviceRules& rules);

// Fraction of records without a referer. Throws on empty input.
double referer_missing_ratio(const std::vector<HttpRecord>& records);

struct RemovedBrowser {
  BrowserId browser;
  double missing_ratio = 0.0;
  std::size_t record_count = 0;
};

struct FilterReport {
  std::vector<RemovedBrowser> removed;
  std::size_t records_removed = 0;
  std::size_t records_kept = 0;
};

// Drops every browser whose missing-referer ratio reaches `threshold`;
// survivors all satisfy ratio < threshold. Keeps input order.
std::vector<HttpRecord> filter_abnormal_browsers(const std::vector<HttpRecord>& records,
                                                 double threshold, FilterReport* report = nullptr);

struct LogReadResult {
  std::vector<HttpRecord> records;
  std::vector<std::string> labels;      // parallel to records when schema has a label column
  std::vector<std::size_t> line_numbers;  // 1-based source line of each record
  std::size_t lines_skipped = 0;        // malformed lines (skip-and-count mode)
  std::vector<std::string> skip_reasons;  // first few, for diagnostics
};

// Streams a log file: '#' lines are comments, blank lines ignored. With
// skip_malformed the reader counts bad lines instead of throwing.
LogReadResult read_log(std::istream& in, const LogSchema& schema = LogSchema{},
                       bool skip_malformed = false);

// Permutation that groups records per browser, ordered by (timestamp,
// original input order) within each browser. Linking and sessionization
// require this order.
std::vector<std::size_t> browser_sort_order(const std::vector<HttpRecord>& records);

// Applies browser_sort_order in place.
void sort_records_per_browser(std::vector<HttpRecord>& records);

// Groups contiguous runs of one browser; input must be grouped (e.g. by
// sort_records_per_browser). Returns [begin,end) index pairs.
std::vector<std::pair<std::size_t, std::size_t>> browser_partitions(
    const std::vector<HttpRecord>& records);

}  // namespace cstream
