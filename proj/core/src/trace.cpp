#include "cstream/trace.hpp"

#include <algorithm>
#include <istream>
#include <numeric>

#include "cstream/util.hpp"

namespace cstream {

std::uint64_t browser_hash(const BrowserId& id) {
  std::string key = id.household_id;
  key.push_back('\x1f');
  key += id.user_agent;
  return fnv1a64(key);
}

std::string_view device_class_name(DeviceClass c) {
  switch (c) {
    case DeviceClass::PC: return "pc";
    case DeviceClass::Smartphone: return "smartphone";
    case DeviceClass::Tablet: return "tablet";
    case DeviceClass::Other: return "other";
  }
  return "other";
}

std::optional<DeviceClass> device_class_from_name(std::string_view name) {
  if (name == "pc") return DeviceClass::PC;
  if (name == "smartphone") return DeviceClass::Smartphone;
  if (name == "tablet") return DeviceClass::Tablet;
  if (name == "other") return DeviceClass::Other;
  return std::nullopt;
}

namespace {

constexpr std::string_view kAbsent = "-";

bool is_absent(std::string_view field) { return field.empty() || field == kAbsent; }

std::string_view field_at(const std::vector<std::string_view>& cols, int idx) {
  return cols[static_cast<std::size_t>(idx)];
}

}  // namespace

HttpRecord parse_log_line(std::string_view line, const LogSchema& schema, std::size_t line_no) {
  const auto cols = split(line, '\t');
  if (cols.size() != static_cast<std::size_t>(schema.columns)) {
    throw ParseError(line_no, "expected " + std::to_string(schema.columns) + " columns, got " +
                                  std::to_string(cols.size()));
  }

  HttpRecord r;
  const auto ts = parse_i64(field_at(cols, schema.timestamp));
  if (!ts || *ts <= 0) throw ParseError(line_no, "malformed timestamp");
  r.timestamp_ms = *ts;

  r.household_id = std::string(field_at(cols, schema.household));
  r.user_agent = std::string(field_at(cols, schema.user_agent));

  const auto url = field_at(cols, schema.url);
  if (url.empty()) throw ParseError(line_no, "empty url");
  r.url = std::string(url);

  const auto referer = field_at(cols, schema.referer);
  if (!is_absent(referer)) r.referer = std::string(referer);

  const auto ctype = field_at(cols, schema.content_type);
  if (!is_absent(ctype)) r.content_type = std::string(ctype);

  const auto clen = field_at(cols, schema.content_length);
  if (!is_absent(clen)) {
    const auto v = parse_i64(clen);
    if (!v || *v < 0) throw ParseError(line_no, "malformed content length");
    r.content_length = *v;
  }

  const auto status = field_at(cols, schema.status_code);
  if (!is_absent(status)) {
    const auto v = parse_i64(status);
    if (!v || *v < 100 || *v > 599) throw ParseError(line_no, "status code outside 100..599");
    r.status_code = static_cast<int>(*v);
  }
  return r;
}

namespace {

void append_record_fields(std::string& out, const HttpRecord& r) {
  out += format_i64(r.timestamp_ms);
  out.push_back('\t');
  out += r.household_id;
  out.push_back('\t');
  out += r.user_agent;
  out.push_back('\t');
  out += r.url;
  out.push_back('\t');
  out += r.referer ? *r.referer : std::string(kAbsent);
  out.push_back('\t');
  out += r.content_type ? *r.content_type : std::string(kAbsent);
  out.push_back('\t');
  out += r.content_length ? format_i64(*r.content_length) : std::string(kAbsent);
  out.push_back('\t');
  out += r.status_code ? format_i64(*r.status_code) : std::string(kAbsent);
}

}  // namespace

std::string format_log_line(const HttpRecord& r) {
  std::string out;
  append_record_fields(out, r);
  return out;
}

std::string format_log_line(const HttpRecord& r, std::string_view label) {
  std::string out;
  append_record_fields(out, r);
  out.push_back('\t');
  out += label;
  return out;
}

WebPage normalize_url(std::string_view url) {
  const std::size_t cut = url.find_first_of("?#");
  return WebPage{std::string(url.substr(0, cut))};
}

std::string url_host(std::string_view url) {
  const std::size_t scheme = url.find("://");
  if (scheme == std::string_view::npos) return "";
  std::string_view rest = url.substr(scheme + 3);
  const std::size_t end = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, end);
  const std::size_t at = authority.rfind('@');
  if (at != std::string_view::npos) authority.remove_prefix(at + 1);
  if (!authority.empty() && authority.front() == '[') {
    // IPv6 literal: keep the bracketed address, drop any port
    const std::size_t close = authority.find(']');
    if (close != std::string_view::npos) return to_lower(authority.substr(0, close + 1));
    return to_lower(authority);
  }
  const std::size_t colon = authority.find(':');
  if (colon != std::string_view::npos) authority = authority.substr(0, colon);
  return to_lower(authority);
}

namespace {

bool is_ipv4_literal(std::string_view host) {
  int labels = 0;
  for (const auto part : split(host, '.')) {
    if (part.empty() || part.size() > 3) return false;
    for (char c : part) {
      if (c < '0' || c > '9') return false;
    }
    ++labels;
  }
  return labels == 4;
}

}  // namespace

Domain extract_domain(std::string_view url, const SuffixList& suffixes) {
  const std::string host = url_host(url);
  if (host.empty()) throw std::invalid_argument("extract_domain: no host component in '" + std::string(url) + "'");

  if (host.front() == '[' || is_ipv4_literal(host)) return Domain{host};

  const auto labels = split(host, '.');
  if (labels.size() < 2) return Domain{host};

  // longest public suffix that matches a proper suffix of the host
  std::size_t suffix_labels = 1;  // default: plain TLD
  if (!suffixes.empty()) {
    std::size_t best = 0;
    std::string candidate;
    for (std::size_t take = 1; take < labels.size(); ++take) {
      candidate.clear();
      for (std::size_t i = labels.size() - take; i < labels.size(); ++i) {
        if (!candidate.empty()) candidate.push_back('.');
        candidate += std::string(labels[i]);
      }
      if (suffixes.count(candidate)) best = take;
    }
    if (best > 0) suffix_labels = best;
  }
  const std::size_t keep = std::min(labels.size(), suffix_labels + 1);
  std::string out;
  for (std::size_t i = labels.size() - keep; i < labels.size(); ++i) {
    if (!out.empty()) out.push_back('.');
    out += std::string(labels[i]);
  }
  return Domain{out};
}

SuffixList load_suffix_list(std::istream& in) {
  SuffixList out;
  std::string line;
  while (std::getline(in, line)) {
    const auto entry = trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    out.insert(to_lower(entry));
  }
  return out;
}

const DeviceRules& default_device_rules() {
  // Ordered; "Mobile" before "Android" sorts Android phones from tablets.
  static const DeviceRules rules = {
      {"Windows Phone", DeviceClass::Smartphone},
      {"iPhone", DeviceClass::Smartphone},
      {"iPod", DeviceClass::Smartphone},
      {"iPad", DeviceClass::Tablet},
      {"Tablet", DeviceClass::Tablet},
      {"Kindle", DeviceClass::Tablet},
      {"Mobile", DeviceClass::Smartphone},
      {"Android", DeviceClass::Tablet},
      {"Windows NT", DeviceClass::PC},
      {"Macintosh", DeviceClass::PC},
      {"X11", DeviceClass::PC},
      {"Linux", DeviceClass::PC},
  };
  return rules;
}

DeviceRules load_device_rules(std::istream& in) {
  DeviceRules rules;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto entry = trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    const auto cols = split(entry, '\t');
    if (cols.size() != 2) throw ParseError(line_no, "device rule needs 'pattern<TAB>class'");
    const auto cls = device_class_from_name(trim(cols[1]));
    if (!cls) throw ParseError(line_no, "unknown device class '" + std::string(cols[1]) + "'");
    rules.push_back({std::string(trim(cols[0])), *cls});
  }
  return rules;
}

DeviceClass classify_device(std::string_view user_agent, const DeviceRules& rules) {
  for (const auto& rule : rules) {
    if (user_agent.find(rule.pattern) != std::string_view::npos) return rule.device;
  }
  return DeviceClass::Other;
}

double referer_missing_ratio(const std::vector<HttpRecord>& records) {
  if (records.empty()) throw std::invalid_argument("referer_missing_ratio: empty input");
  const auto missing = std::count_if(records.begin(), records.end(),
                                     [](const HttpRecord& r) { return !r.referer.has_value(); });
  return static_cast<double>(missing) / static_cast<double>(records.size());
}

std::vector<HttpRecord> filter_abnormal_browsers(const std::vector<HttpRecord>& records,
                                                 double threshold, FilterReport* report) {
  struct Tally {
    std::size_t total = 0;
    std::size_t missing = 0;
  };
  std::map<BrowserId, Tally> tallies;
  for (const auto& r : records) {
    auto& t = tallies[BrowserId{r.household_id, r.user_agent}];
    ++t.total;
    if (!r.referer) ++t.missing;
  }

  std::set<BrowserId> dropped;
  for (const auto& [browser, t] : tallies) {
    const double ratio = static_cast<double>(t.missing) / static_cast<double>(t.total);
    if (ratio >= threshold) {
      dropped.insert(browser);
      if (report) report->removed.push_back({browser, ratio, t.total});
    }
  }

  std::vector<HttpRecord> kept;
  kept.reserve(records.size());
  for (const auto& r : records) {
    if (dropped.count(BrowserId{r.household_id, r.user_agent})) {
      if (report) ++report->records_removed;
    } else {
      kept.push_back(r);
    }
  }
  if (report) report->records_kept = kept.size();
  return kept;
}

LogReadResult read_log(std::istream& in, const LogSchema& schema, bool skip_malformed) {
  LogReadResult out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    try {
      out.records.push_back(parse_log_line(line, schema, line_no));
      out.line_numbers.push_back(line_no);
      if (schema.label >= 0) {
        const auto cols = split(line, '\t');
        out.labels.emplace_back(cols[static_cast<std::size_t>(schema.label)]);
      }
    } catch (const ParseError& e) {
      if (!skip_malformed) throw;
      ++out.lines_skipped;
      if (out.skip_reasons.size() < 10) out.skip_reasons.emplace_back(e.what());
    }
  }
  return out;
}

std::vector<std::size_t> browser_sort_order(const std::vector<HttpRecord>& records) {
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = records[a];
    const auto& rb = records[b];
    const auto ka = std::tie(ra.household_id, ra.user_agent, ra.timestamp_ms, a);
    const auto kb = std::tie(rb.household_id, rb.user_agent, rb.timestamp_ms, b);
    return ka < kb;
  });
  return order;
}

void sort_records_per_browser(std::vector<HttpRecord>& records) {
  const auto order = browser_sort_order(records);
  std::vector<HttpRecord> sorted;
  sorted.reserve(records.size());
  for (std::size_t i : order) sorted.push_back(std::move(records[i]));
  records = std::move(sorted);
}

std::vector<std::pair<std::size_t, std::size_t>> browser_partitions(
    const std::vector<HttpRecord>& records) {
  std::vector<std::pair<std::size_t, std::size_t>> parts;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= records.size(); ++i) {
    if (i == records.size() || records[i].household_id != records[begin].household_id ||
        records[i].user_agent != records[begin].user_agent) {
      parts.emplace_back(begin, i);
      begin = i;
    }
  }
  return parts;
}

}  // namespace cstream
