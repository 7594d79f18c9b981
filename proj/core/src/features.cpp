#include "cstream/features.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "cstream/util.hpp"

namespace cstream {

std::string_view label_name(Label l) {
  return l == Label::user_action ? "user_action" : "automatic";
}

std::optional<Label> label_from_name(std::string_view name) {
  if (name == "user_action") return Label::user_action;
  if (name == "automatic") return Label::automatic;
  return std::nullopt;
}

const std::array<FeatureInfo, kFeatureCount>& feature_table() {
  static const std::array<FeatureInfo, kFeatureCount> table = {{
      {"num_children", FeatureKind::numeric},
      {"content_type", FeatureKind::categorical},
      {"dt_prev_request", FeatureKind::numeric},
      {"status_code", FeatureKind::categorical},
      {"url_length", FeatureKind::numeric},
      {"dt_sibling", FeatureKind::numeric},
      {"ads_in_url", FeatureKind::boolean},
      {"dt_parent", FeatureKind::numeric},
      {"content_length", FeatureKind::numeric},
      {"parent_status_code", FeatureKind::categorical},
      {"has_referer", FeatureKind::boolean},
      {"max_dt_child", FeatureKind::numeric},
      {"parent_content_type", FeatureKind::categorical},
      {"ads_in_referer", FeatureKind::boolean},
      {"max_length_child", FeatureKind::numeric},
      {"min_dt_child", FeatureKind::numeric},
      {"parent_content_length", FeatureKind::numeric},
  }};
  return table;
}

std::optional<std::size_t> feature_index(std::string_view name) {
  const auto& table = feature_table();
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<LinkedRequest> link_requests(std::vector<HttpRecord> records, double window_s) {
  if (window_s <= 0) throw std::invalid_argument("link_requests: window must be positive");
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].timestamp_ms < records[i - 1].timestamp_ms) {
      throw std::invalid_argument("link_requests: records not sorted by timestamp");
    }
  }
  const auto window_ms = static_cast<std::int64_t>(std::llround(window_s * 1000.0));

  std::vector<LinkedRequest> out;
  out.reserve(records.size());
  // normalized url -> most recent request index with that url
  std::unordered_map<std::string, std::size_t> last_by_url;
  // parent index -> most recent child index
  std::unordered_map<std::size_t, std::size_t> last_child_of;

  for (std::size_t i = 0; i < records.size(); ++i) {
    LinkedRequest lr;
    lr.record = std::move(records[i]);
    if (i > 0) lr.prev_request_ts = out[i - 1].record.timestamp_ms;

    if (lr.record.referer) {
      const auto target = normalize_url(*lr.record.referer);
      const auto it = last_by_url.find(target.normalized_url);
      if (it != last_by_url.end()) {
        const std::size_t p = it->second;
        if (lr.record.timestamp_ms - out[p].record.timestamp_ms <= window_ms) {
          lr.parent = p;
          const auto sib = last_child_of.find(p);
          if (sib != last_child_of.end()) lr.prev_sibling = sib->second;
          last_child_of[p] = i;
          out[p].children.push_back(i);
        }
      }
    }
    last_by_url[normalize_url(lr.record.url).normalized_url] = i;
    out.push_back(std::move(lr));
  }
  return out;
}

bool AdBlacklist::matches(std::string_view url) const {
  const std::string lowered = to_lower(url);
  for (const auto& term : terms) {
    if (lowered.find(term) != std::string::npos) return true;
  }
  return false;
}

const AdBlacklist& default_ad_blacklist() {
  static const AdBlacklist list{{
      "ads.", "/ads/", "adserv", "doubleclick", "banner", "track.", "/track",
      "analytics", "pixel", "beacon", "telemetry",
  }};
  return list;
}

AdBlacklist load_ad_blacklist(std::istream& in) {
  AdBlacklist out;
  std::string line;
  while (std::getline(in, line)) {
    const auto term = trim(line);
    if (term.empty() || term.front() == '#') continue;
    out.terms.insert(to_lower(term));
  }
  return out;
}

namespace {

double seconds_between(std::int64_t later_ms, std::int64_t earlier_ms) {
  return static_cast<double>(later_ms - earlier_ms) / 1000.0;
}

}  // namespace

std::vector<FeatureVector> extract_features(std::span<const LinkedRequest> linked,
                                            const AdBlacklist& ads) {
  std::vector<FeatureVector> out;
  out.reserve(linked.size());
  for (const auto& lr : linked) {
    const HttpRecord& r = lr.record;
    FeatureVector v;
    v.num_children = static_cast<double>(lr.children.size());
    v.content_type = r.content_type.value_or("");
    if (lr.prev_request_ts) v.dt_prev_request = seconds_between(r.timestamp_ms, *lr.prev_request_ts);
    v.status_code = r.status_code ? format_i64(*r.status_code) : "";
    v.url_length = static_cast<double>(r.url.size());
    v.ads_in_url = ads.matches(r.url);
    v.has_referer = r.referer.has_value();
    if (r.referer) v.ads_in_referer = ads.matches(*r.referer);
    if (r.content_length) v.content_length = static_cast<double>(*r.content_length);

    if (lr.parent) {
      const HttpRecord& p = linked[*lr.parent].record;
      v.dt_parent = seconds_between(r.timestamp_ms, p.timestamp_ms);
      v.parent_status_code = p.status_code ? format_i64(*p.status_code) : "";
      v.parent_content_type = p.content_type.value_or("");
      if (p.content_length) v.parent_content_length = static_cast<double>(*p.content_length);
    }
    if (lr.prev_sibling) {
      v.dt_sibling = seconds_between(r.timestamp_ms, linked[*lr.prev_sibling].record.timestamp_ms);
    }

    for (std::size_t child : lr.children) {
      const HttpRecord& c = linked[child].record;
      const double dt = seconds_between(c.timestamp_ms, r.timestamp_ms);
      if (!v.min_dt_child || dt < *v.min_dt_child) v.min_dt_child = dt;
      if (!v.max_dt_child || dt > *v.max_dt_child) v.max_dt_child = dt;
      if (c.content_length) {
        const auto len = static_cast<double>(*c.content_length);
        if (!v.max_length_child || len > *v.max_length_child) v.max_length_child = len;
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<FeatureVector> extract_features_from_log(std::vector<HttpRecord> records,
                                                     const AdBlacklist& ads, double window_s,
                                                     const std::vector<Label>* labels,
                                                     unsigned jobs) {
  if (labels && labels->size() != records.size()) {
    throw std::invalid_argument("extract_features_from_log: labels/records size mismatch");
  }
  const auto order = browser_sort_order(records);
  std::vector<HttpRecord> sorted;
  sorted.reserve(records.size());
  for (std::size_t i : order) sorted.push_back(std::move(records[i]));

  const auto parts = browser_partitions(sorted);
  std::vector<std::vector<FeatureVector>> per_part(parts.size());
  parallel_for(parts.size(), jobs, [&](std::size_t p) {
    const auto [begin, end] = parts[p];
    std::vector<HttpRecord> chunk(sorted.begin() + static_cast<std::ptrdiff_t>(begin),
                                  sorted.begin() + static_cast<std::ptrdiff_t>(end));
    per_part[p] = extract_features(link_requests(std::move(chunk), window_s), ads);
  });

  // scatter back to the original record order
  std::vector<FeatureVector> out(records.size());
  std::size_t j = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    for (auto& v : per_part[p]) {
      const std::size_t original = order[j++];
      if (labels) v.label = (*labels)[original];
      out[original] = std::move(v);
    }
  }
  return out;
}

std::optional<double> numeric_feature(const FeatureVector& v, std::size_t feature) {
  switch (feature) {
    case kNumChildren: return v.num_children;
    case kDtPrevRequest: return v.dt_prev_request;
    case kUrlLength: return v.url_length;
    case kDtSibling: return v.dt_sibling;
    case kDtParent: return v.dt_parent;
    case kContentLength: return v.content_length;
    case kMaxDtChild: return v.max_dt_child;
    case kMaxLengthChild: return v.max_length_child;
    case kMinDtChild: return v.min_dt_child;
    case kParentContentLength: return v.parent_content_length;
    default: throw std::invalid_argument("numeric_feature: not a numeric feature");
  }
}

std::string_view categorical_feature(const FeatureVector& v, std::size_t feature) {
  switch (feature) {
    case kContentType: return v.content_type;
    case kStatusCode: return v.status_code;
    case kParentStatusCode: return v.parent_status_code;
    case kParentContentType: return v.parent_content_type;
    case kAdsInUrl: return v.ads_in_url ? "1" : "0";
    case kHasReferer: return v.has_referer ? "1" : "0";
    case kAdsInReferer: return v.ads_in_referer ? "1" : "0";
    default: throw std::invalid_argument("categorical_feature: not a categorical feature");
  }
}

namespace {

void append_numeric(std::string& out, const std::optional<double>& v) {
  if (v) out += format_double(*v);
}

}  // namespace

void write_feature_csv(std::ostream& out, std::span<const FeatureVector> rows) {
  const auto& table = feature_table();
  std::string header;
  for (const auto& info : table) {
    if (!header.empty()) header.push_back(',');
    header += std::string(info.name);
  }
  header += ",label\n";
  out << header;

  std::string line;
  for (const auto& v : rows) {
    line.clear();
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      if (f) line.push_back(',');
      if (table[f].kind == FeatureKind::numeric) {
        append_numeric(line, numeric_feature(v, f));
      } else {
        line += std::string(categorical_feature(v, f));
      }
    }
    line.push_back(',');
    if (v.label) line += std::string(label_name(*v.label));
    line.push_back('\n');
    out << line;
  }
}

std::vector<FeatureVector> read_feature_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("feature csv: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, ',');
  if (header.size() != kFeatureCount + 1) {
    throw std::invalid_argument("feature csv: expected 18 columns in header");
  }
  const auto& table = feature_table();
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    if (header[f] != table[f].name) {
      throw std::invalid_argument("feature csv: unexpected column '" + std::string(header[f]) + "'");
    }
  }
  if (header.back() != "label") throw std::invalid_argument("feature csv: last column must be label");

  std::vector<FeatureVector> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != kFeatureCount + 1) {
      throw ParseError(line_no, "expected 18 columns");
    }
    FeatureVector v;
    auto numeric = [&](std::size_t f) -> std::optional<double> {
      if (cols[f].empty()) return std::nullopt;
      const auto d = parse_double(cols[f]);
      if (!d) throw ParseError(line_no, "bad numeric field '" + std::string(cols[f]) + "'");
      return d;
    };
    auto boolean = [&](std::size_t f) {
      if (cols[f] == "1") return true;
      if (cols[f] == "0") return false;
      throw ParseError(line_no, "bad boolean field '" + std::string(cols[f]) + "'");
    };
    v.num_children = numeric(kNumChildren).value_or(0);
    v.content_type = std::string(cols[kContentType]);
    v.dt_prev_request = numeric(kDtPrevRequest);
    v.status_code = std::string(cols[kStatusCode]);
    v.url_length = numeric(kUrlLength).value_or(0);
    v.dt_sibling = numeric(kDtSibling);
    v.ads_in_url = boolean(kAdsInUrl);
    v.dt_parent = numeric(kDtParent);
    v.content_length = numeric(kContentLength);
    v.parent_status_code = std::string(cols[kParentStatusCode]);
    v.has_referer = boolean(kHasReferer);
    v.max_dt_child = numeric(kMaxDtChild);
    v.parent_content_type = std::string(cols[kParentContentType]);
    v.ads_in_referer = boolean(kAdsInReferer);
    v.max_length_child = numeric(kMaxLengthChild);
    v.min_dt_child = numeric(kMinDtChild);
    v.parent_content_length = numeric(kParentContentLength);
    if (!cols[kFeatureCount].empty()) {
      const auto l = label_from_name(cols[kFeatureCount]);
      if (!l) throw ParseError(line_no, "bad label '" + std::string(cols[kFeatureCount]) + "'");
      v.label = l;
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace cstream
