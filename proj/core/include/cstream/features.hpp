#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cstream/trace.hpp"

namespace cstream {

enum class Label : std::uint8_t { automatic = 0, user_action = 1 };

std::string_view label_name(Label l);
std::optional<Label> label_from_name(std::string_view name);

// A record with its referer relations resolved inside one browser's stream.
// parent/children/sibling indices point into the same LinkedRequest vector.
struct LinkedRequest {
  HttpRecord record;
  std::optional<std::size_t> parent;
  std::vector<std::size_t> children;
  std::optional<std::size_t> prev_sibling;
  std::optional<std::int64_t> prev_request_ts;
};

// Resolves parent/child/sibling relations for one browser's records, sorted
// by timestamp. A request's parent is the most recent earlier request whose
// normalized URL equals the request's normalized referer, looking back at
// most `window_s` seconds; its children are exactly the requests that chose
// it as parent. Throws std::invalid_argument on unsorted input.
std::vector<LinkedRequest> link_requests(std::vector<HttpRecord> records, double window_s = 30.0);

// Feature order follows the information-gain ranking table.
enum FeatureId : std::size_t {
  kNumChildren = 0,
  kContentType,
  kDtPrevRequest,
  kStatusCode,
  kUrlLength,
  kDtSibling,
  kAdsInUrl,
  kDtParent,
  kContentLength,
  kParentStatusCode,
  kHasReferer,
  kMaxDtChild,
  kParentContentType,
  kAdsInReferer,
  kMaxLengthChild,
  kMinDtChild,
  kParentContentLength,
  kFeatureCount
};

enum class FeatureKind { numeric, categorical, boolean };

struct FeatureInfo {
  std::string_view name;
  FeatureKind kind;
};

const std::array<FeatureInfo, kFeatureCount>& feature_table();
std::optional<std::size_t> feature_index(std::string_view name);

// The per-request feature row. Missing numeric values are empty optionals;
// missing categories are empty strings. Time deltas are seconds.
struct FeatureVector {
  double num_children = 0;
  std::string content_type;
  std::optional<double> dt_prev_request;
  std::string status_code;
  double url_length = 0;
  std::optional<double> dt_sibling;
  bool ads_in_url = false;
  std::optional<double> dt_parent;
  std::optional<double> content_length;
  std::string parent_status_code;
  bool has_referer = false;
  std::optional<double> max_dt_child;
  std::string parent_content_type;
  bool ads_in_referer = false;
  std::optional<double> max_length_child;
  std::optional<double> min_dt_child;
  std::optional<double> parent_content_length;
  std::optional<Label> label;

  bool operator==(const FeatureVector&) const = default;
};

// Uniform access used by the classifier: numeric features as optional
// doubles, categorical/boolean features as strings ("" = missing,
// booleans "0"/"1").
std::optional<double> numeric_feature(const FeatureVector& v, std::size_t feature);
std::string_view categorical_feature(const FeatureVector& v, std::size_t feature);

struct AdBlacklist {
  std::set<std::string> terms;  // lowercase substrings

  bool matches(std::string_view url) const;
};

const AdBlacklist& default_ad_blacklist();
AdBlacklist load_ad_blacklist(std::istream& in);

// One vector per request, same order as `linked`.
std::vector<FeatureVector> extract_features(std::span<const LinkedRequest> linked,
                                            const AdBlacklist& ads);

// Convenience: sort per browser, link each browser partition, extract.
// `labels` (parallel to `records`, pre-sort) attaches supervision.
std::vector<FeatureVector> extract_features_from_log(std::vector<HttpRecord> records,
                                                     const AdBlacklist& ads,
                                                     double window_s = 30.0,
                                                     const std::vector<Label>* labels = nullptr,
                                                     unsigned jobs = 1);

// CSV interchange: header row with the 17 feature names (+ label), missing
// encoded as the empty field.
void write_feature_csv(std::ostream& out, std::span<const FeatureVector> rows);
std::vector<FeatureVector> read_feature_csv(std::istream& in);

}  // namespace cstream
