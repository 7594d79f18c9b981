#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cstream {

// Flat `key = value` config text ('#' comments). Values are scalars or
// comma-separated lists; quoting is not needed because no value contains
// commas or newlines.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::istream& in);

  bool has(std::string_view key) const;
  std::optional<std::string> get(std::string_view key) const;
  std::string get_string(std::string_view key, std::string fallback) const;
  double get_double(std::string_view key, double fallback) const;
  std::int64_t get_int(std::string_view key, std::int64_t fallback) const;
  std::vector<std::string> get_list(std::string_view key) const;  // empty if absent

  // keys present in the file but never queried; lets loaders reject typos
  std::set<std::string> unused_keys() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> queried_;
};

}  // namespace cstream
