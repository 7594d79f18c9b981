#include "cstream/config.hpp"

#include <istream>
#include <stdexcept>

#include "cstream/trace.hpp"
#include "cstream/util.hpp"

namespace cstream {

KeyValueFile KeyValueFile::parse(std::istream& in) {
  KeyValueFile kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto entry = trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const auto key = trim(entry.substr(0, eq));
    const auto value = trim(entry.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "empty key");
    if (!kv.values_.emplace(std::string(key), std::string(value)).second) {
      throw ParseError(line_no, "duplicate key '" + std::string(key) + "'");
    }
  }
  return kv;
}

bool KeyValueFile::has(std::string_view key) const {
  queried_.insert(std::string(key));
  return values_.count(std::string(key)) > 0;
}

std::optional<std::string> KeyValueFile::get(std::string_view key) const {
  queried_.insert(std::string(key));
  const auto it = values_.find(std::string(key));
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueFile::get_string(std::string_view key, std::string fallback) const {
  const auto v = get(key);
  return v ? *v : std::move(fallback);
}

double KeyValueFile::get_double(std::string_view key, double fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  const auto d = parse_double(*v);
  if (!d) throw std::invalid_argument("config key '" + std::string(key) + "': bad number '" + *v + "'");
  return *d;
}

std::int64_t KeyValueFile::get_int(std::string_view key, std::int64_t fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  const auto i = parse_i64(*v);
  if (!i) throw std::invalid_argument("config key '" + std::string(key) + "': bad integer '" + *v + "'");
  return *i;
}

std::vector<std::string> KeyValueFile::get_list(std::string_view key) const {
  const auto v = get(key);
  std::vector<std::string> out;
  if (!v || trim(*v).empty()) return out;
  for (const auto part : split(*v, ',')) {
    const auto item = trim(part);
    if (!item.empty()) out.emplace_back(item);
  }
  return out;
}

std::set<std::string> KeyValueFile::unused_keys() const {
  std::set<std::string> out;
  for (const auto& [key, _] : values_) {
    if (!queried_.count(key)) out.insert(key);
  }
  return out;
}

}  // namespace cstream
