#ifndef PROSODY_CONFIG_HPP
#define PROSODY_CONFIG_HPP

// Flat `key = value` configuration files. '#' starts a comment.

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <string>
#include <string_view>

#include "prosody/error.hpp"
#include "prosody/tsv.hpp"

namespace prosody {

class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::istream& in, const std::string& source = "config") {
    KeyValueConfig c;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      auto text = trim(line);
      if (text.empty()) continue;
      auto eq = text.find('=');
      if (eq == std::string_view::npos)
        throw ConfigError(source + ":" + std::to_string(number) + ": expected 'key = value'");
      auto key = std::string(trim(text.substr(0, eq)));
      auto value = std::string(trim(text.substr(eq + 1)));
      if (key.empty()) throw ConfigError(source + ":" + std::to_string(number) + ": empty key");
      if (c.values_.count(key)) throw ConfigError(source + ":" + std::to_string(number) + ": duplicate key '" + key + "'");
      c.values_[key] = value;
    }
    return c;
  }

  static KeyValueConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    return parse(in, path);
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    auto v = tsv::to_double(it->second);
    if (!v) throw ConfigError("key '" + key + "': not a number: '" + it->second + "'");
    return *v;
  }

  long long get_int(const std::string& key, long long fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    auto v = tsv::to_int(it->second);
    if (!v) throw ConfigError("key '" + key + "': not an integer: '" + it->second + "'");
    return *v;
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
    auto v = get_int(key, static_cast<long long>(fallback));
    if (v < 0) throw ConfigError("key '" + key + "' must not be negative");
    return static_cast<std::uint64_t>(v);
  }

  bool get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const auto& v = it->second;
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("key '" + key + "': not a boolean: '" + v + "'");
  }

 private:
  static std::string_view trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> values_;
};

}  // namespace prosody

#endif  // PROSODY_CONFIG_HPP
