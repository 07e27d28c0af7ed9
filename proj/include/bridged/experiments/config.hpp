#pragma once

// Experiment configuration: INI text with [sections] and key = value lines.
// The raw text is kept verbatim for the manifest and hashed (FNV-1a, 64 bit)
// so that every output can name the exact configuration that produced it.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "bridged/models/io.hpp"

namespace bridged {

/// Malformed or unusable configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "config") {
    Config c;
    c.text_ = text;
    c.origin_ = origin;
    std::istringstream in(text);
    try {
      boost::property_tree::ini_parser::read_ini(in, c.tree_);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError(origin + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    // Line of every key, for error messages; the parser has already rejected
    // anything that is not a section header, a comment or key = value.
    std::istringstream lines(text);
    std::string line, section;
    for (int no = 1; std::getline(lines, line); ++no) {
      const std::string t = detail::trim(line);
      if (t.empty() || t[0] == ';' || t[0] == '#') continue;
      if (t[0] == '[') {
        section = detail::trim(t.substr(1, t.find(']') - 1));
        c.lines_[section] = no;
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = detail::trim(t.substr(0, eq));
      c.lines_[section.empty() ? key : section + "." + key] = no;
    }
    return c;
  }

  static Config load(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FileError(path.string() + ": cannot open");
    std::ostringstream s;
    s << f.rdbuf();
    return parse(s.str(), path.string());
  }

  const std::string& text() const noexcept { return text_; }
  const std::string& origin() const noexcept { return origin_; }
  std::string hash() const { return hex64(fnv1a64(text_)); }

  bool has(const std::string& key) const { return tree_.get_child_optional(path(key)).has_value(); }

  std::string get_string(const std::string& key) const {
    used_.insert(key);
    auto v = tree_.get_optional<std::string>(path(key));
    if (!v) throw ConfigError(origin_ + ": missing required field '" + key + "'");
    return *v;
  }
  std::string get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : (used_.insert(key), fallback);
  }

  long long get_int(const std::string& key) const { return to_int(key, get_string(key)); }
  long long get_int(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : (used_.insert(key), fallback);
  }
  double get_double(const std::string& key) const { return to_double(key, get_string(key)); }
  double get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : (used_.insert(key), fallback);
  }
  bool get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) {
      used_.insert(key);
      return fallback;
    }
    const std::string v = get_string(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw error(key, "expected true or false, got '" + v + "'");
  }
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) {
      used_.insert(key);
      return fallback;
    }
    std::vector<double> out;
    for (const std::string& part : detail::split(get_string(key), ',')) out.push_back(to_double(key, part));
    return out;
  }

  /// Positive integer with an upper bound, as most counts are.
  long long get_count(const std::string& key, long long fallback, long long lo = 1, long long hi = 1LL << 40) const {
    const long long v = get_int(key, fallback);
    if (v < lo || v > hi) throw error(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }

  /// Rejects keys that no accessor asked for (typos, keys of another experiment).
  void check_unused() const {
    for (const auto& [section, sub] : tree_) {
      if (sub.empty()) {
        if (!used_.count(section)) throw error(section, "unknown field");
        continue;
      }
      for (const auto& [key, v] : sub) {
        const std::string full = section + "." + key;
        if (!used_.count(full)) throw error(full, "unknown field");
      }
    }
  }

  ConfigError error(const std::string& key, const std::string& what) const {
    const auto it = lines_.find(key);
    const std::string where = it == lines_.end() ? origin_ : origin_ + ":" + std::to_string(it->second);
    return ConfigError(where + ": field '" + key + "': " + what);
  }

 private:
  static boost::property_tree::ptree::path_type path(const std::string& key) {
    return boost::property_tree::ptree::path_type(key, '.');
  }

  long long to_int(const std::string& key, const std::string& v) const {
    try {
      std::size_t pos = 0;
      const long long x = std::stoll(v, &pos);
      if (pos == v.size()) return x;
    } catch (const std::exception&) {
    }
    throw error(key, "expected an integer, got '" + v + "'");
  }

  double to_double(const std::string& key, const std::string& raw) const {
    const std::string v = detail::trim(raw);
    try {
      std::size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos == v.size() && std::isfinite(x)) return x;
    } catch (const std::exception&) {
    }
    throw error(key, "expected a number, got '" + v + "'");
  }

  std::string text_, origin_;
  boost::property_tree::ptree tree_;
  std::map<std::string, int> lines_;
  mutable std::set<std::string> used_;
};

}  // namespace bridged
