#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "f2m/core/error.hpp"

namespace f2m {

/// Plain "key = value" text: one pair per line, '#' starts a comment,
/// surrounding whitespace ignored, later keys override earlier ones.
class KeyValues {
 public:
  static KeyValues parse(std::istream& in, const std::string& source = "<config>") {
    KeyValues kv;
    kv.source_ = source;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw Error(ErrorCode::FormatError, source + ":" + std::to_string(lineno) + ": expected 'key = value'");
      const std::string key = trim(line.substr(0, eq));
      if (key.empty()) throw Error(ErrorCode::FormatError, source + ":" + std::to_string(lineno) + ": empty key");
      kv.values_[key] = trim(line.substr(eq + 1));
    }
    return kv;
  }

  static KeyValues load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return parse(in, path.string());
  }

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  /// Assigns `out` from `key` when present; marks the key consumed.
  template <typename T>
  void get(const std::string& key, T& out) {
    auto it = values_.find(key);
    if (it == values_.end()) return;
    used_.push_back(key);
    if constexpr (std::is_same_v<T, std::string>) {
      out = it->second;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (it->second == "true" || it->second == "1")
        out = true;
      else if (it->second == "false" || it->second == "0")
        out = false;
      else
        bad(key, it->second);
    } else {
      const char* b = it->second.data();
      const char* e = b + it->second.size();
      T value{};
      const auto res = std::from_chars(b, e, value);
      if (res.ec != std::errc{} || res.ptr != e) bad(key, it->second);
      out = value;
    }
  }

  /// Throws if any key was never read.
  void require_all_used() const {
    for (const auto& [k, v] : values_) {
      bool used = false;
      for (const auto& u : used_) used = used || u == k;
      if (!used) throw Error(ErrorCode::InvalidInput, source_ + ": unknown key '" + k + "'");
    }
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  [[noreturn]] void bad(const std::string& key, const std::string& value) const {
    throw Error(ErrorCode::InvalidInput, source_ + ": cannot parse value '" + value + "' for key '" + key + "'");
  }

  std::map<std::string, std::string> values_;
  std::vector<std::string> used_;
  std::string source_;
};

}  // namespace f2m
