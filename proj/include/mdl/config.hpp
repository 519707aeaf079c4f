#pragma once
// Flat key = value configuration with ordered, repeatable keys.

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mdl {

class Config {
 public:
  /// Lines of `key = value`; '#' starts a comment; values may be quoted.
  static Config parse(std::istream& in);
  static Config parse_string(std::string_view text);
  static Config load(const std::string& path);

  /// Appends an entry; for single-valued lookups the last entry wins.
  void add(std::string key, std::string value);
  /// Replaces every entry for `key`.
  void set(const std::string& key, std::string value);
  /// "key=value".
  void apply_override(std::string_view assignment);
  /// "name:k1=v1,k2=v2" or a bare name; a piece without '=' continues the
  /// previous value (so "values=0.3,0.7" survives).
  void apply_scenario_shorthand(std::string_view text);

  bool has(std::string_view key) const;
  std::optional<std::string> get(std::string_view key) const;
  std::string get_or(std::string_view key, std::string fallback) const;
  std::string require(std::string_view key) const;
  std::vector<std::string> get_all(std::string_view key) const;
  long get_int(std::string_view key, long fallback) const;
  double get_double(std::string_view key, double fallback) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace mdl
