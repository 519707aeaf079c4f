#include "mdl/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mdl {

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) s = s.substr(1, s.size() - 2);
  return std::string(s);
}

std::pair<std::string, std::string> split_assignment(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) throw std::invalid_argument("expected key=value, got '" + std::string(text) + "'");
  std::string key = trim(text.substr(0, eq));
  if (key.empty()) throw std::invalid_argument("empty key in '" + std::string(text) + "'");
  return {std::move(key), trim(text.substr(eq + 1))};
}

}  // namespace

Config Config::parse(std::istream& in) {
  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    try {
      auto [k, v] = split_assignment(line);
      cfg.add(std::move(k), std::move(v));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

Config Config::parse_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse(in);
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  return parse(in);
}

void Config::add(std::string key, std::string value) { entries_.emplace_back(std::move(key), std::move(value)); }

void Config::set(const std::string& key, std::string value) {
  std::erase_if(entries_, [&](const auto& e) { return e.first == key; });
  add(key, std::move(value));
}

void Config::apply_override(std::string_view assignment) {
  auto [k, v] = split_assignment(assignment);
  set(k, std::move(v));
}

void Config::apply_scenario_shorthand(std::string_view text) {
  const auto colon = text.find(':');
  set("scenario", trim(text.substr(0, colon)));
  if (colon == std::string_view::npos) return;
  std::string last_key;
  std::string rest(text.substr(colon + 1));
  std::stringstream ss(rest);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    if (piece.find('=') != std::string::npos) {
      auto [k, v] = split_assignment(piece);
      set(k, v);
      last_key = k;
    } else {
      if (last_key.empty()) throw std::invalid_argument("scenario shorthand: value without key in '" + std::string(text) + "'");
      set(last_key, *get(last_key) + "," + trim(piece));
    }
  }
}

bool Config::has(std::string_view key) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == key; });
}

std::optional<std::string> Config::get(std::string_view key) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
    if (it->first == key) return it->second;
  return std::nullopt;
}

std::string Config::get_or(std::string_view key, std::string fallback) const { return get(key).value_or(std::move(fallback)); }

std::string Config::require(std::string_view key) const {
  auto v = get(key);
  if (!v) throw std::invalid_argument("missing required config key '" + std::string(key) + "'");
  return *v;
}

std::vector<std::string> Config::get_all(std::string_view key) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_)
    if (k == key) out.push_back(v);
  return out;
}

long Config::get_int(std::string_view key, long fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  std::size_t used = 0;
  long out = 0;
  try {
    out = std::stol(*v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v->size() || v->empty()) throw std::invalid_argument("config key '" + std::string(key) + "' is not an integer: " + *v);
  return out;
}

double Config::get_double(std::string_view key, double fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(*v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v->size() || v->empty()) throw std::invalid_argument("config key '" + std::string(key) + "' is not a number: " + *v);
  return out;
}

}  // namespace mdl
