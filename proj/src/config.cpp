#include "sbss/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace sbss {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> splitList(const std::string& value) {
  std::vector<std::string> parts;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(trim(item));
  return parts;
}

}  // namespace

KeyValueConfig KeyValueConfig::parseText(const std::string& text, const std::string& origin) {
  KeyValueConfig cfg;
  cfg.origin_ = origin;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    std::string stripped = line;
    if (size_t hash = stripped.find('#'); hash != std::string::npos) stripped.resize(hash);
    stripped = trim(stripped);
    if (stripped.empty()) continue;
    size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ParseError(origin + ":" + std::to_string(lineno) + ": expected 'key = value', got '" +
                       trim(line) + "'");
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw ParseError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (cfg.entries_.count(key) != 0)
      throw ParseError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    cfg.entries_[key] = Entry{value, lineno, false};
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parseFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parseText(ss.str(), path.string());
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) != 0; }

const KeyValueConfig::Entry* KeyValueConfig::take(const std::string& key) {
  auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  it->second.consumed = true;
  return &it->second;
}

void KeyValueConfig::badValue(const std::string& key, const std::string& expected) const {
  auto it = entries_.find(key);
  int line = it != entries_.end() ? it->second.line : 0;
  std::string value = it != entries_.end() ? it->second.value : "";
  throw ParseError(origin_ + ":" + std::to_string(line) + ": field '" + key + "' expects " +
                   expected + ", got '" + value + "'");
}

std::string KeyValueConfig::getString(const std::string& key, const std::string& fallback) {
  const Entry* e = take(key);
  return e != nullptr ? e->value : fallback;
}

std::string KeyValueConfig::requireString(const std::string& key) {
  const Entry* e = take(key);
  if (e == nullptr) throw ParseError(origin_ + ": missing required field '" + key + "'");
  return e->value;
}

double KeyValueConfig::getReal(const std::string& key, double fallback) {
  const Entry* e = take(key);
  if (e == nullptr) return fallback;
  std::string v = e->value;
  if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
  try {
    size_t used = 0;
    double parsed = std::stod(v, &used);
    if (used != v.size()) badValue(key, "a real number");
    return parsed;
  } catch (const std::exception&) {
    badValue(key, "a real number");
  }
}

int KeyValueConfig::getInt(const std::string& key, int fallback) {
  const Entry* e = take(key);
  if (e == nullptr) return fallback;
  int parsed = 0;
  auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), parsed);
  if (ec != std::errc() || ptr != e->value.data() + e->value.size())
    badValue(key, "an integer");
  return parsed;
}

std::uint64_t KeyValueConfig::getSeed(const std::string& key, std::uint64_t fallback) {
  const Entry* e = take(key);
  if (e == nullptr) return fallback;
  std::uint64_t parsed = 0;
  auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), parsed);
  if (ec != std::errc() || ptr != e->value.data() + e->value.size())
    badValue(key, "an unsigned integer");
  return parsed;
}

bool KeyValueConfig::getBool(const std::string& key, bool fallback) {
  const Entry* e = take(key);
  if (e == nullptr) return fallback;
  if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
  if (e->value == "false" || e->value == "0" || e->value == "no") return false;
  badValue(key, "a boolean (true/false)");
}

std::vector<double> KeyValueConfig::getRealList(const std::string& key,
                                                const std::vector<double>& fallback) {
  const Entry* e = take(key);
  if (e == nullptr) return fallback;
  std::vector<double> out;
  for (const std::string& part : splitList(e->value)) {
    try {
      size_t used = 0;
      double parsed = std::stod(part, &used);
      if (used != part.size() || part.empty()) badValue(key, "a comma-separated list of reals");
      out.push_back(parsed);
    } catch (const std::exception&) {
      badValue(key, "a comma-separated list of reals");
    }
  }
  if (out.empty()) badValue(key, "a non-empty list of reals");
  return out;
}

std::vector<std::string> KeyValueConfig::getStringList(const std::string& key,
                                                       const std::vector<std::string>& fallback) {
  const Entry* e = take(key);
  if (e == nullptr) return fallback;
  std::vector<std::string> out = splitList(e->value);
  out.erase(std::remove_if(out.begin(), out.end(), [](const std::string& s) { return s.empty(); }),
            out.end());
  if (out.empty()) badValue(key, "a non-empty list");
  return out;
}

void KeyValueConfig::finish() const {
  for (const auto& [key, entry] : entries_) {
    if (!entry.consumed)
      throw ParseError(origin_ + ":" + std::to_string(entry.line) + ": unknown key '" + key + "'");
  }
}

}  // namespace sbss
