#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sbss/error.hpp"

namespace sbss {

// Strict key = value configuration file: '#' comments, blank lines, one
// assignment per line. Every typed getter consumes its key; finish() rejects
// any key that was never consumed, so misspelled settings fail loudly
// instead of silently using a default.
class KeyValueConfig {
 public:
  static KeyValueConfig parseText(const std::string& text, const std::string& origin = "config");
  static KeyValueConfig parseFile(const std::filesystem::path& path);

  bool has(const std::string& key) const;

  std::string getString(const std::string& key, const std::string& fallback);
  std::string requireString(const std::string& key);
  double getReal(const std::string& key, double fallback);
  int getInt(const std::string& key, int fallback);
  std::uint64_t getSeed(const std::string& key, std::uint64_t fallback);
  bool getBool(const std::string& key, bool fallback);
  std::vector<double> getRealList(const std::string& key, const std::vector<double>& fallback);
  std::vector<std::string> getStringList(const std::string& key,
                                         const std::vector<std::string>& fallback);

  // Throws naming every unconsumed key and its line.
  void finish() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
    bool consumed = false;
  };

  [[noreturn]] void badValue(const std::string& key, const std::string& expected) const;
  const Entry* take(const std::string& key);

  std::string origin_;
  std::map<std::string, Entry> entries_;
};

}  // namespace sbss
