#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace adaptnet::cfg {

// Flat key-value config with [section] headers, '#' comments, one key per
// line. Keys are unique per section; every lookup error carries origin:line.
class ConfigFile {
 public:
  static ConfigFile parse_file(const std::filesystem::path& path);
  static ConfigFile parse_string(std::string text,
                                 std::string origin = "<string>");

  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section,
                         const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  long long get_int(const std::string& section, const std::string& key) const;
  long long get_int(const std::string& section, const std::string& key,
                    long long fallback) const;
  std::uint64_t get_u64(const std::string& section,
                        const std::string& key) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;
  std::vector<double> get_double_list(const std::string& section,
                                      const std::string& key) const;
  std::vector<int> get_int_list(const std::string& section,
                                const std::string& key) const;

  // Rejects any key outside the schema, reporting its line.
  void require_known(
      const std::map<std::string, std::set<std::string>>& schema) const;

  // FNV-1a of the raw text; recorded in every output file for provenance.
  std::uint64_t fingerprint() const { return fingerprint_; }
  const std::string& origin() const { return origin_; }

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };

  [[noreturn]] void fail(const std::string& message, int line) const;
  const Entry& lookup(const std::string& section,
                      const std::string& key) const;

  std::string origin_;
  std::uint64_t fingerprint_ = 0;
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

std::uint64_t fnv1a64(const std::string& text);

}  // namespace adaptnet::cfg
