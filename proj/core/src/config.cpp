#include "adaptnet/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "adaptnet/errors.hpp"

namespace adaptnet::cfg {

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str(), path.string());
}

ConfigFile ConfigFile::parse_string(std::string text, std::string origin) {
  ConfigFile c;
  c.origin_ = std::move(origin);
  c.fingerprint_ = fnv1a64(text);

  std::stringstream ss(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(ss, raw)) {
    ++line_no;
    const auto comment = raw.find('#');
    if (comment != std::string::npos) raw.erase(comment);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        c.fail("malformed section header '" + line + "'", line_no);
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) c.fail("empty section name", line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      c.fail("expected key = value, got '" + line + "'", line_no);
    if (section.empty())
      c.fail("key before any [section] header", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) c.fail("empty key", line_no);
    auto [it, inserted] = c.sections_[section].insert({key, {value, line_no}});
    if (!inserted)
      c.fail("duplicate key '" + key + "' in [" + section + "] (first at line " +
                 std::to_string(it->second.line) + ")",
             line_no);
  }
  return c;
}

void ConfigFile::fail(const std::string& message, int line) const {
  throw ConfigError(origin_ + ":" + std::to_string(line) + ": " + message);
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

const ConfigFile::Entry& ConfigFile::lookup(const std::string& section,
                                            const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end() || !s->second.count(key))
    throw ConfigError(origin_ + ": missing required key '" + key + "' in [" +
                      section + "]");
  return s->second.at(key);
}

std::string ConfigFile::get_string(const std::string& section,
                                   const std::string& key) const {
  return lookup(section, key).value;
}

std::string ConfigFile::get_string(const std::string& section,
                                   const std::string& key,
                                   const std::string& fallback) const {
  return has(section, key) ? lookup(section, key).value : fallback;
}

long long ConfigFile::get_int(const std::string& section,
                              const std::string& key) const {
  const Entry& e = lookup(section, key);
  try {
    std::size_t used = 0;
    const long long v = std::stoll(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    fail("'" + key + "' must be an integer, got '" + e.value + "'", e.line);
  }
}

long long ConfigFile::get_int(const std::string& section,
                              const std::string& key,
                              long long fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

std::uint64_t ConfigFile::get_u64(const std::string& section,
                                  const std::string& key) const {
  const Entry& e = lookup(section, key);
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    fail("'" + key + "' must be an unsigned integer, got '" + e.value + "'",
         e.line);
  }
}

double ConfigFile::get_double(const std::string& section,
                              const std::string& key) const {
  const Entry& e = lookup(section, key);
  try {
    std::size_t used = 0;
    const double v = std::stod(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    fail("'" + key + "' must be a number, got '" + e.value + "'", e.line);
  }
}

double ConfigFile::get_double(const std::string& section,
                              const std::string& key, double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key,
                          bool fallback) const {
  if (!has(section, key)) return fallback;
  const Entry& e = lookup(section, key);
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  fail("'" + key + "' must be a boolean, got '" + e.value + "'", e.line);
}

std::vector<double> ConfigFile::get_double_list(const std::string& section,
                                                const std::string& key) const {
  const Entry& e = lookup(section, key);
  std::vector<double> out;
  for (const std::string& item : split_list(e.value)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      fail("'" + key + "' list entry '" + item + "' is not a number", e.line);
    }
  }
  if (out.empty()) fail("'" + key + "' list is empty", e.line);
  return out;
}

std::vector<int> ConfigFile::get_int_list(const std::string& section,
                                          const std::string& key) const {
  const Entry& e = lookup(section, key);
  std::vector<int> out;
  for (const std::string& item : split_list(e.value)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      fail("'" + key + "' list entry '" + item + "' is not an integer",
           e.line);
    }
  }
  if (out.empty()) fail("'" + key + "' list is empty", e.line);
  return out;
}

void ConfigFile::require_known(
    const std::map<std::string, std::set<std::string>>& schema) const {
  for (const auto& [section, entries] : sections_) {
    const auto s = schema.find(section);
    if (s == schema.end()) {
      fail("unknown section [" + section + "]", entries.begin()->second.line);
    }
    for (const auto& [key, entry] : entries) {
      if (!s->second.count(key))
        fail("unknown key '" + key + "' in [" + section + "]", entry.line);
    }
  }
}

}  // namespace adaptnet::cfg
