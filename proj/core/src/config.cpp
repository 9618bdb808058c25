#include "resmot/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

#include "resmot/types.hpp"

namespace resmot {

namespace pt = boost::property_tree;

KeyValueConfig KeyValueConfig::parse(const std::string& text, const std::string& origin) {
  // ini_parser only understands ';' comments
  std::stringstream cleaned;
  std::stringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t");
    if (b != std::string::npos && line[b] == '#') continue;
    cleaned << line << '\n';
  }
  KeyValueConfig cfg;
  cfg.origin_ = origin;
  try {
    pt::read_ini(cleaned, cfg.tree_);
  } catch (const pt::ini_parser_error& e) {
    throw Error("config", origin + ": line " + std::to_string(e.line()) + ": " + e.message());
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

bool KeyValueConfig::has(const std::string& key) const {
  auto node = tree_.get_child_optional(key);
  return node && node->empty();
}

std::string KeyValueConfig::get(const std::string& key) const {
  if (!has(key)) throw Error("config", origin_ + ": missing key '" + key + "'");
  return tree_.get<std::string>(key);
}

std::string KeyValueConfig::get(const std::string& key, const std::string& fallback) const {
  return has(key) ? tree_.get<std::string>(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key) const {
  const std::string v = get(key);
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw Error("config", origin_ + ": key '" + key + "' is not a number: '" + v + "'");
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long KeyValueConfig::get_int(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get(key);
  try {
    std::size_t used = 0;
    const long n = std::stol(v, &used);
    if (used == v.size()) return n;
  } catch (const std::exception&) {
  }
  throw Error("config", origin_ + ": key '" + key + "' is not an integer: '" + v + "'");
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string v = get(key);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw Error("config", origin_ + ": key '" + key + "' is not a boolean: '" + v + "'");
}

std::vector<std::string> KeyValueConfig::keys(const std::string& section) const {
  std::vector<std::string> out;
  const pt::ptree* node = &tree_;
  if (!section.empty()) {
    auto child = tree_.get_child_optional(section);
    if (!child) return out;
    node = &*child;
  }
  for (const auto& [k, v] : *node) {
    if (v.empty()) out.push_back(k);
  }
  return out;
}

bool KeyValueConfig::has_section(const std::string& section) const {
  auto node = tree_.get_child_optional(section);
  return node && !node->empty();
}

}  // namespace resmot
