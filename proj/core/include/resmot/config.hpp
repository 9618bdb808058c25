#pragma once

#include <optional>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

namespace resmot {

/// Plain key=value text, optionally split into [sections]. Lines starting
/// with '#' or ';' are comments. Keys are looked up as "section.key".
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text, const std::string& origin = "<text>");
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// Keys directly under `section` ("" = top level), in file order.
  std::vector<std::string> keys(const std::string& section = "") const;
  bool has_section(const std::string& section) const;

  const std::string& origin() const { return origin_; }

 private:
  boost::property_tree::ptree tree_;
  std::string origin_;
};

}  // namespace resmot
