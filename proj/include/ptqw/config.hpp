#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ptqw/walk.hpp"

namespace ptqw {

/// Flat key-value text with optional [section] headers.
///
///   # comment
///   key = value          (before any header: section "")
///   [spectrum]
///   key = value
///
/// Keys are unique within a section. See docs/config.md for the walk keys.
class Config {
 public:
  using Section = std::map<std::string, std::string>;

  static Config parse(std::istream& in);
  static Config parse_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  std::optional<double> get_real(const std::string& section, const std::string& key) const;
  std::optional<long long> get_int(const std::string& section, const std::string& key) const;

  /// Value from `section`, falling back to the unnamed section.
  std::optional<std::string> lookup(const std::string& section, const std::string& key) const;

  void set(const std::string& section, const std::string& key, std::string value);
  const std::map<std::string, Section>& sections() const { return sections_; }

  void write(std::ostream& out) const;

 private:
  std::map<std::string, Section> sections_;
};

/// Typed lookups in `section` with the unnamed-section fallback.
std::optional<Real> lookup_real(const Config& config, const std::string& section, const std::string& key);
std::optional<long long> lookup_int(const Config& config, const std::string& section, const std::string& key);
/// `<name>_over_pi` times pi, or `<name>` in radians; empty when neither is set.
std::optional<Real> lookup_angle(const Config& config, const std::string& section, const std::string& name);

/// Builds a WalkSpec from walk keys, looked up in `section` then in the
/// unnamed section. Angles are read from `<name>_over_pi` (multiplied by pi)
/// or from `<name>` in radians.
WalkSpec walk_spec_from_config(const Config& config, const std::string& section = "");

/// Writes the walk keys of spec into `section`, angles in radians so that
/// reading them back is exact.
void walk_spec_to_config(const WalkSpec& spec, Config& config, const std::string& section = "");

}  // namespace ptqw
