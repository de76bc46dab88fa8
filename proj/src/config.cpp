#include "ptqw/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ptqw/csv.hpp"

namespace ptqw {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void parse_error(int line, const std::string& what) {
  throw PreconditionError("config line " + std::to_string(line) + ": " + what);
}

double to_real(const std::string& key, const std::string& v) {
  double out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw PreconditionError("config key '" + key + "': not a number: " + v);
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw PreconditionError("config key '" + key + "': not an integer: " + v);
  return out;
}

struct WalkReader {
  const Config& config;
  const std::string& section;

  std::optional<std::string> raw(const std::string& key) const { return config.lookup(section, key); }

  std::optional<double> real(const std::string& key) const {
    if (auto v = raw(key)) return to_real(key, *v);
    return std::nullopt;
  }

  std::optional<long long> integer(const std::string& key) const {
    if (auto v = raw(key)) return to_int(key, *v);
    return std::nullopt;
  }

  std::optional<Real> optional_angle(const std::string& name) const {
    const auto over_pi = real(name + "_over_pi");
    const auto radians = real(name);
    if (over_pi && radians) throw PreconditionError("angle '" + name + "' given twice");
    if (over_pi) return *over_pi * kPi;
    return radians;
  }

  Real angle(const std::string& name) const {
    if (auto a = optional_angle(name)) return *a;
    throw PreconditionError("missing angle '" + name + "' (or '" + name + "_over_pi')");
  }

  CoinAngles pair(const std::string& suffix) const {
    return {angle("theta1" + suffix), angle("theta2" + suffix)};
  }
};

}  // namespace

std::optional<Real> lookup_real(const Config& config, const std::string& section, const std::string& key) {
  return WalkReader{config, section}.real(key);
}

std::optional<long long> lookup_int(const Config& config, const std::string& section, const std::string& key) {
  return WalkReader{config, section}.integer(key);
}

std::optional<Real> lookup_angle(const Config& config, const std::string& section, const std::string& name) {
  return WalkReader{config, section}.optional_angle(name);
}

Config Config::parse(std::istream& in) {
  Config c;
  std::string section;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') parse_error(number, "unterminated section header");
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      if (section.empty()) parse_error(number, "empty section name");
      c.sections_[section];
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) parse_error(number, "expected key = value");
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) parse_error(number, "empty key");
    auto& sec = c.sections_[section];
    if (sec.count(key)) parse_error(number, "duplicate key '" + key + "'");
    sec.emplace(std::move(key), std::move(value));
  }
  return c;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot read config file: " + path);
  return parse(in);
}

bool Config::has(const std::string& section, const std::string& key) const {
  return get(section, key).has_value();
}

std::optional<std::string> Config::get(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return std::nullopt;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

std::optional<double> Config::get_real(const std::string& section, const std::string& key) const {
  if (auto v = get(section, key)) return to_real(key, *v);
  return std::nullopt;
}

std::optional<long long> Config::get_int(const std::string& section, const std::string& key) const {
  if (auto v = get(section, key)) return to_int(key, *v);
  return std::nullopt;
}

std::optional<std::string> Config::lookup(const std::string& section, const std::string& key) const {
  if (auto v = get(section, key)) return v;
  return get("", key);
}

void Config::set(const std::string& section, const std::string& key, std::string value) {
  sections_[section][key] = std::move(value);
}

void Config::write(std::ostream& out) const {
  bool first = true;
  for (const auto& [name, sec] : sections_) {
    if (!name.empty()) out << (first ? "" : "\n") << '[' << name << "]\n";
    for (const auto& [k, v] : sec) out << k << " = " << v << '\n';
    first = false;
  }
}

WalkSpec walk_spec_from_config(const Config& config, const std::string& section) {
  const WalkReader r{config, section};
  WalkSpec spec;
  if (auto kind = r.raw("kind")) spec.kind = walk_kind_from_string(*kind);

  Boundary boundary = Boundary::periodic;
  if (auto b = r.raw("boundary")) {
    if (*b == "periodic")
      boundary = Boundary::periodic;
    else if (*b == "open")
      boundary = Boundary::open;
    else
      throw PreconditionError("boundary must be periodic or open");
  }
  const auto first = r.integer("first_position");
  const auto last = r.integer("last_position");
  if (first || last) {
    if (!first || !last) throw PreconditionError("first_position and last_position go together");
    if (*last < *first) throw PreconditionError("last_position must not precede first_position");
    spec.lattice = Lattice::range(*first, *last, boundary);
  } else {
    const long long sites = r.integer("sites").value_or(801);
    if (sites <= 0) throw PreconditionError("sites must be positive");
    spec.lattice = Lattice::centered(sites, boundary);
  }

  const std::string layout = r.raw("layout").value_or("homogeneous");
  if (layout == "homogeneous") {
    spec.coins = CoinProfile::homogeneous(r.angle("theta1"), r.angle("theta2"));
  } else if (layout == "inner_outer") {
    const long long half_width = r.integer("half_width").value_or(50);
    if (half_width < 0) throw PreconditionError("half_width must be non-negative");
    spec.coins = CoinProfile::inner_outer(half_width, r.pair("_inner"), r.pair("_outer"));
  } else if (layout == "left_right") {
    spec.coins = CoinProfile::left_right(r.pair("_left"), r.pair("_right"));
  } else {
    throw PreconditionError("unknown layout: " + layout);
  }
  spec.gamma = r.real("gamma").value_or(0.0);
  spec.coins.delta = r.real("delta").value_or(0.0);
  spec.coins.disorder_amplitude = r.real("disorder_amplitude").value_or(0.0);
  const long long seed = r.integer("disorder_seed").value_or(0);
  if (seed < 0) throw PreconditionError("disorder_seed must be non-negative");
  spec.coins.disorder_seed = static_cast<std::uint64_t>(seed);
  return spec;
}

void walk_spec_to_config(const WalkSpec& spec, Config& config, const std::string& section) {
  auto put = [&](const std::string& k, std::string v) { config.set(section, k, std::move(v)); };
  auto put_pair = [&](const std::string& suffix, const CoinAngles& a) {
    put("theta1" + suffix, csv::format(a.theta1));
    put("theta2" + suffix, csv::format(a.theta2));
  };
  put("kind", std::string(to_string(spec.kind)));
  put("boundary", spec.lattice.boundary() == Boundary::periodic ? "periodic" : "open");
  put("first_position", std::to_string(spec.lattice.first_position()));
  put("last_position", std::to_string(spec.lattice.last_position()));
  put("layout", spec.coins.layout_name());
  if (const auto* h = std::get_if<Homogeneous>(&spec.coins.layout)) {
    put_pair("", h->angles);
  } else if (const auto* io = std::get_if<InnerOuter>(&spec.coins.layout)) {
    put("half_width", std::to_string(io->half_width));
    put_pair("_inner", io->inner);
    put_pair("_outer", io->outer);
  } else if (const auto* lr = std::get_if<LeftRight>(&spec.coins.layout)) {
    put_pair("_left", lr->left);
    put_pair("_right", lr->right);
  }
  put("gamma", csv::format(spec.gamma));
  put("delta", csv::format(spec.coins.delta));
  put("disorder_amplitude", csv::format(spec.coins.disorder_amplitude));
  put("disorder_seed", std::to_string(spec.coins.disorder_seed));
}

}  // namespace ptqw
