#pragma once

#include <fstream>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace ptqw::csv {

/// Fixed float formatting for artifacts: 17 significant digits, '.' separator.
std::string format(double value);

/// Writes comma-separated cells followed by '\n'.
class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void header(std::initializer_list<std::string_view> names);

  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((put(cells, first)), ...);
    out_ << '\n';
  }

 private:
  void put(double v, bool& first) { sep(first); out_ << format(v); }
  void put(int v, bool& first) { sep(first); out_ << v; }
  void put(long v, bool& first) { sep(first); out_ << v; }
  void put(long long v, bool& first) { sep(first); out_ << v; }
  void put(unsigned long v, bool& first) { sep(first); out_ << v; }
  void put(unsigned long long v, bool& first) { sep(first); out_ << v; }
  void put(bool v, bool& first) { sep(first); out_ << (v ? "true" : "false"); }
  void put(std::string_view v, bool& first) { sep(first); out_ << v; }
  void put(const std::string& v, bool& first) { sep(first); out_ << v; }
  void put(const char* v, bool& first) { sep(first); out_ << v; }

  void sep(bool& first) {
    if (!first) out_ << ',';
    first = false;
  }

  std::ostream& out_;
};

}  // namespace ptqw::csv
