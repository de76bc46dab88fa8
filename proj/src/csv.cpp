#include "ptqw/csv.hpp"

#include <cstdio>

namespace ptqw::csv {

std::string format(double value) {
  if (value == 0) return "0";  // collapses -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void Writer::header(std::initializer_list<std::string_view> names) {
  bool first = true;
  for (auto n : names) put(n, first);
  out_ << '\n';
}

}  // namespace ptqw::csv
