#include "ptqw/lattice.hpp"

#include <algorithm>
#include <cstdlib>

namespace ptqw {

Lattice Lattice::centered(std::int64_t num_sites, Boundary boundary) {
  if (num_sites <= 0) throw PreconditionError("lattice needs a positive number of sites");
  return Lattice(-(num_sites - 1) / 2, num_sites, boundary);
}

Lattice Lattice::range(std::int64_t first, std::int64_t last, Boundary boundary) {
  if (last < first) throw PreconditionError("lattice range is empty");
  return Lattice(first, last - first + 1, boundary);
}

std::optional<std::int64_t> Lattice::site_index(std::int64_t x) const {
  std::int64_t i = x - first_;
  if (i >= 0 && i < num_sites_) return i;
  if (boundary_ == Boundary::open) return std::nullopt;
  i %= num_sites_;
  if (i < 0) i += num_sites_;
  return i;
}

std::int64_t Lattice::distance(std::int64_t x, std::int64_t y) const {
  std::int64_t d = std::llabs(x - y);
  if (boundary_ == Boundary::periodic) {
    d %= num_sites_;
    d = std::min(d, num_sites_ - d);
  }
  return d;
}

}  // namespace ptqw
