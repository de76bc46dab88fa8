#pragma once

#include <cstdint>
#include <optional>

#include "ptqw/types.hpp"

namespace ptqw {

enum class Boundary { periodic, open };

/// One-dimensional lattice of positions x = first, ..., first + num_sites - 1,
/// each carrying a two-dimensional internal space (|L>, |R>).
///
/// State index of (x, s) is 2 * (x - first) + s with s = 0 for L and s = 1 for R.
class Lattice {
 public:
  Lattice() = default;

  /// Centered lattice: x = -(N-1)/2 ... for odd N, x = -(N/2 - 1) ... N/2 for even N.
  static Lattice centered(std::int64_t num_sites, Boundary boundary = Boundary::periodic);

  /// Lattice covering the inclusive position range [first, last].
  static Lattice range(std::int64_t first, std::int64_t last,
                       Boundary boundary = Boundary::periodic);

  std::int64_t num_sites() const { return num_sites_; }
  std::int64_t first_position() const { return first_; }
  std::int64_t last_position() const { return first_ + num_sites_ - 1; }
  Boundary boundary() const { return boundary_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(2 * num_sites_); }

  std::int64_t position(std::int64_t site_index) const { return first_ + site_index; }
  bool contains(std::int64_t x) const { return x >= first_ && x <= last_position(); }

  /// Site index of x, wrapping under periodic boundary; empty if x falls off an open edge.
  std::optional<std::int64_t> site_index(std::int64_t x) const;

  /// Distance between two positions, measured around the ring when periodic.
  std::int64_t distance(std::int64_t x, std::int64_t y) const;

  /// True when -x is a lattice position for every lattice position x.
  bool parity_closed() const { return first_ == -last_position(); }

  friend bool operator==(const Lattice&, const Lattice&) = default;

 private:
  Lattice(std::int64_t first, std::int64_t num_sites, Boundary boundary)
      : first_(first), num_sites_(num_sites), boundary_(boundary) {}

  std::int64_t first_ = 0;
  std::int64_t num_sites_ = 0;
  Boundary boundary_ = Boundary::periodic;
};

}  // namespace ptqw
