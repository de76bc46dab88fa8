#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ptqw/lattice.hpp"

namespace ptqw {

/// Pair of coin angles (theta1, theta2) in radians.
struct CoinAngles {
  Real theta1 = 0;
  Real theta2 = 0;

  friend bool operator==(const CoinAngles&, const CoinAngles&) = default;
};

struct Homogeneous {
  CoinAngles angles;
  friend bool operator==(const Homogeneous&, const Homogeneous&) = default;
};

/// inner angles for |x| < half_width, outer angles for |x| >= half_width.
struct InnerOuter {
  std::int64_t half_width = 50;
  CoinAngles inner;
  CoinAngles outer;
  friend bool operator==(const InnerOuter&, const InnerOuter&) = default;
};

/// left angles for x <= 0, right angles for x > 0.
struct LeftRight {
  CoinAngles left;
  CoinAngles right;
  friend bool operator==(const LeftRight&, const LeftRight&) = default;
};

using CoinLayout = std::variant<Homogeneous, InnerOuter, LeftRight>;

/// Coin slots of the three-step walk, in order of application:
/// C(theta1) acts first, C(theta2 + delta) second, C(theta2) last.
enum class CoinSlot : int { first = 0, middle = 1, last = 2 };

/// Position-dependent coin angles with an optional perturbation delta and
/// uniform disorder of amplitude disorder_amplitude.
struct CoinProfile {
  CoinLayout layout = Homogeneous{};
  Real delta = 0;
  Real disorder_amplitude = 0;
  std::uint64_t disorder_seed = 0;

  static CoinProfile homogeneous(Real theta1, Real theta2);
  static CoinProfile inner_outer(std::int64_t half_width, CoinAngles inner, CoinAngles outer);
  static CoinProfile left_right(CoinAngles left, CoinAngles right);

  /// Layout angles at x, without perturbation or disorder.
  CoinAngles base_angles(std::int64_t x) const;

  /// Uniform draw in [-disorder_amplitude, disorder_amplitude] for (seed, x, slot).
  /// Each (seed, position, slot) triple is an independent counter; the draw is a
  /// pure function of its key.
  Real disorder_offset(std::int64_t x, CoinSlot slot) const;

  /// Interfaces between consecutive sites (x, x+1) whose base angles differ,
  /// identified by the left site x. Under a periodic boundary the pair
  /// (last, first) is included when the angles differ across the wrap.
  std::vector<std::int64_t> interfaces(const Lattice& lattice) const;

  /// Exact check of theta_j(-x) == theta_j(x) over the lattice.
  bool parity_symmetric(const Lattice& lattice) const;

  bool finite() const;

  std::string layout_name() const;

  friend bool operator==(const CoinProfile&, const CoinProfile&) = default;
};

}  // namespace ptqw
