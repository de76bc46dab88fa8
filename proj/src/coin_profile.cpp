#include "ptqw/coin_profile.hpp"

#include <cmath>
#include <cstdlib>

namespace ptqw {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite_angles(const CoinAngles& a) { return std::isfinite(a.theta1) && std::isfinite(a.theta2); }

}  // namespace

CoinProfile CoinProfile::homogeneous(Real theta1, Real theta2) {
  CoinProfile p;
  p.layout = Homogeneous{{theta1, theta2}};
  return p;
}

CoinProfile CoinProfile::inner_outer(std::int64_t half_width, CoinAngles inner, CoinAngles outer) {
  CoinProfile p;
  p.layout = InnerOuter{half_width, inner, outer};
  return p;
}

CoinProfile CoinProfile::left_right(CoinAngles left, CoinAngles right) {
  CoinProfile p;
  p.layout = LeftRight{left, right};
  return p;
}

CoinAngles CoinProfile::base_angles(std::int64_t x) const {
  return std::visit(overloaded{
                        [](const Homogeneous& h) { return h.angles; },
                        [x](const InnerOuter& io) {
                          return std::llabs(x) < io.half_width ? io.inner : io.outer;
                        },
                        [x](const LeftRight& lr) { return x <= 0 ? lr.left : lr.right; },
                    },
                    layout);
}

Real CoinProfile::disorder_offset(std::int64_t x, CoinSlot slot) const {
  if (disorder_amplitude == 0) return 0;
  std::uint64_t key = splitmix64(disorder_seed);
  key = splitmix64(key ^ static_cast<std::uint64_t>(x));
  key = splitmix64(key ^ static_cast<std::uint64_t>(slot));
  // 53 high bits -> [0, 1)
  Real u = static_cast<Real>(key >> 11) * 0x1.0p-53;
  return disorder_amplitude * (2 * u - 1);
}

std::vector<std::int64_t> CoinProfile::interfaces(const Lattice& lattice) const {
  std::vector<std::int64_t> out;
  for (std::int64_t x = lattice.first_position(); x < lattice.last_position(); ++x) {
    if (!(base_angles(x) == base_angles(x + 1))) out.push_back(x);
  }
  if (lattice.boundary() == Boundary::periodic && lattice.num_sites() > 1 &&
      !(base_angles(lattice.last_position()) == base_angles(lattice.first_position()))) {
    out.push_back(lattice.last_position());
  }
  return out;
}

bool CoinProfile::parity_symmetric(const Lattice& lattice) const {
  for (std::int64_t x = lattice.first_position(); x <= lattice.last_position(); ++x) {
    if (!lattice.contains(-x)) return false;
    if (!(base_angles(x) == base_angles(-x))) return false;
  }
  return true;
}

bool CoinProfile::finite() const {
  bool ok = std::isfinite(delta) && std::isfinite(disorder_amplitude);
  ok = ok && std::visit(overloaded{
                            [](const Homogeneous& h) { return finite_angles(h.angles); },
                            [](const InnerOuter& io) {
                              return finite_angles(io.inner) && finite_angles(io.outer);
                            },
                            [](const LeftRight& lr) {
                              return finite_angles(lr.left) && finite_angles(lr.right);
                            },
                        },
                        layout);
  return ok;
}

std::string CoinProfile::layout_name() const {
  return std::visit(overloaded{
                        [](const Homogeneous&) { return std::string("homogeneous"); },
                        [](const InnerOuter&) { return std::string("inner_outer"); },
                        [](const LeftRight&) { return std::string("left_right"); },
                    },
                    layout);
}

}  // namespace ptqw
