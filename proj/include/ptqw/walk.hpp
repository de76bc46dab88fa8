#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ptqw/coin_profile.hpp"
#include "ptqw/lattice.hpp"

namespace ptqw {

/// Which time-evolution operator to build.
///
///   two_step                         G S R(t2) G^-1 S R(t1)
///   three_step                       G^-1 S C(t2) S C(t2) G S C(t1)
///   three_step_symmetric             C(t1/2) G^-1 S C(t2) S C(t2) G S C(t1/2)
///   three_step_perturbed             G^-1 S C(t2) S C(t2 + delta) G S C(t1)
///   three_step_perturbed_symmetric   C(t1/2) G^-1 S C(t2) S C(t2 + delta) G S C(t1/2)
///   three_step_perturbed_disordered  as three_step_perturbed with every coin slot
///                                    independently disordered
enum class WalkKind {
  two_step,
  three_step,
  three_step_symmetric,
  three_step_perturbed,
  three_step_perturbed_symmetric,
  three_step_perturbed_disordered,
};

std::string_view to_string(WalkKind kind);
WalkKind walk_kind_from_string(std::string_view name);

bool is_three_step(WalkKind kind);
bool is_perturbed(WalkKind kind);
bool is_symmetric_frame(WalkKind kind);

/// Number of position hops a single step can make.
int hops_per_step(WalkKind kind);

struct WalkSpec {
  Lattice lattice = Lattice::centered(801);
  CoinProfile coins;
  Real gamma = 0;
  WalkKind kind = WalkKind::three_step;

  friend bool operator==(const WalkSpec&, const WalkSpec&) = default;
};

/// A built time-evolution operator over (position x internal) space.
struct WalkOperator {
  SparseMatrixXc matrix;
  WalkSpec spec;
  int bandwidth = 0;

  Eigen::Index dim() const { return matrix.rows(); }
  MatrixXc dense() const { return MatrixXc(matrix); }
};

/// 2x2 coin C(theta) = [[cos, -sin], [sin, cos]].
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> coin_matrix(Scalar theta) {
  using std::cos;
  using std::sin;
  Eigen::Matrix<Scalar, 2, 2> c;
  c << cos(theta), -sin(theta), sin(theta), cos(theta);
  return c;
}

/// 2x2 coin R(theta) = [[cos, sin], [sin, -cos]] = C(theta) sigma_3.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> reflection_coin_matrix(Scalar theta) {
  using std::cos;
  using std::sin;
  Eigen::Matrix<Scalar, 2, 2> r;
  r << cos(theta), sin(theta), sin(theta), -cos(theta);
  return r;
}

/// Site-local operator sum_x |x><x| (x) block(x).
template <typename BlockFn>
SparseMatrixXc site_local_operator(const Lattice& lattice, BlockFn&& block) {
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(static_cast<std::size_t>(4 * lattice.num_sites()));
  for (std::int64_t i = 0; i < lattice.num_sites(); ++i) {
    const auto b = block(lattice.position(i));
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        if (b(r, c) != 0.0) triplets.emplace_back(2 * i + r, 2 * i + c, Complex(b(r, c)));
  }
  SparseMatrixXc m(lattice.dim(), lattice.dim());
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

/// S = sum_x |x-1><x| (x) |L><L| + |x+1><x| (x) |R><R|.
/// Amplitude shifted past an open edge is discarded.
SparseMatrixXc shift_operator(const Lattice& lattice);

/// G = 1 (x) diag(e^gamma, e^-gamma); pass -gamma for G^-1.
SparseMatrixXc gain_loss_operator(const Lattice& lattice, Real gamma);

/// Builds the operator selected by spec.kind as the exact product of its
/// coin, shift and gain/loss factors.
WalkOperator build_operator(const WalkSpec& spec);

/// Largest position hop among the structural nonzeros of m.
int position_bandwidth(const SparseMatrixXc& m, const Lattice& lattice);

/// Coordinate-list text: header "# dim=<2N> band=<b>", then "row col re im" lines.
void write_coordinate_list(std::ostream& out, const WalkOperator& op);

}  // namespace ptqw
