#include "ptqw/symmetry.hpp"

#include <cmath>
#include <vector>

namespace ptqw {

namespace pauli {
Matrix2c sigma0() { return Matrix2c::Identity(); }
Matrix2c sigma1() {
  Matrix2c s;
  s << 0, 1, 1, 0;
  return s;
}
Matrix2c sigma2() {
  Matrix2c s;
  s << 0, Complex(0, -1), Complex(0, 1), 0;
  return s;
}
Matrix2c sigma3() {
  Matrix2c s;
  s << 1, 0, 0, -1;
  return s;
}
}  // namespace pauli

namespace {

bool even_position(std::int64_t x) { return x % 2 == 0; }

Real frobenius(const SparseMatrixXc& m) { return m.norm(); }

}  // namespace

namespace symmetry_operator {

SparseMatrixXc parity_time(const Lattice& lattice) {
  if (!lattice.parity_closed())
    throw PreconditionError("parity needs a lattice symmetric about x = 0");
  std::vector<Eigen::Triplet<Complex>> triplets;
  for (std::int64_t i = 0; i < lattice.num_sites(); ++i) {
    const std::int64_t j = *lattice.site_index(-lattice.position(i));
    triplets.emplace_back(2 * j, 2 * i, 1.0);
    triplets.emplace_back(2 * j + 1, 2 * i + 1, -1.0);
  }
  SparseMatrixXc m(lattice.dim(), lattice.dim());
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

SparseMatrixXc time_reversal(const Lattice& lattice) {
  return site_local_operator(lattice, [](std::int64_t) { return pauli::sigma1(); });
}

SparseMatrixXc particle_hole(const Lattice& lattice) {
  return site_local_operator(lattice, [](std::int64_t) { return pauli::sigma0(); });
}

SparseMatrixXc chiral(const Lattice& lattice) { return time_reversal(lattice); }

SparseMatrixXc sublattice_sign(const Lattice& lattice) {
  return site_local_operator(lattice, [](std::int64_t x) {
    return Matrix2c(even_position(x) ? pauli::sigma0() : Matrix2c(-pauli::sigma0()));
  });
}

}  // namespace symmetry_operator

std::string_view to_string(SublatticeForm form) {
  switch (form) {
    case SublatticeForm::block_diagonal:
      return "block_diagonal";
    case SublatticeForm::block_off_diagonal:
      return "block_off_diagonal";
    case SublatticeForm::none:
      return "none";
  }
  return "none";
}

SparseMatrixXc SublatticeBlocks::block(bool even_rows, bool even_cols) const {
  const Eigen::Index n = reordered.rows();
  const Eigen::Index r0 = even_rows ? 0 : even_dim;
  const Eigen::Index c0 = even_cols ? 0 : even_dim;
  const Eigen::Index nr = even_rows ? even_dim : n - even_dim;
  const Eigen::Index nc = even_cols ? even_dim : n - even_dim;
  return reordered.block(r0, c0, nr, nc);
}

SublatticeBlocks sublattice_reorder(const WalkOperator& op, Real tol) {
  const Lattice& lat = op.spec.lattice;
  if (lat.boundary() == Boundary::periodic && lat.num_sites() % 2 != 0)
    throw PreconditionError("sublattice split needs an even number of sites on a periodic lattice");

  // Even positions first, odd positions second, internal order preserved.
  Eigen::VectorXi perm(lat.dim());
  Eigen::Index next = 0;
  for (int pass = 0; pass < 2; ++pass) {
    for (std::int64_t i = 0; i < lat.num_sites(); ++i) {
      if (even_position(lat.position(i)) == (pass == 0)) {
        perm(2 * i) = static_cast<int>(next++);
        perm(2 * i + 1) = static_cast<int>(next++);
      }
    }
  }
  Eigen::Index even_dim = 0;
  for (std::int64_t i = 0; i < lat.num_sites(); ++i)
    if (even_position(lat.position(i))) even_dim += 2;

  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> p(perm);
  SublatticeBlocks out;
  out.even_dim = even_dim;
  out.reordered = SparseMatrixXc(p * op.matrix * p.transpose());

  out.diagonal_norm = std::hypot(frobenius(out.block(true, true)), frobenius(out.block(false, false)));
  out.off_diagonal_norm =
      std::hypot(frobenius(out.block(true, false)), frobenius(out.block(false, true)));

  const SparseMatrixXc tau = symmetry_operator::sublattice_sign(lat);
  out.anticommutation_residual = frobenius(SparseMatrixXc(tau * op.matrix * tau + op.matrix));

  const Real scale = frobenius(op.matrix);
  if (out.off_diagonal_norm <= tol * scale)
    out.form = SublatticeForm::block_diagonal;
  else if (out.diagonal_norm <= tol * scale)
    out.form = SublatticeForm::block_off_diagonal;
  else
    out.form = SublatticeForm::none;
  return out;
}

SymmetryReport verify_symmetries(const WalkOperator& op, Real tolerance) {
  const Lattice& lat = op.spec.lattice;
  const SparseMatrixXc& u = op.matrix;
  SymmetryReport r;
  r.tolerance = tolerance;
  r.operator_norm = frobenius(u);
  const Real bound = tolerance * r.operator_norm;
  if (!is_symmetric_frame(op.spec.kind))
    r.note = "operator is not in a symmetric time frame; relations are stated for that frame";

  auto finish = [bound](SymmetryCheck& c, Real residual) {
    c.evaluated = true;
    c.residual = residual;
    c.holds = residual < bound;
  };

  const SparseMatrixXc u_conj = u.conjugate();
  const SparseMatrixXc u_transpose = u.transpose();
  const SparseMatrixXc u_adjoint = u.adjoint();

  if (!lat.parity_closed()) {
    r.parity_time.note = "rejected: lattice is not symmetric about x = 0";
  } else if (!op.spec.coins.parity_symmetric(lat)) {
    r.parity_time.note = "rejected: coin profile violates theta_j(-x) = theta_j(x)";
  } else if (op.spec.kind == WalkKind::three_step_perturbed_disordered &&
             op.spec.coins.disorder_amplitude != 0) {
    r.parity_time.note = "rejected: disordered coins violate theta_j(-x) = theta_j(x)";
  } else {
    const SparseMatrixXc pt = symmetry_operator::parity_time(lat);
    SparseMatrixXc id(u.rows(), u.cols());
    id.setIdentity();
    // PT is real orthogonal, so (PT)^-1 = (PT)^T.
    const SparseMatrixXc lhs = pt * u_conj * SparseMatrixXc(pt.transpose()) * u;
    finish(r.parity_time, frobenius(SparseMatrixXc(lhs - id)));
  }

  const SparseMatrixXc t = symmetry_operator::time_reversal(lat);
  finish(r.time_reversal, frobenius(SparseMatrixXc(t * u_transpose * t - u)));

  const SparseMatrixXc xi = symmetry_operator::particle_hole(lat);
  finish(r.particle_hole, frobenius(SparseMatrixXc(xi * u_conj * xi - u)));

  const SparseMatrixXc gamma = symmetry_operator::chiral(lat);
  finish(r.chiral, frobenius(SparseMatrixXc(gamma * u_adjoint * gamma - u)));
  return r;
}

}  // namespace ptqw
