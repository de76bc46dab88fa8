#pragma once

#include <optional>
#include <string>

#include "ptqw/walk.hpp"

namespace ptqw {

/// Pauli matrices sigma_0 ... sigma_3.
namespace pauli {
Matrix2c sigma0();
Matrix2c sigma1();
Matrix2c sigma2();
Matrix2c sigma3();
}  // namespace pauli

/// Symmetry operators acting on (position x internal) space.
namespace symmetry_operator {
/// PT = sum_x |-x><x| (x) sigma_3. Requires a parity-closed lattice.
SparseMatrixXc parity_time(const Lattice& lattice);
/// T = 1 (x) sigma_1 (TRS-dagger).
SparseMatrixXc time_reversal(const Lattice& lattice);
/// Xi = 1 (x) sigma_0 (PHS-dagger).
SparseMatrixXc particle_hole(const Lattice& lattice);
/// Gamma = 1 (x) sigma_1 (chiral).
SparseMatrixXc chiral(const Lattice& lattice);
/// tau_3 in the sublattice-ordered basis: +1 on even positions, -1 on odd.
SparseMatrixXc sublattice_sign(const Lattice& lattice);
}  // namespace symmetry_operator

enum class SublatticeForm { block_diagonal, block_off_diagonal, none };

std::string_view to_string(SublatticeForm form);

/// Operator rewritten in the basis ordered (even positions, odd positions).
struct SublatticeBlocks {
  SparseMatrixXc reordered;
  Eigen::Index even_dim = 0;
  SublatticeForm form = SublatticeForm::none;
  Real diagonal_norm = 0;      // Frobenius norm of the even-even and odd-odd blocks
  Real off_diagonal_norm = 0;  // Frobenius norm of the even-odd and odd-even blocks
  Real anticommutation_residual = 0;  // || tau3 U tau3 + U ||

  SparseMatrixXc block(bool even_rows, bool even_cols) const;
};

/// Reorders op into even/odd blocks and reports which block form holds.
/// Periodic lattices need an even number of sites.
SublatticeBlocks sublattice_reorder(const WalkOperator& op, Real tol = 1e-12);

struct SymmetryCheck {
  bool evaluated = false;
  Real residual = 0;
  bool holds = false;
  std::string note;
};

/// Residual norms of the PT, TRS-dagger, PHS-dagger and chiral relations.
/// A relation holds when its residual is below tolerance * ||U||.
struct SymmetryReport {
  Real operator_norm = 0;
  Real tolerance = 1e-10;
  SymmetryCheck parity_time;    // || (PT) U* (PT)^-1 U - 1 ||
  SymmetryCheck time_reversal;  // || T U^T T^-1 - U ||
  SymmetryCheck particle_hole;  // || Xi U* Xi^-1 - U ||
  SymmetryCheck chiral;         // || Gamma U^dagger Gamma^-1 - U ||
  std::string note;
};

SymmetryReport verify_symmetries(const WalkOperator& op, Real tolerance = 1e-10);

}  // namespace ptqw
