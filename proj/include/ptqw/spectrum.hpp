#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ptqw/bulk.hpp"
#include "ptqw/walk.hpp"

namespace ptqw {

enum class StateClass { bulk, edge_zero, edge_pi, defective_pair_member, impurity };

std::string_view to_string(StateClass c);

struct Eigenpair {
  Complex lambda;
  Complex eps;
  VectorXc right_vector;  // unit Euclidean norm; empty when vectors were not requested
  StateClass classification = StateClass::bulk;
  std::int64_t localization_center = 0;  // position of the largest site probability
  Real interface_weight = 0;             // probability within the window of any interface
  Real condition_number = 1;             // ||left|| ||right|| / |left^H right|
  bool ill_conditioned = false;          // condition_number > 1e12
  bool ambiguous = false;                // a classification criterion is within tolerance of its threshold
};

struct SpectrumCounts {
  int n_edge_zero = 0;
  int n_edge_pi = 0;
  int n_defective = 0;
  int n_impurity = 0;
  int n_bulk = 0;
  int n_ambiguous = 0;
};

/// Thresholds for classify_states. The window defaults to 10 sites for the
/// inner/outer layout and 50 sites for the left/right layout, whose states
/// spread further at the smaller gaps that layout is used with.
struct ClassifyOptions {
  Real tol_edge = 1e-6;     // on Re eps, radians
  Real tol_real = 1e-8;     // relative, on Im lambda
  std::optional<std::int64_t> window;
  Real weight_threshold = 0.5;
  Real defect_window = 0.1 * kPi;  // |Re eps| or pi - |Re eps| below this admits a defective pair
  Real conjugate_tol = 1e-8;       // relative match for the conjugate partner
};

std::int64_t default_window(const CoinProfile& coins);

struct EigenOptions {
  std::int64_t max_sites = 2000;
  bool compute_vectors = true;
  ClassifyOptions classify;
};

struct SpectrumResult {
  std::vector<Eigenpair> eigenpairs;
  SpectrumCounts counts;
  std::optional<Real> eps_m;
  WalkSpec spec;
  ClassifyOptions options;
  std::vector<std::string> warnings;
};

/// Eigenvalues and right eigenvectors of op, classified.
/// Throws NumericalError on solver failure and PreconditionError above max_sites.
SpectrumResult eigendecompose(const WalkOperator& op, const EigenOptions& options = {});

/// Assigns bulk / edge / defective / impurity labels and recomputes counts.
/// Needs right vectors.
void classify_states(SpectrumResult& result, const ClassifyOptions& options);

/// Probability per site, |a_x|^2 + |b_x|^2.
Eigen::VectorXd site_probability(const VectorXc& psi);

/// Minimum Re eps over bulk states with Re eps > 0.
Real minimum_bulk_quasienergy(const SpectrumResult& result);

/// |Re eps| of the defective pair closest to zero quasi-energy: the
/// frequency omega_delta at which that pair makes p0(t) oscillate.
std::optional<Real> defective_pair_frequency(const SpectrumResult& result);

struct LocalizationFit {
  Real length = 0;     // decay length of the probability, in sites
  Real r_squared = 0;
  int points = 0;
  bool reliable = false;  // r_squared >= 0.9
};

/// Exponential decay length from a least-squares fit of log probability
/// against distance from the localization center. The probability is
/// averaged over neighbouring sites first, since sublattice structure can
/// leave alternate sites nearly empty. The fit uses the decade below the
/// peak, widened one decade at a time (up to four) until it holds five
/// points. Throws PreconditionError for bulk states.
LocalizationFit localization_length(const Eigenpair& pair, const Lattice& lattice);

struct EdgeCountCell {
  CoinAngles outer;
  std::optional<SpectrumCounts> counts;  // empty: gap closed or failure
  std::string note;
};

struct EdgeMapOptions {
  std::int64_t num_sites = 801;
  std::int64_t half_width = 50;
  EigenOptions eigen;
  int threads = 1;
};

std::vector<EdgeCountCell> edge_count_map(std::span<const Real> theta1o_grid,
                                          std::span<const Real> theta2o_grid, CoinAngles inner,
                                          Real gamma, const EdgeMapOptions& options = {});

void write_spectrum_csv(std::ostream& out, const SpectrumResult& result);
/// Rows "x,prob" for one eigenvector.
void write_eigenvector_csv(std::ostream& out, const Eigenpair& pair, const Lattice& lattice);
void write_edge_map_csv(std::ostream& out, std::span<const EdgeCountCell> cells);

}  // namespace ptqw
