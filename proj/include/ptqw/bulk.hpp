#pragma once

#include <cmath>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ptqw/walk.hpp"

namespace ptqw {

/// Coefficients of U'_k = d0 s0 + d1 s1 + i d2 s2 + i d3 s3 for the homogeneous
/// three-step walk in the symmetric time frame, plus the phase of d2 + i d3.
template <typename Scalar>
struct BasicBlochCoefficients {
  Scalar k = 0;
  Scalar d0 = 0;
  Scalar d1 = 0;
  Scalar d2 = 0;
  Scalar d3 = 0;
  Scalar theta_k = 0;  // atan2(d3, d2)
  Scalar mag_d = 0;    // |d2 + i d3|

  /// d0^2 - d1^2 + d2^2 + d3^2, identically one.
  Scalar invariant() const { return d0 * d0 - d1 * d1 + d2 * d2 + d3 * d3; }
};

using BlochCoefficients = BasicBlochCoefficients<Real>;

template <typename Scalar>
BasicBlochCoefficients<Scalar> bloch_coefficients(Scalar theta1, Scalar theta2, Scalar gamma,
                                                  Scalar k) {
  using std::cos;
  using std::cosh;
  using std::sin;
  using std::sinh;
  const Scalar c1 = cos(theta1), s1 = sin(theta1);
  const Scalar c2 = cos(theta2), s2 = sin(theta2);
  const Scalar sin2t2 = sin(2 * theta2);
  const Scalar ch = cosh(2 * gamma), sh = sinh(2 * gamma);
  const Scalar ck = cos(k), c3k = cos(3 * k), sk = sin(k), s3k = sin(3 * k);

  BasicBlochCoefficients<Scalar> d;
  d.k = k;
  d.d0 = -(c1 * s2 * s2 + s1 * sin2t2 * ch) * ck + c1 * c2 * c2 * c3k;
  d.d1 = sin2t2 * sh * ck;
  d.d2 = (s1 * s2 * s2 - c1 * sin2t2 * ch) * ck - s1 * c2 * c2 * c3k;
  d.d3 = -s2 * s2 * sk + c2 * c2 * s3k;
  d.theta_k = std::atan2(d.d3, d.d2);
  d.mag_d = std::hypot(d.d2, d.d3);
  return d;
}

/// 2x2 momentum-space symbol of a homogeneous walk, built as the product of
/// the k-space factors S_k = diag(e^{ik}, e^{-ik}), C(theta), G.
/// Independent of the closed-form coefficients above.
Matrix2c bloch_matrix(WalkKind kind, CoinAngles angles, Real gamma, Real delta, Real k);

/// Uniform momentum grid of `resolution` points covering (-pi, pi].
std::vector<Real> momentum_grid(int resolution);

struct DispersionPoint {
  Real k = 0;
  Complex lambda_plus, lambda_minus;
  Complex eps_plus, eps_minus;
  bool pt_broken = false;  // |d0(k)| > 1
};

/// lambda_pm = d0 +- i sqrt(1 - d0^2); a real pair when |d0| > 1.
std::pair<Complex, Complex> bloch_eigenvalues(Real d0);

std::vector<DispersionPoint> dispersion(Real theta1, Real theta2, Real gamma,
                                        std::span<const Real> k_grid);

struct GapStatus {
  bool gap_open = false;
  Real min_gap_0 = 0;   // min_k |Re eps|
  Real min_gap_pi = 0;  // min_k (pi - |Re eps|)
  Real max_abs_d0 = 0;
  bool resolution_warning = false;  // max |d0| within 10 tol_gap of 1
};

inline constexpr Real kGapTolerance = 1e-9;
inline constexpr int kDefaultMomentumResolution = 8192;

GapStatus bulk_gap_status(Real theta1, Real theta2, Real gamma,
                          int k_resolution = kDefaultMomentumResolution,
                          Real tol_gap = kGapTolerance);

struct TopologicalNumber {
  int nu_prime = 0;
  Real nu_zero = 0;     // nu' / 2
  Real nu_pi = 0;       // nu' / 2
  Real nu_shifted = 0;  // nu' / 2 + 3/2
  bool gap_open = false;
  Real winding_residual = 0;  // |accumulated / 2pi - nu'|
  Real max_phase_step = 0;
};

class GapClosedError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ResolutionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Winding of d2(k) + i d3(k) around the origin over the closed k-loop, by
/// accumulating wrapped phase increments.
/// Throws GapClosedError when the bulk gap is closed and ResolutionError when a
/// single increment exceeds pi/2.
TopologicalNumber winding_number(Real theta1, Real theta2, Real gamma,
                                 int k_resolution = kDefaultMomentumResolution);

struct PhaseCell {
  Real theta1 = 0;
  Real theta2 = 0;
  Real gamma = 0;
  std::optional<TopologicalNumber> number;  // empty: gap closed or failure
  std::string failure;
};

std::vector<PhaseCell> phase_diagram(std::span<const Real> theta1_grid,
                                     std::span<const Real> theta2_grid, Real gamma,
                                     int k_resolution = kDefaultMomentumResolution);

/// All 2N eigenvalues lambda_pm(k_m), k_m = 2 pi m / N, of the homogeneous
/// symmetric-frame walk on a periodic ring of N sites.
std::vector<Complex> momentum_eigenvalues(Real theta1, Real theta2, Real gamma,
                                          std::int64_t num_sites);

void write_phase_diagram_csv(std::ostream& out, std::span<const PhaseCell> cells);
void write_dispersion_csv(std::ostream& out, std::span<const DispersionPoint> points);

}  // namespace ptqw
