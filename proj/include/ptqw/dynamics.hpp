#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ptqw/walk.hpp"

namespace ptqw {

/// Amplitudes over positions first_position ... first_position + size/2 - 1,
/// two internal components per site.
struct WalkerState {
  std::int64_t first_position = 0;
  VectorXc amplitudes;
  std::int64_t t = 0;

  std::int64_t num_sites() const { return amplitudes.size() / 2; }
};

/// |x> (x) (coin_l |L> + coin_r |R>), normalized.
WalkerState localized_state(std::int64_t x, Complex coin_l, Complex coin_r);

/// |0> (x) (|L> + i|R>) / sqrt 2.
WalkerState default_initial_state();

struct Snapshot {
  std::int64_t t = 0;
  std::int64_t first_position = 0;
  Eigen::VectorXd probability;  // per site, normalized to unit total
};

struct EvolutionTrace {
  std::vector<Real> p0_raw;         // |a_0|^2 + |b_0|^2 of the unnormalized state
  std::vector<Real> p0_normalized;  // the same divided by ||psi(t)||^2
  std::vector<Real> norm;           // ||psi(t)||, raw
  std::vector<Snapshot> snapshots;
  Real leaked_probability = 0;      // weight lost past the lattice cap
  Real log_scale = 0;               // accumulated log rescaling of the stored amplitudes
  int rescalings = 0;
  std::int64_t final_window_sites = 0;

  std::int64_t steps() const { return static_cast<std::int64_t>(p0_raw.size()) - 1; }
};

struct EvolveOptions {
  /// Sites of the open lattice the walk runs on; default 2 (hops T) + 128.
  std::optional<std::int64_t> lattice_sites;
  std::int64_t max_sites = 4'000'000;
  std::vector<std::int64_t> snapshot_times;
  Real rescale_above = 1e100;
};

/// |psi(t)> = U^t |psi(0)> on an open lattice centred at 0 that is large
/// enough for the walker never to reach its edge. Only the active window is
/// touched; it grows by the operator bandwidth each step.
/// spec.lattice is ignored; the coin profile, gamma and kind are used.
EvolutionTrace evolve(const WalkSpec& spec, const WalkerState& initial, std::int64_t steps,
                      const EvolveOptions& options = {});

struct DetectedMode {
  enum class Family { omega_delta, two_omega_delta, pi_minus_two_omega_delta, pi_minus_omega_delta, pi, other };
  Real omega = 0;
  Real magnitude = 0;
  Real background = 0;
  Family family = Family::other;
};

std::string_view to_string(DetectedMode::Family f);

struct FourierSpectrum {
  std::vector<Real> omegas;  // 2 pi n / (T + 1)
  std::vector<Complex> c;
  std::vector<DetectedMode> detected_modes;

  Real bin_width() const { return omegas.size() > 1 ? omegas[1] : 2 * kPi; }
};

/// c(omega_n) = sum_t p0(t) e^{-i omega_n t}, evaluated directly.
FourierSpectrum dft(std::span<const Real> p0);
std::vector<Real> inverse_dft(std::span<const Complex> c);

enum class Parity { odd, even };
std::string_view to_string(Parity p);

struct ModeOptions {
  Real kappa = 6;               // background = median + kappa IQR
  int neighborhood = 64;        // bins in the sliding band
  Real max_omega_delta = 0.1 * kPi;  // upper bound for a defective-pair frequency
  int slack_bins = 2;
  Real relative_floor = 1e-10;  // peaks below this fraction of |c_0| are rounding noise
};

struct ModeHint {
  std::optional<Real> omega_delta;
  std::optional<Parity> parity;  // resolves a lone low-frequency peak
};

/// Local maxima of |c| above the sliding background on (0, pi], tagged to the
/// omega_delta families. Without a frequency hint, omega_delta is taken from
/// a low peak that has a partner at twice its frequency; a lone low peak is
/// omega_delta for odd parity and 2 omega_delta for even parity.
std::vector<DetectedMode> detect_modes(const FourierSpectrum& spectrum, const ModeHint& hint = {},
                                       const ModeOptions& options = {});

enum class GapRegime { large, small };
std::string_view to_string(GapRegime g);

using FamilySet = std::set<DetectedMode::Family>;

FamilySet predict_mode_families(int delta_nu, GapRegime regime);
/// Named families present in a mode list; "other" is dropped.
FamilySet families_of(std::span<const DetectedMode> modes);

struct ParityOptions {
  std::int64_t t_begin = 12;
  std::int64_t t_end = 24;
  Real threshold = 0.05;
};

/// Mean normalized p0 over [t_begin, t_end].
Real short_time_persistence(const EvolutionTrace& trace, const ParityOptions& options = {});

struct EdgeCountReport {
  Parity parity = Parity::even;
  Real persistence = 0;
  std::vector<DetectedMode> modes;
  std::set<int> consistent_delta_nu;
  bool ambiguous = false;
  bool matches_prediction = false;  // observed families equal the prediction for the inferred value
  std::string evidence;
};

struct InferOptions {
  std::int64_t steps = 10'000;
  GapRegime regime = GapRegime::large;
  std::optional<Real> omega_delta_hint;
  ParityOptions parity;
  ModeOptions modes;
  EvolveOptions evolve;
};

/// Evolves the left/right walk U_delta from the default initial state and
/// reads the edge-state count off the short-time persistence of p0 and the
/// mode families of its spectrum.
EdgeCountReport infer_edge_count(CoinAngles left, CoinAngles right, Real delta, Real gamma,
                                 const InferOptions& options = {});

void write_trace_csv(std::ostream& out, const EvolutionTrace& trace);
void write_fourier_csv(std::ostream& out, const FourierSpectrum& spectrum);
void write_snapshot_csv(std::ostream& out, const Snapshot& snapshot);

}  // namespace ptqw
