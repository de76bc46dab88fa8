#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ptqw/spectrum.hpp"

namespace ptqw {

enum class Regime { all_real, at_exceptional, conjugate_pairs };

std::string_view to_string(Regime r);

inline constexpr Real kImaginaryThreshold = 1e-8;

/// Localized states with Re eps at or near 0 or pi: edge states and
/// defective pair members.
struct LocalizedState {
  Complex lambda;
  StateClass classification = StateClass::bulk;
  VectorXc right_vector;
  int branch_id = -1;
};

struct DeltaPoint {
  Real delta = 0;
  std::vector<LocalizedState> states;
  Regime regime = Regime::all_real;
  Real max_abs_im = 0;
  int n_real_zero = 0;  // real localized eigenvalues with Re lambda > 0
  int n_real_pi = 0;    // real localized eigenvalues with Re lambda < 0
};

struct DeltaSweep {
  std::vector<DeltaPoint> points;  // ordered by delta, including refinement points
  std::optional<std::pair<Real, Real>> ep_bracket;  // first all_real -> conjugate_pairs change
  std::vector<std::string> notes;
};

struct PerturbationOptions {
  EigenOptions eigen;
  Real im_threshold = kImaginaryThreshold;
  Real jump_factor = 10;   // jump bound, as a multiple of the secant estimate
  Real jump_floor = 1e-3;  // smallest jump bound, absolute in lambda
  int max_refinements = 4; // step halvings per interval
  int threads = 1;
};

/// Localized spectrum of one operator with the regime label.
DeltaPoint analyze_localized(const WalkSpec& spec, Real delta, const PerturbationOptions& options);

/// Spectrum of the localized states along delta_list for the perturbed walk
/// built from base (whose kind is replaced by its perturbed counterpart).
/// Branches are matched by nearest neighbour; a match that moves further than
/// the jump bound halves the step.
DeltaSweep delta_sweep(const WalkSpec& base, std::span<const Real> delta_list,
                       const PerturbationOptions& options = {});

struct ExceptionalPoint {
  std::optional<Real> delta_ep;
  Real lo = 0;
  Real hi = 0;
  bool lower_bracket_failed = false;  // indicator already true at delta_lo
  bool upper_bracket_failed = false;  // indicator still false at delta_hi
  bool monotone = true;
  std::vector<std::pair<Real, Real>> brackets;  // every indicator change in the coarse scan
  Real coalescence_overlap = 0;  // |<v1|v2>| of the closest real pair at the lower end
  int evaluations = 0;
  std::string note;
};

struct EpOptions {
  Real tol_delta = 5e-4;
  int coarse_points = 4;
  PerturbationOptions perturbation;
};

/// Bisection on "max |Im lambda| over localized states > im_threshold".
ExceptionalPoint find_exceptional_point(const WalkSpec& base, Real delta_lo, Real delta_hi,
                                        const EpOptions& options = {});

struct SeedSummary {
  std::uint64_t seed = 0;
  Real max_abs_im_edge = 0;
  Regime regime = Regime::all_real;
  SpectrumCounts counts;
  std::string failure;
};

struct DisorderEnsemble {
  Real theta_r = 0;
  Real delta = 0;
  std::vector<SeedSummary> seeds;

  Real fraction(Regime r) const;
};

std::vector<std::uint64_t> default_seeds(int n_seeds = 32);

/// One disordered realization per seed at fixed delta.
DisorderEnsemble disorder_ensemble(const WalkSpec& base, Real theta_r,
                                   std::span<const std::uint64_t> seeds,
                                   const PerturbationOptions& options = {});

void write_sweep_csv(std::ostream& out, const DeltaSweep& sweep);
void write_ensemble_csv(std::ostream& out, const DisorderEnsemble& ensemble);

}  // namespace ptqw
