#include "ptqw/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ptqw/csv.hpp"

namespace ptqw {

namespace {

using Family = DetectedMode::Family;

/// Linear-interpolated quantile of a sorted sample.
Real quantile(const std::vector<Real>& sorted, Real q) {
  if (sorted.empty()) return 0;
  const Real pos = q * static_cast<Real>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const std::size_t j = std::min(i + 1, sorted.size() - 1);
  return sorted[i] + (pos - static_cast<Real>(i)) * (sorted[j] - sorted[i]);
}

/// e^{-2 pi i k / m} for k = 0 ... m-1.
std::vector<Complex> twiddles(std::size_t m) {
  std::vector<Complex> w(m);
  for (std::size_t k = 0; k < m; ++k)
    w[k] = std::polar(1.0, -2 * kPi * static_cast<Real>(k) / static_cast<Real>(m));
  return w;
}

void tag(std::vector<DetectedMode>& modes, std::optional<Real> omega_delta, Real bin,
         const ModeOptions& options) {
  const Real pi_tol = options.slack_bins * bin;
  for (auto& m : modes) {
    m.family = Family::other;
    if (std::abs(m.omega - kPi) <= pi_tol) {
      m.family = Family::pi;
      continue;
    }
    if (!omega_delta) continue;
    const Real w = *omega_delta;
    const Real tol = options.slack_bins * bin + 0.05 * w;
    const std::pair<Family, Real> targets[] = {
        {Family::omega_delta, w},
        {Family::two_omega_delta, 2 * w},
        {Family::pi_minus_two_omega_delta, kPi - 2 * w},
        {Family::pi_minus_omega_delta, kPi - w},
    };
    Real best = tol;
    for (const auto& [family, target] : targets) {
      const Real d = std::abs(m.omega - target);
      if (d <= best) {
        best = d;
        m.family = family;
      }
    }
  }
}

}  // namespace

WalkerState localized_state(std::int64_t x, Complex coin_l, Complex coin_r) {
  const Real n = std::sqrt(std::norm(coin_l) + std::norm(coin_r));
  if (!(n > 0)) throw PreconditionError("initial coin state must be non-zero");
  WalkerState s;
  s.first_position = x;
  s.amplitudes.resize(2);
  s.amplitudes << coin_l / n, coin_r / n;
  return s;
}

WalkerState default_initial_state() { return localized_state(0, Complex(1, 0), Complex(0, 1)); }

EvolutionTrace evolve(const WalkSpec& spec, const WalkerState& initial, std::int64_t steps,
                      const EvolveOptions& options) {
  if (steps < 0) throw PreconditionError("steps must be non-negative");
  if (initial.amplitudes.size() == 0 || initial.amplitudes.size() % 2 != 0)
    throw PreconditionError("initial state needs two components per site");
  if (std::abs(initial.amplitudes.norm() - 1) > 1e-12)
    throw PreconditionError("initial state must be normalized");

  const std::int64_t hops = hops_per_step(spec.kind);
  const std::int64_t reach =
      std::max(std::abs(initial.first_position), std::abs(initial.first_position + initial.num_sites() - 1));
  const std::int64_t half = options.lattice_sites ? (*options.lattice_sites - 1) / 2 : hops * steps + 64 + reach;
  const std::int64_t sites = 2 * half + 1;
  if (sites > options.max_sites)
    throw PreconditionError("evolution window exceeds the configured site cap");

  WalkSpec s = spec;
  s.lattice = Lattice::centered(sites, Boundary::open);
  const WalkOperator op = build_operator(s);
  const Lattice& lat = s.lattice;
  const std::int64_t band = std::max<std::int64_t>(op.bandwidth, 1);

  VectorXc psi = VectorXc::Zero(lat.dim());
  VectorXc next = VectorXc::Zero(lat.dim());
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  {
    const auto first = lat.site_index(initial.first_position);
    const auto last = lat.site_index(initial.first_position + initial.num_sites() - 1);
    if (!first || !last) throw PreconditionError("initial state lies outside the evolution lattice");
    lo = *first;
    hi = *last;
    psi.segment(2 * lo, initial.amplitudes.size()) = initial.amplitudes;
  }
  const auto origin = lat.site_index(0);

  EvolutionTrace trace;
  trace.p0_raw.reserve(static_cast<std::size_t>(steps + 1));
  trace.p0_normalized.reserve(static_cast<std::size_t>(steps + 1));
  trace.norm.reserve(static_cast<std::size_t>(steps + 1));
  std::vector<std::int64_t> snaps = options.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  auto snap_it = snaps.begin();

  auto record = [&](std::int64_t t) {
    const Real norm2 = psi.segment(2 * lo, 2 * (hi - lo + 1)).squaredNorm();
    const Real at0 = origin ? std::norm(psi(2 * *origin)) + std::norm(psi(2 * *origin + 1)) : 0.0;
    trace.p0_raw.push_back(at0 * std::exp(2 * trace.log_scale));
    trace.p0_normalized.push_back(norm2 > 0 ? at0 / norm2 : 0.0);
    trace.norm.push_back(std::sqrt(norm2) * std::exp(trace.log_scale));
    while (snap_it != snaps.end() && *snap_it == t) {
      Snapshot shot{t, lat.position(lo), Eigen::VectorXd(hi - lo + 1)};
      for (std::int64_t i = lo; i <= hi; ++i)
        shot.probability(i - lo) = (std::norm(psi(2 * i)) + std::norm(psi(2 * i + 1))) / norm2;
      trace.snapshots.push_back(std::move(shot));
      ++snap_it;
    }
  };
  while (snap_it != snaps.end() && *snap_it < 0) ++snap_it;

  record(0);
  for (std::int64_t t = 1; t <= steps; ++t) {
    if (lo - band < 0 || hi + band > lat.num_sites() - 1) {
      // Amplitude within one bandwidth of the lattice edge may be carried off it.
      Real edge = 0;
      const Real total = psi.segment(2 * lo, 2 * (hi - lo + 1)).squaredNorm();
      for (std::int64_t i = lo; i <= hi; ++i)
        if (i < band || i > lat.num_sites() - 1 - band) edge += std::norm(psi(2 * i)) + std::norm(psi(2 * i + 1));
      if (total > 0) trace.leaked_probability += edge / total;
    }
    lo = std::max<std::int64_t>(lo - band, 0);
    hi = std::min<std::int64_t>(hi + band, lat.num_sites() - 1);
    for (Eigen::Index r = 2 * lo; r < 2 * (hi + 1); ++r) {
      Complex acc = 0;
      for (SparseMatrixXc::InnerIterator it(op.matrix, r); it; ++it) acc += it.value() * psi(it.col());
      next(r) = acc;
    }
    psi.swap(next);

    const Real n = psi.segment(2 * lo, 2 * (hi - lo + 1)).norm();
    if (n > options.rescale_above || (n > 0 && n < 1 / options.rescale_above)) {
      psi.segment(2 * lo, 2 * (hi - lo + 1)) /= n;
      trace.log_scale += std::log(n);
      ++trace.rescalings;
    }
    record(t);
  }
  trace.final_window_sites = hi - lo + 1;
  return trace;
}

std::string_view to_string(Family f) {
  switch (f) {
    case Family::omega_delta: return "omega_delta";
    case Family::two_omega_delta: return "2omega_delta";
    case Family::pi_minus_two_omega_delta: return "pi-2omega_delta";
    case Family::pi_minus_omega_delta: return "pi-omega_delta";
    case Family::pi: return "pi";
    case Family::other: return "other";
  }
  return "other";
}

FourierSpectrum dft(std::span<const Real> p0) {
  const std::size_t m = p0.size();
  FourierSpectrum s;
  s.omegas.resize(m);
  s.c.assign(m, Complex(0));
  if (m == 0) return s;
  const std::vector<Complex> w = twiddles(m);
  for (std::size_t n = 0; n < m; ++n) {
    s.omegas[n] = 2 * kPi * static_cast<Real>(n) / static_cast<Real>(m);
    Complex acc = 0;
    std::size_t k = 0;  // (n t) mod m
    for (std::size_t t = 0; t < m; ++t) {
      acc += p0[t] * w[k];
      k += n;
      if (k >= m) k -= m;
    }
    s.c[n] = acc;
  }
  return s;
}

std::vector<Real> inverse_dft(std::span<const Complex> c) {
  const std::size_t m = c.size();
  std::vector<Real> p(m, 0.0);
  if (m == 0) return p;
  const std::vector<Complex> w = twiddles(m);
  for (std::size_t t = 0; t < m; ++t) {
    Complex acc = 0;
    std::size_t k = 0;
    for (std::size_t n = 0; n < m; ++n) {
      acc += c[n] * std::conj(w[k]);
      k += t;
      if (k >= m) k -= m;
    }
    p[t] = acc.real() / static_cast<Real>(m);
  }
  return p;
}

std::string_view to_string(Parity p) { return p == Parity::odd ? "odd" : "even"; }
std::string_view to_string(GapRegime g) { return g == GapRegime::large ? "large" : "small"; }

std::vector<DetectedMode> detect_modes(const FourierSpectrum& spectrum, const ModeHint& hint,
                                       const ModeOptions& options) {
  const std::size_t m = spectrum.c.size();
  std::vector<DetectedMode> modes;
  if (m < 4) return modes;
  std::vector<Real> a(m);
  for (std::size_t i = 0; i < m; ++i) a[i] = std::abs(spectrum.c[i]);
  const std::size_t last = m / 2;  // bins 1 ... last cover (0, pi]
  const bool has_pi_bin = m % 2 == 0;
  const auto reach = static_cast<std::size_t>(options.neighborhood / 2);

  const Real floor = options.relative_floor * a[0];
  std::vector<Real> band;
  for (std::size_t n = 1; n <= last; ++n) {
    if (a[n] <= floor) continue;
    const Real left = a[n - 1];
    const Real right = a[(n + 1) % m];
    if (a[n] < left || a[n] < right) continue;
    band.clear();
    const std::size_t from = n > reach ? n - reach : 1;
    const std::size_t to = std::min(last, n + reach);
    for (std::size_t j = from; j <= to; ++j) {
      if (j == n || (has_pi_bin && j == last)) continue;
      band.push_back(a[j]);
    }
    std::sort(band.begin(), band.end());
    const Real q1 = quantile(band, 0.25), med = quantile(band, 0.5), q3 = quantile(band, 0.75);
    const Real background = med + options.kappa * (q3 - q1);
    if (a[n] > background) modes.push_back({spectrum.omegas[n], a[n], background, Family::other});
  }

  const Real bin = spectrum.bin_width();
  std::optional<Real> omega_delta = hint.omega_delta;
  if (!omega_delta) {
    const Real tol = options.slack_bins * bin;
    for (const auto& p : modes) {
      if (p.omega > options.max_omega_delta) break;
      for (const auto& q : modes) {
        if (std::abs(q.omega - 2 * p.omega) <= tol + 0.05 * p.omega) {
          omega_delta = p.omega;
          break;
        }
      }
      if (omega_delta) break;
    }
    if (!omega_delta && hint.parity && !modes.empty() && modes.front().omega <= 2 * options.max_omega_delta) {
      const Real lowest = modes.front().omega;
      if (*hint.parity == Parity::even)
        omega_delta = lowest / 2;
      else if (lowest <= options.max_omega_delta)
        omega_delta = lowest;
    }
  }
  tag(modes, omega_delta, bin, options);
  return modes;
}

FamilySet predict_mode_families(int delta_nu, GapRegime regime) {
  switch (delta_nu) {
    case 3:
      if (regime == GapRegime::small) return {Family::omega_delta, Family::pi_minus_omega_delta, Family::pi};
      return {Family::omega_delta, Family::two_omega_delta, Family::pi_minus_two_omega_delta,
              Family::pi_minus_omega_delta, Family::pi};
    case 2:
      return {Family::two_omega_delta, Family::pi_minus_two_omega_delta, Family::pi};
    case 1:
      return {Family::pi};
    default:
      throw PreconditionError("delta_nu must be 1, 2 or 3");
  }
}

FamilySet families_of(std::span<const DetectedMode> modes) {
  FamilySet out;
  for (const auto& m : modes)
    if (m.family != Family::other) out.insert(m.family);
  return out;
}

Real short_time_persistence(const EvolutionTrace& trace, const ParityOptions& options) {
  if (options.t_begin < 0 || options.t_end < options.t_begin || trace.steps() < options.t_end)
    throw PreconditionError("trace too short for the persistence window");
  Real sum = 0;
  for (std::int64_t t = options.t_begin; t <= options.t_end; ++t) sum += trace.p0_normalized[t];
  return sum / static_cast<Real>(options.t_end - options.t_begin + 1);
}

EdgeCountReport infer_edge_count(CoinAngles left, CoinAngles right, Real delta, Real gamma,
                                 const InferOptions& options) {
  WalkSpec spec;
  spec.coins = CoinProfile::left_right(left, right);
  spec.coins.delta = delta;
  spec.gamma = gamma;
  spec.kind = WalkKind::three_step_perturbed;

  const EvolutionTrace trace = evolve(spec, default_initial_state(), options.steps, options.evolve);
  EdgeCountReport r;
  r.persistence = short_time_persistence(trace, options.parity);
  r.parity = r.persistence > options.parity.threshold ? Parity::odd : Parity::even;

  const FourierSpectrum spectrum = dft(trace.p0_normalized);
  r.modes = detect_modes(spectrum, {options.omega_delta_hint, r.parity}, options.modes);
  const FamilySet seen = families_of(r.modes);
  const bool odd_family = seen.count(Family::omega_delta) || seen.count(Family::pi_minus_omega_delta);
  const bool even_family =
      seen.count(Family::two_omega_delta) || seen.count(Family::pi_minus_two_omega_delta);

  r.evidence = "persistence=" + csv::format(r.persistence) + " parity=" + std::string(to_string(r.parity)) +
               " families=";
  for (auto f : seen) r.evidence += std::string(to_string(f)) + ";";

  if (r.parity == Parity::odd) {
    if (odd_family) {
      r.consistent_delta_nu = {3};
    } else if (even_family) {
      r.ambiguous = true;
      r.consistent_delta_nu = {1, 3};
    } else {
      r.consistent_delta_nu = {1};
    }
  } else {
    if (odd_family) {
      r.ambiguous = true;
    } else if (even_family) {
      r.consistent_delta_nu = {2};
    } else {
      r.consistent_delta_nu = {0, 2};
    }
  }

  if (r.consistent_delta_nu.size() == 1 && *r.consistent_delta_nu.begin() > 0) {
    const int dnu = *r.consistent_delta_nu.begin();
    const FamilySet predicted = predict_mode_families(dnu, options.regime);
    FamilySet allowed = predicted;
    if (dnu == 3 && options.regime == GapRegime::small) {
      allowed.insert(Family::two_omega_delta);
      allowed.insert(Family::pi_minus_two_omega_delta);
    }
    r.matches_prediction = std::includes(seen.begin(), seen.end(), predicted.begin(), predicted.end()) &&
                           std::includes(allowed.begin(), allowed.end(), seen.begin(), seen.end());
  }
  return r;
}

void write_trace_csv(std::ostream& out, const EvolutionTrace& trace) {
  csv::Writer w(out);
  w.header({"t", "p0_raw", "p0_normalized"});
  for (std::size_t t = 0; t < trace.p0_raw.size(); ++t)
    w.row(static_cast<unsigned long long>(t), trace.p0_raw[t], trace.p0_normalized[t]);
}

void write_fourier_csv(std::ostream& out, const FourierSpectrum& spectrum) {
  csv::Writer w(out);
  w.header({"omega_over_pi", "abs_c"});
  for (std::size_t n = 0; n < spectrum.c.size(); ++n)
    w.row(spectrum.omegas[n] / kPi, std::abs(spectrum.c[n]));
}

void write_snapshot_csv(std::ostream& out, const Snapshot& snapshot) {
  csv::Writer w(out);
  w.header({"x", "prob"});
  for (Eigen::Index i = 0; i < snapshot.probability.size(); ++i)
    w.row(static_cast<long long>(snapshot.first_position + i), snapshot.probability(i));
}

}  // namespace ptqw
