#include "ptqw/bulk.hpp"

#include <algorithm>
#include <ostream>

#include "ptqw/csv.hpp"

namespace ptqw {

namespace {

Real wrap_phase(Real d) {
  d = std::remainder(d, 2 * kPi);  // [-pi, pi]
  return d;
}

}  // namespace

Matrix2c bloch_matrix(WalkKind kind, CoinAngles angles, Real gamma, Real delta, Real k) {
  const Complex i(0, 1);
  Matrix2c s = Matrix2c::Zero();
  s(0, 0) = std::exp(i * k);
  s(1, 1) = std::exp(-i * k);
  Matrix2c g = Matrix2c::Zero();
  g(0, 0) = std::exp(gamma);
  g(1, 1) = std::exp(-gamma);
  Matrix2c g_inv = Matrix2c::Zero();
  g_inv(0, 0) = std::exp(-gamma);
  g_inv(1, 1) = std::exp(gamma);
  const Real d = is_perturbed(kind) ? delta : 0.0;
  auto coin = [](Real t) { return coin_matrix<Real>(t).cast<Complex>().eval(); };

  if (kind == WalkKind::two_step) {
    auto r = [](Real t) { return reflection_coin_matrix<Real>(t).cast<Complex>().eval(); };
    return g * s * r(angles.theta2) * g_inv * s * r(angles.theta1);
  }
  const Matrix2c core = g_inv * s * coin(angles.theta2) * s * coin(angles.theta2 + d) * g * s;
  if (is_symmetric_frame(kind)) {
    const Matrix2c half = coin(angles.theta1 / 2);
    return half * core * half;
  }
  return core * coin(angles.theta1);
}

std::vector<Real> momentum_grid(int resolution) {
  if (resolution <= 0) throw PreconditionError("momentum resolution must be positive");
  std::vector<Real> k(static_cast<std::size_t>(resolution));
  for (int m = 0; m < resolution; ++m) k[m] = -kPi + 2 * kPi * (m + 1) / resolution;
  return k;
}

std::pair<Complex, Complex> bloch_eigenvalues(Real d0) {
  if (std::abs(d0) <= 1) {
    const Real s = std::sqrt(1 - d0 * d0);
    return {Complex(d0, s), Complex(d0, -s)};
  }
  // i sqrt(1 - d0^2) = i * i sqrt(d0^2 - 1)
  const Real s = std::sqrt(d0 * d0 - 1);
  return {Complex(d0 - s, 0), Complex(d0 + s, 0)};
}

std::vector<DispersionPoint> dispersion(Real theta1, Real theta2, Real gamma,
                                        std::span<const Real> k_grid) {
  std::vector<DispersionPoint> out;
  out.reserve(k_grid.size());
  for (Real k : k_grid) {
    const auto d = bloch_coefficients(theta1, theta2, gamma, k);
    DispersionPoint p;
    p.k = k;
    std::tie(p.lambda_plus, p.lambda_minus) = bloch_eigenvalues(d.d0);
    p.eps_plus = quasienergy(p.lambda_plus);
    p.eps_minus = quasienergy(p.lambda_minus);
    p.pt_broken = std::abs(d.d0) > 1;
    out.push_back(p);
  }
  return out;
}

GapStatus bulk_gap_status(Real theta1, Real theta2, Real gamma, int k_resolution, Real tol_gap) {
  if (k_resolution < 1000) throw PreconditionError("gap detection needs k_resolution >= 1000");
  GapStatus g;
  g.min_gap_0 = kPi;
  g.min_gap_pi = kPi;
  for (Real k : momentum_grid(k_resolution)) {
    const auto d = bloch_coefficients(theta1, theta2, gamma, k);
    g.max_abs_d0 = std::max(g.max_abs_d0, std::abs(d.d0));
    const auto [lp, lm] = bloch_eigenvalues(d.d0);
    for (const Complex& l : {lp, lm}) {
      const Real re = quasienergy(l).real();
      g.min_gap_0 = std::min(g.min_gap_0, std::abs(re));
      g.min_gap_pi = std::min(g.min_gap_pi, distance_from_pi(re));
    }
  }
  g.gap_open = g.max_abs_d0 < 1 - tol_gap;
  g.resolution_warning = std::abs(1 - g.max_abs_d0) < 10 * tol_gap;
  return g;
}

TopologicalNumber winding_number(Real theta1, Real theta2, Real gamma, int k_resolution) {
  const GapStatus gap = bulk_gap_status(theta1, theta2, gamma, std::max(k_resolution, 1000));
  if (!gap.gap_open) throw GapClosedError("gap closed: winding number undefined");

  const std::vector<Real> ks = momentum_grid(k_resolution);
  const Real start = bloch_coefficients(theta1, theta2, gamma, ks.back()).theta_k;
  Real previous = start;
  Real accumulated = 0;
  Real max_step = 0;
  // The grid ends at k = pi, so starting from its last point closes the loop.
  for (Real k : ks) {
    const Real phase = bloch_coefficients(theta1, theta2, gamma, k).theta_k;
    const Real step = wrap_phase(phase - previous);
    max_step = std::max(max_step, std::abs(step));
    accumulated += step;
    previous = phase;
  }
  if (max_step > kPi / 2)
    throw ResolutionError("resolution insufficient: phase step exceeds pi/2");

  TopologicalNumber t;
  const Real turns = accumulated / (2 * kPi);
  t.nu_prime = static_cast<int>(std::lround(turns));
  t.winding_residual = std::abs(turns - t.nu_prime);
  if (t.winding_residual > 1e-6) throw NumericalError("accumulated phase is not a whole winding");
  t.nu_zero = t.nu_prime / 2.0;
  t.nu_pi = t.nu_zero;
  t.nu_shifted = t.nu_zero + 1.5;
  t.gap_open = true;
  t.max_phase_step = max_step;
  return t;
}

std::vector<PhaseCell> phase_diagram(std::span<const Real> theta1_grid,
                                     std::span<const Real> theta2_grid, Real gamma,
                                     int k_resolution) {
  std::vector<PhaseCell> cells;
  cells.reserve(theta1_grid.size() * theta2_grid.size());
  for (Real t1 : theta1_grid) {
    for (Real t2 : theta2_grid) {
      PhaseCell c{t1, t2, gamma, std::nullopt, {}};
      try {
        c.number = winding_number(t1, t2, gamma, k_resolution);
      } catch (const GapClosedError&) {
        c.failure = "gap closed";
      } catch (const std::exception& e) {
        c.failure = e.what();
      }
      cells.push_back(std::move(c));
    }
  }
  return cells;
}

std::vector<Complex> momentum_eigenvalues(Real theta1, Real theta2, Real gamma,
                                          std::int64_t num_sites) {
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(2 * num_sites));
  for (std::int64_t m = 0; m < num_sites; ++m) {
    const Real k = 2 * kPi * static_cast<Real>(m) / static_cast<Real>(num_sites);
    const auto [lp, lm] = bloch_eigenvalues(bloch_coefficients(theta1, theta2, gamma, k).d0);
    out.push_back(lp);
    out.push_back(lm);
  }
  return out;
}

void write_phase_diagram_csv(std::ostream& out, std::span<const PhaseCell> cells) {
  csv::Writer w(out);
  w.header({"theta1", "theta2", "gamma", "nu_shifted", "gap_open"});
  for (const auto& c : cells) {
    if (c.number)
      w.row(c.theta1, c.theta2, c.gamma, c.number->nu_shifted, true);
    else
      w.row(c.theta1, c.theta2, c.gamma, std::string_view{}, false);
  }
}

void write_dispersion_csv(std::ostream& out, std::span<const DispersionPoint> points) {
  csv::Writer w(out);
  w.header({"k", "re_eps_plus", "im_eps_plus", "re_eps_minus", "im_eps_minus", "pt_broken"});
  for (const auto& p : points)
    w.row(p.k, p.eps_plus.real(), p.eps_plus.imag(), p.eps_minus.real(), p.eps_minus.imag(),
          p.pt_broken);
}

}  // namespace ptqw
