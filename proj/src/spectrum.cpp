#include "ptqw/spectrum.hpp"

#include <Eigen/Dense>  // declares LAPACKE_* under EIGEN_USE_LAPACKE

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "ptqw/csv.hpp"
#include "ptqw/parallel.hpp"

namespace ptqw {

namespace {

constexpr Real kIllConditioned = 1e12;
constexpr Real kAmbiguityBand = 0.02;

bool inside_defect_window(Real re_eps, Real window) {
  return std::abs(re_eps) < window || distance_from_pi(re_eps) < window;
}

/// Sites within `window` of either side of any interface.
std::vector<std::int64_t> window_sites(const Lattice& lat, const std::vector<std::int64_t>& ifaces,
                                       std::int64_t window) {
  std::vector<std::int64_t> sites;
  for (std::int64_t i = 0; i < lat.num_sites(); ++i) {
    const std::int64_t y = lat.position(i);
    for (std::int64_t x : ifaces) {
      if (std::min(lat.distance(y, x), lat.distance(y, x + 1)) <= window) {
        sites.push_back(i);
        break;
      }
    }
  }
  return sites;
}

void tally(SpectrumResult& r) {
  r.counts = {};
  for (const auto& p : r.eigenpairs) {
    switch (p.classification) {
      case StateClass::edge_zero: ++r.counts.n_edge_zero; break;
      case StateClass::edge_pi: ++r.counts.n_edge_pi; break;
      case StateClass::defective_pair_member: ++r.counts.n_defective; break;
      case StateClass::impurity: ++r.counts.n_impurity; break;
      case StateClass::bulk: ++r.counts.n_bulk; break;
    }
    if (p.ambiguous) ++r.counts.n_ambiguous;
  }
}

}  // namespace

std::string_view to_string(StateClass c) {
  switch (c) {
    case StateClass::bulk: return "bulk";
    case StateClass::edge_zero: return "edge_zero";
    case StateClass::edge_pi: return "edge_pi";
    case StateClass::defective_pair_member: return "defective_pair_member";
    case StateClass::impurity: return "impurity";
  }
  return "bulk";
}

std::int64_t default_window(const CoinProfile& coins) {
  return std::holds_alternative<LeftRight>(coins.layout) ? 50 : 10;
}

Eigen::VectorXd site_probability(const VectorXc& psi) {
  const Eigen::Index n = psi.size() / 2;
  Eigen::VectorXd p(n);
  for (Eigen::Index i = 0; i < n; ++i) p(i) = std::norm(psi(2 * i)) + std::norm(psi(2 * i + 1));
  return p;
}

SpectrumResult eigendecompose(const WalkOperator& op, const EigenOptions& options) {
  const Lattice& lat = op.spec.lattice;
  if (lat.num_sites() > options.max_sites)
    throw PreconditionError("lattice exceeds the configured maximum for a dense eigensolve");

  SpectrumResult result;
  result.spec = op.spec;
  result.options = options.classify;
  if (lat.boundary() == Boundary::open)
    result.warnings.emplace_back("open boundary: spectral classification assumes a periodic lattice");

  MatrixXc a = op.dense();
  const Eigen::Index n = a.rows();
  VectorXc values(n);
  const Eigen::Index vn = options.compute_vectors ? n : 1;
  const char job = options.compute_vectors ? 'V' : 'N';
  MatrixXc v(vn, vn);
  MatrixXc w(vn, vn);
  // Left and right eigenvectors, each returned with unit norm.
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, job, job, static_cast<lapack_int>(n),
      reinterpret_cast<lapack_complex_double*>(a.data()), static_cast<lapack_int>(n),
      reinterpret_cast<lapack_complex_double*>(values.data()),
      reinterpret_cast<lapack_complex_double*>(w.data()), static_cast<lapack_int>(vn),
      reinterpret_cast<lapack_complex_double*>(v.data()), static_cast<lapack_int>(vn));
  if (info != 0)
    throw NumericalError("eigensolver did not converge for " + std::string(to_string(op.spec.kind)) +
                         " on " + std::to_string(lat.num_sites()) + " sites (info " +
                         std::to_string(info) + ")");

  result.eigenpairs.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    auto& p = result.eigenpairs[i];
    p.lambda = values(i);
    p.eps = quasienergy(p.lambda);
  }
  if (!options.compute_vectors) {
    tally(result);
    return result;
  }

  v.colwise().normalize();
  w.colwise().normalize();
  for (Eigen::Index i = 0; i < n; ++i) {
    auto& p = result.eigenpairs[i];
    p.right_vector = v.col(i);
    const Real overlap = std::abs(w.col(i).dot(v.col(i)));
    p.condition_number = overlap > 0 ? 1 / overlap : std::numeric_limits<Real>::infinity();
    p.ill_conditioned = !(p.condition_number <= kIllConditioned);
  }
  classify_states(result, options.classify);
  return result;
}

void classify_states(SpectrumResult& result, const ClassifyOptions& options) {
  const Lattice& lat = result.spec.lattice;
  const CoinProfile& coins = result.spec.coins;
  result.options = options;
  const std::int64_t window = options.window.value_or(default_window(coins));
  const std::vector<std::int64_t> sites = window_sites(lat, coins.interfaces(lat), window);

  std::vector<Complex> values;
  values.reserve(result.eigenpairs.size());
  for (const auto& p : result.eigenpairs) values.push_back(p.lambda);
  auto has_conjugate_partner = [&](std::size_t self) {
    const Complex target = std::conj(values[self]);
    const Real tol = options.conjugate_tol * std::max<Real>(1, std::abs(target));
    for (std::size_t j = 0; j < values.size(); ++j)
      if (j != self && std::abs(values[j] - target) <= tol) return true;
    return false;
  };

  for (std::size_t i = 0; i < result.eigenpairs.size(); ++i) {
    auto& p = result.eigenpairs[i];
    if (p.right_vector.size() != lat.dim())
      throw PreconditionError("classification needs right eigenvectors");
    const Eigen::VectorXd prob = site_probability(p.right_vector);
    Eigen::Index peak = 0;
    prob.maxCoeff(&peak);
    p.localization_center = lat.position(peak);
    Real w = 0;
    for (std::int64_t s : sites) w += prob(s);
    p.interface_weight = w / prob.sum();

    const bool localized = p.interface_weight >= options.weight_threshold;
    const Real abs_lambda = std::abs(p.lambda);
    const bool real = std::abs(p.lambda.imag()) <= options.tol_real * abs_lambda;
    const Real re = p.eps.real();
    const bool at_zero = std::abs(re) < options.tol_edge;
    const bool at_pi = distance_from_pi(re) < options.tol_edge;

    p.ambiguous = std::abs(p.interface_weight - options.weight_threshold) < kAmbiguityBand;
    if (!localized) {
      p.classification = StateClass::bulk;
    } else if (real || at_zero || at_pi) {
      const bool zero = real ? p.lambda.real() > 0 : at_zero;
      p.classification = zero ? StateClass::edge_zero : StateClass::edge_pi;
    } else if (inside_defect_window(re, options.defect_window) && has_conjugate_partner(i)) {
      p.classification = StateClass::defective_pair_member;
    } else {
      p.classification = StateClass::impurity;
    }
  }
  tally(result);
  result.eps_m.reset();
  for (const auto& p : result.eigenpairs)
    if (p.classification == StateClass::bulk && p.eps.real() > 0)
      result.eps_m = std::min(result.eps_m.value_or(kPi), p.eps.real());
}

Real minimum_bulk_quasienergy(const SpectrumResult& result) {
  std::optional<Real> best;
  for (const auto& p : result.eigenpairs)
    if (p.classification == StateClass::bulk && p.eps.real() > 0)
      best = std::min(best.value_or(kPi), p.eps.real());
  if (!best) throw NumericalError("no upper-band bulk states");
  return *best;
}

std::optional<Real> defective_pair_frequency(const SpectrumResult& result) {
  std::optional<Real> best;
  for (const auto& p : result.eigenpairs) {
    if (p.classification != StateClass::defective_pair_member) continue;
    const Real w = std::abs(p.eps.real());
    if (w < kPi / 2 && (!best || w < *best)) best = w;
  }
  return best;
}

LocalizationFit localization_length(const Eigenpair& pair, const Lattice& lattice) {
  if (pair.classification == StateClass::bulk)
    throw PreconditionError("localization length needs a localized state");
  const Eigen::VectorXd prob = site_probability(pair.right_vector);
  const std::int64_t n = lattice.num_sites();
  const bool ring = lattice.boundary() == Boundary::periodic;

  Eigen::VectorXd smooth(n);
  for (std::int64_t i = 0; i < n; ++i) {
    Real sum = prob(i);
    int count = 1;
    for (std::int64_t j : {i - 1, i + 1}) {
      if (ring) {
        sum += prob((j + n) % n);
        ++count;
      } else if (j >= 0 && j < n) {
        sum += prob(j);
        ++count;
      }
    }
    smooth(i) = sum / count;
  }
  Eigen::Index peak = 0;
  const Real top = smooth.maxCoeff(&peak);
  const std::int64_t center = lattice.position(peak);

  LocalizationFit fit;
  for (int decades = 1; decades <= 4; ++decades) {
    const Real floor = top * std::pow(10.0, -decades);
    std::vector<Real> xs, ys;
    for (std::int64_t i = 0; i < n; ++i) {
      if (smooth(i) >= floor && smooth(i) > 0) {
        xs.push_back(static_cast<Real>(lattice.distance(lattice.position(i), center)));
        ys.push_back(std::log(smooth(i)));
      }
    }
    if (xs.size() < 5 && decades < 4) continue;
    const auto m = static_cast<Eigen::Index>(xs.size());
    Eigen::MatrixXd a(m, 2);
    Eigen::VectorXd b(m);
    for (Eigen::Index r = 0; r < m; ++r) {
      a(r, 0) = 1;
      a(r, 1) = xs[r];
      b(r) = ys[r];
    }
    fit.points = static_cast<int>(m);
    if (m < 3) break;
    const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
    const Real mean = b.mean();
    const Real ss_tot = (b.array() - mean).square().sum();
    const Real ss_res = (a * coef - b).squaredNorm();
    fit.r_squared = ss_tot > 0 ? 1 - ss_res / ss_tot : 0;
    fit.length = coef(1) < 0 ? -1 / coef(1) : std::numeric_limits<Real>::infinity();
    fit.reliable = fit.r_squared >= 0.9 && std::isfinite(fit.length);
    break;
  }
  return fit;
}

std::vector<EdgeCountCell> edge_count_map(std::span<const Real> theta1o_grid,
                                          std::span<const Real> theta2o_grid, CoinAngles inner,
                                          Real gamma, const EdgeMapOptions& options) {
  if (!bulk_gap_status(inner.theta1, inner.theta2, gamma, 1000).gap_open)
    throw PreconditionError("inner coin angles must be gapped");
  std::vector<EdgeCountCell> cells;
  for (Real t1 : theta1o_grid)
    for (Real t2 : theta2o_grid) cells.push_back({{t1, t2}, std::nullopt, {}});

  parallel_for(cells.size(), options.threads, [&](std::size_t i) {
    EdgeCountCell& cell = cells[i];
    if (!bulk_gap_status(cell.outer.theta1, cell.outer.theta2, gamma, 1000).gap_open) {
      cell.note = "no count: bulk gap closed";
      return;
    }
    try {
      WalkSpec spec;
      spec.lattice = Lattice::centered(options.num_sites, Boundary::periodic);
      spec.coins = CoinProfile::inner_outer(options.half_width, inner, cell.outer);
      spec.gamma = gamma;
      spec.kind = WalkKind::three_step_symmetric;
      cell.counts = eigendecompose(build_operator(spec), options.eigen).counts;
    } catch (const std::exception& e) {
      cell.note = e.what();
    }
  });
  return cells;
}

void write_spectrum_csv(std::ostream& out, const SpectrumResult& result) {
  csv::Writer w(out);
  w.header({"re_lambda", "im_lambda", "re_eps", "im_eps", "class", "loc_center", "loc_length"});
  for (const auto& p : result.eigenpairs) {
    std::string length;
    if (p.classification != StateClass::bulk && p.right_vector.size() > 0) {
      const LocalizationFit fit = localization_length(p, result.spec.lattice);
      if (fit.reliable) length = csv::format(fit.length);
    }
    w.row(p.lambda.real(), p.lambda.imag(), p.eps.real(), p.eps.imag(), to_string(p.classification),
          static_cast<long long>(p.localization_center), length);
  }
}

void write_eigenvector_csv(std::ostream& out, const Eigenpair& pair, const Lattice& lattice) {
  csv::Writer w(out);
  w.header({"x", "prob"});
  const Eigen::VectorXd prob = site_probability(pair.right_vector);
  for (std::int64_t i = 0; i < lattice.num_sites(); ++i)
    w.row(static_cast<long long>(lattice.position(i)), prob(i));
}

void write_edge_map_csv(std::ostream& out, std::span<const EdgeCountCell> cells) {
  csv::Writer w(out);
  w.header({"theta1o", "theta2o", "n_edge_zero", "n_edge_pi", "n_defective", "n_impurity", "note"});
  for (const auto& c : cells) {
    if (c.counts)
      w.row(c.outer.theta1, c.outer.theta2, c.counts->n_edge_zero, c.counts->n_edge_pi,
            c.counts->n_defective, c.counts->n_impurity, c.note);
    else
      w.row(c.outer.theta1, c.outer.theta2, std::string_view{}, std::string_view{},
            std::string_view{}, std::string_view{}, c.note);
  }
}

}  // namespace ptqw
