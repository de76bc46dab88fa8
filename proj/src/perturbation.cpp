#include "ptqw/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "ptqw/csv.hpp"
#include "ptqw/parallel.hpp"

namespace ptqw {

namespace {

constexpr Real kCoalescenceGap = 1e-6;
constexpr Real kCoalescenceOverlap = 0.99;

WalkKind perturbed_kind(WalkKind kind) {
  switch (kind) {
    case WalkKind::three_step:
      return WalkKind::three_step_perturbed;
    case WalkKind::three_step_symmetric:
      return WalkKind::three_step_perturbed_symmetric;
    case WalkKind::three_step_perturbed:
    case WalkKind::three_step_perturbed_symmetric:
    case WalkKind::three_step_perturbed_disordered:
      return kind;
    case WalkKind::two_step:
      break;
  }
  throw PreconditionError("delta perturbation needs a three-step walk");
}

bool is_localized_class(StateClass c) {
  return c == StateClass::edge_zero || c == StateClass::edge_pi ||
         c == StateClass::defective_pair_member;
}

Real overlap(const VectorXc& a, const VectorXc& b) { return std::abs(a.dot(b)); }

/// Closest pair of real localized eigenvalues, or {-1, -1}.
std::pair<int, int> closest_real_pair(const DeltaPoint& p, Real threshold) {
  std::pair<int, int> best{-1, -1};
  Real gap = std::numeric_limits<Real>::infinity();
  for (std::size_t i = 0; i < p.states.size(); ++i) {
    if (std::abs(p.states[i].lambda.imag()) > threshold) continue;
    for (std::size_t j = i + 1; j < p.states.size(); ++j) {
      if (std::abs(p.states[j].lambda.imag()) > threshold) continue;
      const Real d = std::abs(p.states[i].lambda - p.states[j].lambda);
      if (d < gap) {
        gap = d;
        best = {static_cast<int>(i), static_cast<int>(j)};
      }
    }
  }
  return best;
}

/// Greedy nearest-neighbour matching of b's states onto a's branches.
/// Returns false when a move exceeds its jump bound.
bool match_branches(const DeltaPoint* prev, const DeltaPoint& a, DeltaPoint& b, int& next_branch,
                    const PerturbationOptions& options) {
  std::vector<bool> taken(a.states.size(), false);
  bool ok = true;
  for (auto& s : b.states) {
    int best = -1;
    Real dist = std::numeric_limits<Real>::infinity();
    for (std::size_t j = 0; j < a.states.size(); ++j) {
      if (taken[j]) continue;
      const Real d = std::abs(a.states[j].lambda - s.lambda);
      if (d < dist) {
        dist = d;
        best = static_cast<int>(j);
      }
    }
    if (best < 0) {
      s.branch_id = next_branch++;
      continue;
    }
    taken[best] = true;
    const LocalizedState& from = a.states[best];
    s.branch_id = from.branch_id;

    Real secant = 0;
    if (prev != nullptr && a.delta != prev->delta) {
      for (const auto& q : prev->states) {
        if (q.branch_id == from.branch_id) {
          secant = std::abs(from.lambda - q.lambda) * std::abs(b.delta - a.delta) /
                   std::abs(a.delta - prev->delta);
          break;
        }
      }
    }
    if (dist > std::max(options.jump_floor, options.jump_factor * secant)) ok = false;
  }
  if (a.states.size() != b.states.size()) ok = false;
  return ok;
}

void append_refined(std::vector<DeltaPoint>& out, DeltaPoint p, int depth, int& next_branch,
                    const WalkSpec& spec, const PerturbationOptions& options,
                    std::vector<std::string>& notes) {
  const DeltaPoint* prev = out.size() >= 2 ? &out[out.size() - 2] : nullptr;
  if (match_branches(prev, out.back(), p, next_branch, options)) {
    out.push_back(std::move(p));
    return;
  }
  if (depth >= options.max_refinements) {
    notes.push_back("unresolvable crossing between delta=" + csv::format(out.back().delta) +
                    " and delta=" + csv::format(p.delta));
    out.push_back(std::move(p));
    return;
  }
  DeltaPoint mid = analyze_localized(spec, 0.5 * (out.back().delta + p.delta), options);
  append_refined(out, std::move(mid), depth + 1, next_branch, spec, options, notes);
  append_refined(out, std::move(p), depth + 1, next_branch, spec, options, notes);
}

}  // namespace

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::all_real: return "all_real";
    case Regime::at_exceptional: return "at_exceptional";
    case Regime::conjugate_pairs: return "conjugate_pairs";
  }
  return "all_real";
}

DeltaPoint analyze_localized(const WalkSpec& spec, Real delta, const PerturbationOptions& options) {
  WalkSpec s = spec;
  s.kind = perturbed_kind(spec.kind);
  s.coins.delta = delta;
  const SpectrumResult r = eigendecompose(build_operator(s), options.eigen);

  DeltaPoint p;
  p.delta = delta;
  for (const auto& e : r.eigenpairs) {
    if (!is_localized_class(e.classification)) continue;
    p.states.push_back({e.lambda, e.classification, e.right_vector, -1});
    p.max_abs_im = std::max(p.max_abs_im, std::abs(e.lambda.imag()));
    if (std::abs(e.lambda.imag()) <= options.im_threshold) {
      if (e.lambda.real() > 0)
        ++p.n_real_zero;
      else
        ++p.n_real_pi;
    }
  }
  std::sort(p.states.begin(), p.states.end(), [](const auto& a, const auto& b) {
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
    return a.lambda.imag() < b.lambda.imag();
  });

  if (p.max_abs_im > options.im_threshold) {
    p.regime = Regime::conjugate_pairs;
  } else {
    p.regime = Regime::all_real;
    const auto [i, j] = closest_real_pair(p, options.im_threshold);
    if (i >= 0) {
      const auto& a = p.states[i];
      const auto& b = p.states[j];
      if (std::abs(a.lambda - b.lambda) < kCoalescenceGap * std::abs(a.lambda) &&
          overlap(a.right_vector, b.right_vector) > kCoalescenceOverlap)
        p.regime = Regime::at_exceptional;
    }
  }
  return p;
}

DeltaSweep delta_sweep(const WalkSpec& base, std::span<const Real> delta_list,
                       const PerturbationOptions& options) {
  DeltaSweep sweep;
  if (delta_list.empty()) return sweep;
  if (!std::is_sorted(delta_list.begin(), delta_list.end()))
    throw PreconditionError("delta list must be ordered");

  std::vector<DeltaPoint> computed(delta_list.size());
  parallel_for(delta_list.size(), options.threads,
               [&](std::size_t i) { computed[i] = analyze_localized(base, delta_list[i], options); });

  int next_branch = 0;
  for (auto& s : computed.front().states) s.branch_id = next_branch++;
  sweep.points.push_back(std::move(computed.front()));
  for (std::size_t i = 1; i < computed.size(); ++i)
    append_refined(sweep.points, std::move(computed[i]), 0, next_branch, base, options, sweep.notes);

  for (std::size_t i = 1; i < sweep.points.size(); ++i) {
    if (sweep.points[i - 1].regime != Regime::conjugate_pairs &&
        sweep.points[i].regime == Regime::conjugate_pairs) {
      sweep.ep_bracket = std::make_pair(sweep.points[i - 1].delta, sweep.points[i].delta);
      break;
    }
  }
  return sweep;
}

ExceptionalPoint find_exceptional_point(const WalkSpec& base, Real delta_lo, Real delta_hi,
                                        const EpOptions& options) {
  if (!(delta_lo < delta_hi)) throw PreconditionError("need delta_lo < delta_hi");
  ExceptionalPoint ep;
  ep.lo = delta_lo;
  ep.hi = delta_hi;
  const PerturbationOptions& po = options.perturbation;

  auto evaluate = [&](Real d) {
    ++ep.evaluations;
    return analyze_localized(base, d, po);
  };
  auto broken = [&](const DeltaPoint& p) { return p.max_abs_im > po.im_threshold; };

  const int m = std::max(options.coarse_points, 0);
  std::vector<Real> grid;
  for (int i = 0; i <= m + 1; ++i) grid.push_back(delta_lo + (delta_hi - delta_lo) * i / (m + 1));
  std::vector<DeltaPoint> scan(grid.size());
  parallel_for(grid.size(), po.threads, [&](std::size_t i) { scan[i] = analyze_localized(base, grid[i], po); });
  ep.evaluations += static_cast<int>(grid.size());

  if (broken(scan.front())) {
    ep.lower_bracket_failed = true;
    ep.note = "indicator already true at delta_lo: exceptional point at or below the bracket";
    return ep;
  }
  if (!broken(scan.back())) {
    ep.upper_bracket_failed = true;
    ep.note = "indicator still false at delta_hi: no exceptional point in the bracket";
    return ep;
  }
  for (std::size_t i = 1; i < scan.size(); ++i)
    if (broken(scan[i]) != broken(scan[i - 1])) ep.brackets.emplace_back(grid[i - 1], grid[i]);
  ep.monotone = ep.brackets.size() == 1;
  if (!ep.monotone) ep.note = "indicator is not monotone: several exceptional points";

  Real lo = ep.brackets.front().first;
  Real hi = ep.brackets.front().second;
  DeltaPoint lo_point;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] == lo) lo_point = scan[i];
  while (hi - lo > options.tol_delta) {
    const Real mid = 0.5 * (lo + hi);
    DeltaPoint p = evaluate(mid);
    if (broken(p)) {
      hi = mid;
    } else {
      lo = mid;
      lo_point = std::move(p);
    }
  }
  ep.lo = lo;
  ep.hi = hi;
  ep.delta_ep = 0.5 * (lo + hi);

  const auto [i, j] = closest_real_pair(lo_point, po.im_threshold);
  if (i >= 0) ep.coalescence_overlap = overlap(lo_point.states[i].right_vector, lo_point.states[j].right_vector);
  return ep;
}

Real DisorderEnsemble::fraction(Regime r) const {
  if (seeds.empty()) return 0;
  const auto n = std::count_if(seeds.begin(), seeds.end(),
                               [r](const SeedSummary& s) { return s.failure.empty() && s.regime == r; });
  return static_cast<Real>(n) / static_cast<Real>(seeds.size());
}

std::vector<std::uint64_t> default_seeds(int n_seeds) {
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(std::max(n_seeds, 0)));
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = i + 1;
  return seeds;
}

DisorderEnsemble disorder_ensemble(const WalkSpec& base, Real theta_r,
                                   std::span<const std::uint64_t> seeds,
                                   const PerturbationOptions& options) {
  if (!(theta_r >= 0)) throw PreconditionError("theta_r must be non-negative");
  DisorderEnsemble ens;
  ens.theta_r = theta_r;
  ens.delta = base.coins.delta;
  ens.seeds.resize(seeds.size());
  parallel_for(seeds.size(), options.threads, [&](std::size_t i) {
    SeedSummary& s = ens.seeds[i];
    s.seed = seeds[i];
    try {
      WalkSpec spec = base;
      spec.kind = WalkKind::three_step_perturbed_disordered;
      spec.coins.disorder_amplitude = theta_r;
      spec.coins.disorder_seed = seeds[i];
      const SpectrumResult r = eigendecompose(build_operator(spec), options.eigen);
      for (const auto& e : r.eigenpairs)
        if (is_localized_class(e.classification))
          s.max_abs_im_edge = std::max(s.max_abs_im_edge, std::abs(e.lambda.imag()));
      s.counts = r.counts;
      s.regime = s.max_abs_im_edge > options.im_threshold ? Regime::conjugate_pairs : Regime::all_real;
    } catch (const std::exception& e) {
      s.failure = e.what();
    }
  });
  return ens;
}

void write_sweep_csv(std::ostream& out, const DeltaSweep& sweep) {
  csv::Writer w(out);
  w.header({"delta", "re_lambda", "im_lambda", "branch_id", "regime"});
  for (const auto& p : sweep.points)
    for (const auto& s : p.states)
      w.row(p.delta, s.lambda.real(), s.lambda.imag(), s.branch_id, to_string(p.regime));
}

void write_ensemble_csv(std::ostream& out, const DisorderEnsemble& ensemble) {
  csv::Writer w(out);
  w.header({"seed", "theta_r", "max_im_lambda_edge", "regime"});
  for (const auto& s : ensemble.seeds)
    w.row(static_cast<unsigned long long>(s.seed), ensemble.theta_r, s.max_abs_im_edge,
          s.failure.empty() ? to_string(s.regime) : std::string_view("failed"));
}

}  // namespace ptqw
