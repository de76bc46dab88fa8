#include <doctest.h>

#include <set>
#include <sstream>

#include "ptqw/perturbation.hpp"

using namespace ptqw;

namespace {

WalkSpec base_spec(CoinAngles outer, Real gamma, std::int64_t n = 241) {
  WalkSpec s;
  s.lattice = Lattice::centered(n);
  s.coins = CoinProfile::inner_outer(50, {0.4 * kPi, 0.1 * kPi}, outer);
  s.gamma = gamma;
  s.kind = WalkKind::three_step;
  return s;
}

constexpr CoinAngles kNu1{0.9 * kPi, 0.2 * kPi};
constexpr CoinAngles kNu2{-0.2 * kPi, 0.3 * kPi};
constexpr CoinAngles kNu3{-0.6 * kPi, 0.2 * kPi};

}  // namespace

TEST_SUITE("perturbation") {
  TEST_CASE("regimes of the two-state sector") {
    const PerturbationOptions opt;
    CHECK(analyze_localized(base_spec(kNu2, 0.1), 0.05, opt).regime == Regime::all_real);
    CHECK(analyze_localized(base_spec(kNu2, 0.1), 0.08, opt).regime == Regime::conjugate_pairs);
    CHECK(analyze_localized(base_spec(kNu2, 0.0), 0.05, opt).regime == Regime::conjugate_pairs);
    CHECK(analyze_localized(base_spec(kNu1, 0.1), 0.05, opt).regime == Regime::all_real);
    CHECK(analyze_localized(base_spec(kNu1, 0.0), 0.05, opt).regime == Regime::all_real);
  }

  TEST_CASE("conjugation closure for every delta") {
    for (Real d : {0.0, 0.03, 0.08, 0.2}) {
      WalkSpec s = base_spec(kNu2, 0.1);
      s.kind = WalkKind::three_step_perturbed;
      s.coins.delta = d;
      EigenOptions eo;
      eo.compute_vectors = false;
      const SpectrumResult r = eigendecompose(build_operator(s), eo);
      std::vector<Complex> v;
      for (const auto& p : r.eigenpairs) v.push_back(p.lambda);
      Real worst = 0;
      std::vector<Complex> pool = v;
      for (const Complex& x : v) {
        auto it = std::min_element(pool.begin(), pool.end(), [&](Complex a, Complex b) {
          return std::abs(a - std::conj(x)) < std::abs(b - std::conj(x));
        });
        worst = std::max(worst, std::abs(*it - std::conj(x)));
        pool.erase(it);
      }
      CAPTURE(d);
      CHECK(worst < 1e-8);
    }
  }

  TEST_CASE("sweep tracks branches and brackets the exceptional point") {
    const std::vector<Real> deltas = {0.0, 0.02, 0.04, 0.06, 0.08, 0.1};
    const DeltaSweep sweep = delta_sweep(base_spec(kNu2, 0.1), deltas);
    REQUIRE(sweep.points.size() >= deltas.size());
    REQUIRE(sweep.ep_bracket.has_value());
    CHECK(sweep.ep_bracket->first >= 0.04);
    CHECK(sweep.ep_bracket->second <= 0.1);
    for (const auto& p : sweep.points) {
      std::set<int> ids;
      for (const auto& s : p.states) ids.insert(s.branch_id);
      CHECK(ids.size() == p.states.size());
    }
    std::ostringstream out;
    write_sweep_csv(out, sweep);
    CHECK(out.str().rfind("delta,re_lambda,im_lambda,branch_id,regime\n", 0) == 0);
  }

  TEST_CASE("bisection locates the coalescence and reports monotonicity") {
    EpOptions opt;
    opt.tol_delta = 2e-3;
    opt.coarse_points = 2;
    const ExceptionalPoint ep = find_exceptional_point(base_spec(kNu2, 0.1), 0.05, 0.08, opt);
    REQUIRE(ep.delta_ep.has_value());
    CHECK(ep.hi - ep.lo <= opt.tol_delta);
    CHECK(ep.monotone);
    CHECK(*ep.delta_ep > 0.05);
    CHECK(*ep.delta_ep < 0.08);
    CHECK(ep.coalescence_overlap > 0.5);

    const PerturbationOptions po;
    CHECK(analyze_localized(base_spec(kNu2, 0.1), ep.lo, po).max_abs_im <= po.im_threshold);
    CHECK(analyze_localized(base_spec(kNu2, 0.1), ep.hi, po).max_abs_im > po.im_threshold);
  }

  TEST_CASE("unitary walk: bracket fails at the lower end") {
    EpOptions opt;
    opt.coarse_points = 0;
    const ExceptionalPoint ep = find_exceptional_point(base_spec(kNu2, 0.0), 0.01, 0.08, opt);
    CHECK(ep.lower_bracket_failed);
    CHECK_FALSE(ep.delta_ep.has_value());
  }

  TEST_CASE("three-state sector keeps one real state per interface past the coalescence") {
    const DeltaPoint p = analyze_localized(base_spec(kNu3, 0.1), 0.2, PerturbationOptions{});
    CHECK(p.regime == Regime::conjugate_pairs);
    CHECK(p.n_real_zero == 2);
    CHECK(p.n_real_pi == 2);
  }

  TEST_CASE("disorder ensembles are seed-reproducible") {
    WalkSpec s = base_spec(kNu1, 0.1);
    s.coins.delta = 0.05;
    const auto seeds = default_seeds(3);
    const DisorderEnsemble a = disorder_ensemble(s, 0.1, seeds);
    const DisorderEnsemble b = disorder_ensemble(s, 0.1, seeds);
    REQUIRE(a.seeds.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(a.seeds[i].max_abs_im_edge == b.seeds[i].max_abs_im_edge);
      CHECK(a.seeds[i].regime == Regime::all_real);
      CHECK(a.seeds[i].failure.empty());
    }
    CHECK(a.fraction(Regime::all_real) == 1.0);
    std::ostringstream out;
    write_ensemble_csv(out, a);
    CHECK(out.str().rfind("seed,theta_r,max_im_lambda_edge,regime\n", 0) == 0);
  }
}
