#include <doctest.h>

#include <sstream>

#include "ptqw/spectrum.hpp"

using namespace ptqw;

namespace {

constexpr CoinAngles kInner{0.4 * kPi, 0.1 * kPi};

WalkSpec inner_outer_spec(CoinAngles outer, Real gamma, std::int64_t n = 241, std::int64_t half_width = 50) {
  WalkSpec s;
  s.lattice = Lattice::centered(n);
  s.coins = CoinProfile::inner_outer(half_width, kInner, outer);
  s.gamma = gamma;
  s.kind = WalkKind::three_step_symmetric;
  return s;
}

/// Greedy multiset match of `a` against `b` after applying f to a.
template <typename F>
Real multiset_mismatch(const std::vector<Complex>& a, std::vector<Complex> b, F f) {
  Real worst = 0;
  for (const Complex& x : a) {
    const Complex y = f(x);
    auto it = std::min_element(b.begin(), b.end(), [&](Complex p, Complex q) { return std::abs(p - y) < std::abs(q - y); });
    worst = std::max(worst, std::abs(*it - y));
    b.erase(it);
  }
  return worst;
}

std::vector<Complex> eigenvalues(const SpectrumResult& r) {
  std::vector<Complex> v;
  for (const auto& p : r.eigenpairs) v.push_back(p.lambda);
  return v;
}

}  // namespace

TEST_SUITE("spectrum") {
  TEST_CASE("homogeneous unitary walk: unit circle, all bulk, complete") {
    WalkSpec s;
    s.lattice = Lattice::centered(100);
    s.coins = CoinProfile::homogeneous(kPi / 3, kPi / 5);
    s.kind = WalkKind::three_step;
    const SpectrumResult r = eigendecompose(build_operator(s));
    CHECK(r.eigenpairs.size() == 200);
    for (const auto& p : r.eigenpairs) {
      CHECK(std::abs(std::abs(p.lambda) - 1) < 1e-10);
      CHECK(p.right_vector.norm() == doctest::Approx(1.0));
      CHECK_FALSE(p.ill_conditioned);
    }
    CHECK(r.counts.n_bulk == 200);
    CHECK(r.counts.n_edge_zero == 0);
    CHECK(r.counts.n_edge_pi == 0);
  }

  TEST_CASE("edge counts are twice the outer winding number") {
    struct Case {
      CoinAngles outer;
      int count;
    };
    for (const Case c : {Case{{0.7 * kPi, 0.05 * kPi}, 0}, Case{{0.9 * kPi, 0.2 * kPi}, 2},
                         Case{{-0.2 * kPi, 0.3 * kPi}, 4}, Case{{-0.6 * kPi, 0.2 * kPi}, 6}}) {
      CAPTURE(c.outer.theta1 / kPi);
      const SpectrumResult r = eigendecompose(build_operator(inner_outer_spec(c.outer, 0.1)));
      CHECK(r.counts.n_edge_zero == c.count);
      CHECK(r.counts.n_edge_pi == c.count);
      CHECK(r.counts.n_ambiguous == 0);
    }
  }

  TEST_CASE("unitary degeneracy: six states at +1 and six at -1") {
    const SpectrumResult r = eigendecompose(build_operator(inner_outer_spec({-0.6 * kPi, 0.2 * kPi}, 0.0)));
    int plus = 0, minus = 0;
    for (const auto& p : r.eigenpairs) {
      if (std::abs(p.lambda - 1.0) < 1e-6) ++plus;
      if (std::abs(p.lambda + 1.0) < 1e-6) ++minus;
    }
    CHECK(plus == 6);
    CHECK(minus == 6);
    CHECK(r.counts.n_edge_zero == 6);
  }

  TEST_CASE("non-unitary edge states are real, off the unit circle, and sit at one interface") {
    const SpectrumResult r = eigendecompose(build_operator(inner_outer_spec({-0.6 * kPi, 0.2 * kPi}, 0.1)));
    std::vector<Real> zero_values;
    for (const auto& p : r.eigenpairs) {
      if (p.classification != StateClass::edge_zero && p.classification != StateClass::edge_pi) continue;
      CHECK(p.lambda.imag() == doctest::Approx(0.0).epsilon(1e-8));
      if (p.classification == StateClass::edge_zero) zero_values.push_back(p.lambda.real());
      const Eigen::VectorXd prob = site_probability(p.right_vector);
      Real left = 0, right = 0;
      for (std::int64_t i = 0; i < r.spec.lattice.num_sites(); ++i) {
        const std::int64_t x = r.spec.lattice.position(i);
        if (std::llabs(x + 50) <= 10) left += prob(i);
        if (std::llabs(x - 50) <= 10) right += prob(i);
      }
      CHECK(std::max(left, right) > 20 * std::min(left, right));
    }
    REQUIRE(zero_values.size() == 6);
    std::sort(zero_values.begin(), zero_values.end());
    bool off_circle = false;
    for (std::size_t i = 0; i < zero_values.size(); ++i) {
      if (std::abs(zero_values[i] - 1) > 1e-6) off_circle = true;
      if (i > 0) CHECK(zero_values[i] - zero_values[i - 1] > 1e-8);
    }
    CHECK(off_circle);
  }

  TEST_CASE("sublattice closure on an even ring and conjugation closure under delta") {
    const SpectrumResult r = eigendecompose(build_operator(inner_outer_spec({-0.2 * kPi, 0.3 * kPi}, 0.1, 242)));
    const auto v = eigenvalues(r);
    CHECK(multiset_mismatch(v, v, [](Complex x) { return -x; }) < 1e-8);

    WalkSpec p = inner_outer_spec({-0.2 * kPi, 0.3 * kPi}, 0.1, 242);
    p.kind = WalkKind::three_step_perturbed;
    p.coins.delta = 0.05;
    const auto vp = eigenvalues(eigendecompose(build_operator(p)));
    CHECK(multiset_mismatch(vp, vp, [](Complex x) { return std::conj(x); }) < 1e-8);
    CHECK(multiset_mismatch(vp, vp, [](Complex x) { return -x; }) < 1e-8);
  }

  TEST_CASE("classification is deterministic") {
    const WalkSpec s = inner_outer_spec({0.9 * kPi, 0.2 * kPi}, 0.1);
    const SpectrumResult a = eigendecompose(build_operator(s));
    const SpectrumResult b = eigendecompose(build_operator(s));
    CHECK(a.counts.n_edge_zero == b.counts.n_edge_zero);
    CHECK(a.counts.n_impurity == b.counts.n_impurity);
    for (std::size_t i = 0; i < a.eigenpairs.size(); ++i) CHECK(a.eigenpairs[i].lambda == b.eigenpairs[i].lambda);
  }

  TEST_CASE("impurity states near the interface get their own class") {
    const SpectrumResult r = eigendecompose(build_operator(inner_outer_spec({0.9 * kPi, 0.2 * kPi}, 0.1)));
    CHECK(r.counts.n_edge_zero == 2);
    for (const auto& p : r.eigenpairs)
      if (p.classification == StateClass::impurity) {
        CHECK(std::abs(p.eps.real()) > 0.1 * kPi);
        CHECK(distance_from_pi(p.eps.real()) > 0.1 * kPi);
      }
  }

  TEST_CASE("localization length: bulk rejected, defective states broader than edge states") {
    WalkSpec s;
    s.lattice = Lattice::centered(601);
    s.coins = CoinProfile::left_right({kPi / 8, kPi / 10}, {-kPi / 5, -kPi / 12});
    s.coins.delta = 0.05;
    s.kind = WalkKind::three_step_perturbed;
    const SpectrumResult r = eigendecompose(build_operator(s));
    Real edge = 0, defective = 1e9;
    int n_edge = 0, n_def = 0;
    for (const auto& p : r.eigenpairs) {
      if (p.classification == StateClass::bulk) {
        CHECK_THROWS_AS(localization_length(p, s.lattice), PreconditionError);
        continue;
      }
      const LocalizationFit fit = localization_length(p, s.lattice);
      if (p.classification == StateClass::edge_zero) {
        edge = std::max(edge, fit.length);
        ++n_edge;
      }
      if (p.classification == StateClass::defective_pair_member) {
        defective = std::min(defective, fit.length);
        ++n_def;
      }
    }
    REQUIRE(n_edge > 0);
    REQUIRE(n_def > 0);
    CHECK(defective > edge);
  }

  TEST_CASE("upper-band minimum needs bulk states") {
    SpectrumResult empty;
    CHECK_THROWS_AS(minimum_bulk_quasienergy(empty), NumericalError);
  }

  TEST_CASE("small edge-count map agrees with the outer winding numbers") {
    const std::vector<Real> t1 = {-0.6 * kPi, -0.2 * kPi, 0.9 * kPi};
    const std::vector<Real> t2 = {0.2 * kPi, 0.3 * kPi};
    EdgeMapOptions opt;
    opt.num_sites = 241;
    const auto cells = edge_count_map(t1, t2, kInner, 0.1, opt);
    REQUIRE(cells.size() == 6);
    for (const auto& c : cells) {
      CAPTURE(c.outer.theta1 / kPi);
      CAPTURE(c.outer.theta2 / kPi);
      const GapStatus g = bulk_gap_status(c.outer.theta1, c.outer.theta2, 0.1);
      CHECK(c.counts.has_value() == g.gap_open);
      if (!c.counts) continue;
      const auto nu = winding_number(c.outer.theta1, c.outer.theta2, 0.1);
      CHECK(c.counts->n_edge_zero == 2 * nu.nu_shifted);
      CHECK(c.counts->n_edge_pi == c.counts->n_edge_zero);
    }
  }

  TEST_CASE("spectrum csv schema") {
    const SpectrumResult r = eigendecompose(build_operator(inner_outer_spec({0.9 * kPi, 0.2 * kPi}, 0.1)));
    std::ostringstream out;
    write_spectrum_csv(out, r);
    const std::string s = out.str();
    CHECK(s.rfind("re_lambda,im_lambda,re_eps,im_eps,class,loc_center,loc_length\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 482);
    CHECK(s.find(",edge_zero,") != std::string::npos);
  }
}
