#include "ptqw/walk.hpp"

#include <cmath>
#include <ostream>

#include "ptqw/csv.hpp"

namespace ptqw {

namespace {

constexpr std::pair<WalkKind, std::string_view> kKindNames[] = {
    {WalkKind::two_step, "two_step"},
    {WalkKind::three_step, "three_step"},
    {WalkKind::three_step_symmetric, "three_step_symmetric"},
    {WalkKind::three_step_perturbed, "three_step_perturbed"},
    {WalkKind::three_step_perturbed_symmetric, "three_step_perturbed_symmetric"},
    {WalkKind::three_step_perturbed_disordered, "three_step_perturbed_disordered"},
};

bool is_disordered(WalkKind kind) { return kind == WalkKind::three_step_perturbed_disordered; }

Real slot_angle(const WalkSpec& spec, std::int64_t x, CoinSlot slot) {
  const CoinAngles base = spec.coins.base_angles(x);
  const Real offset = is_disordered(spec.kind) ? spec.coins.disorder_offset(x, slot) : 0.0;
  const Real delta = is_perturbed(spec.kind) ? spec.coins.delta : 0.0;
  switch (slot) {
    case CoinSlot::first:
      return base.theta1 + offset;
    case CoinSlot::middle:
      return base.theta2 + offset + delta;
    case CoinSlot::last:
      return base.theta2 + offset;
  }
  return 0;
}

SparseMatrixXc coin_operator(const WalkSpec& spec, CoinSlot slot, Real scale = 1.0) {
  return site_local_operator(spec.lattice, [&](std::int64_t x) {
    return coin_matrix<Real>(scale * slot_angle(spec, x, slot));
  });
}

SparseMatrixXc reflection_coin_operator(const WalkSpec& spec, CoinSlot slot) {
  return site_local_operator(spec.lattice, [&](std::int64_t x) {
    return reflection_coin_matrix<Real>(slot_angle(spec, x, slot));
  });
}

void validate(const WalkSpec& spec) {
  if (!spec.coins.finite()) throw PreconditionError("coin angles must be finite");
  if (!std::isfinite(spec.gamma) || spec.gamma < 0)
    throw PreconditionError("gamma must be finite and non-negative");
  if (spec.coins.disorder_amplitude < 0)
    throw PreconditionError("disorder amplitude must be non-negative");
  if (!is_perturbed(spec.kind) && spec.coins.delta != 0)
    throw PreconditionError("a non-zero delta needs a perturbed walk kind");
  if (!is_disordered(spec.kind) && spec.coins.disorder_amplitude != 0)
    throw PreconditionError("disorder needs the three_step_perturbed_disordered kind");
  if (spec.lattice.num_sites() <= 2 * hops_per_step(spec.kind))
    throw PreconditionError("lattice too small: bandwidth must stay below N/2");
}

}  // namespace

std::string_view to_string(WalkKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

WalkKind walk_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  throw PreconditionError("unknown walk kind: " + std::string(name));
}

bool is_three_step(WalkKind kind) { return kind != WalkKind::two_step; }

bool is_perturbed(WalkKind kind) {
  return kind == WalkKind::three_step_perturbed ||
         kind == WalkKind::three_step_perturbed_symmetric ||
         kind == WalkKind::three_step_perturbed_disordered;
}

bool is_symmetric_frame(WalkKind kind) {
  return kind == WalkKind::three_step_symmetric ||
         kind == WalkKind::three_step_perturbed_symmetric;
}

int hops_per_step(WalkKind kind) { return is_three_step(kind) ? 3 : 2; }

SparseMatrixXc shift_operator(const Lattice& lattice) {
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(static_cast<std::size_t>(2 * lattice.num_sites()));
  for (std::int64_t i = 0; i < lattice.num_sites(); ++i) {
    const std::int64_t x = lattice.position(i);
    if (auto j = lattice.site_index(x - 1)) triplets.emplace_back(2 * *j, 2 * i, 1.0);
    if (auto j = lattice.site_index(x + 1)) triplets.emplace_back(2 * *j + 1, 2 * i + 1, 1.0);
  }
  SparseMatrixXc s(lattice.dim(), lattice.dim());
  s.setFromTriplets(triplets.begin(), triplets.end());
  return s;
}

SparseMatrixXc gain_loss_operator(const Lattice& lattice, Real gamma) {
  Eigen::Matrix<Real, 2, 2> g = Eigen::Matrix<Real, 2, 2>::Zero();
  g(0, 0) = std::exp(gamma);
  g(1, 1) = std::exp(-gamma);
  return site_local_operator(lattice, [&](std::int64_t) { return g; });
}

WalkOperator build_operator(const WalkSpec& spec) {
  validate(spec);
  const Lattice& lat = spec.lattice;
  const SparseMatrixXc shift = shift_operator(lat);
  const SparseMatrixXc gain = gain_loss_operator(lat, spec.gamma);
  const SparseMatrixXc loss = gain_loss_operator(lat, -spec.gamma);

  SparseMatrixXc u;
  if (spec.kind == WalkKind::two_step) {
    u = gain * shift * reflection_coin_operator(spec, CoinSlot::last) * loss * shift *
        reflection_coin_operator(spec, CoinSlot::first);
  } else {
    const SparseMatrixXc core = loss * shift * coin_operator(spec, CoinSlot::last) * shift *
                                coin_operator(spec, CoinSlot::middle) * gain * shift;
    if (is_symmetric_frame(spec.kind)) {
      const SparseMatrixXc half = coin_operator(spec, CoinSlot::first, 0.5);
      u = half * core * half;
    } else {
      u = core * coin_operator(spec, CoinSlot::first);
    }
  }
  u.prune(Complex(0.0));
  u.makeCompressed();

  WalkOperator op{std::move(u), spec, 0};
  op.bandwidth = position_bandwidth(op.matrix, lat);
  return op;
}

int position_bandwidth(const SparseMatrixXc& m, const Lattice& lattice) {
  std::int64_t band = 0;
  for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
    for (SparseMatrixXc::InnerIterator it(m, r); it; ++it) {
      const std::int64_t xr = lattice.position(it.row() / 2);
      const std::int64_t xc = lattice.position(it.col() / 2);
      band = std::max(band, lattice.distance(xr, xc));
    }
  }
  return static_cast<int>(band);
}

void write_coordinate_list(std::ostream& out, const WalkOperator& op) {
  out << "# dim=" << op.dim() << " band=" << op.bandwidth << '\n';
  for (Eigen::Index r = 0; r < op.matrix.outerSize(); ++r) {
    for (SparseMatrixXc::InnerIterator it(op.matrix, r); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << csv::format(it.value().real()) << ' '
          << csv::format(it.value().imag()) << '\n';
    }
  }
}

}  // namespace ptqw
