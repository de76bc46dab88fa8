// ptqw: command-line front end for the quantum-walk analyses.
//
//   ptqw <subcommand> [--config file] [--out prefix] [--threads n] [--seed n]
//                     [--k-res n] [--sites n] [--steps n]
//   ptqw reproduce-figure <id> [same flags]
//
// Every run writes CSV artifacts named <prefix><name>.csv and a
// <prefix>manifest.json with the resolved configuration, every option that
// affected the run, the headline results and SHA-256 checksums of the artifacts.

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "ptqw/bulk.hpp"
#include "ptqw/config.hpp"
#include "ptqw/csv.hpp"
#include "ptqw/dynamics.hpp"
#include "ptqw/perturbation.hpp"
#include "ptqw/spectrum.hpp"

using namespace ptqw;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string config;
  std::string out = "ptqw_";
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::optional<int> k_res;
  std::optional<std::int64_t> sites;
  std::optional<std::int64_t> steps;
};

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read back artifact " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

json config_json(const Config& c) {
  json j = json::object();
  for (const auto& [name, section] : c.sections()) {
    json& s = j[name.empty() ? "global" : name];
    s = json::object();
    for (const auto& [k, v] : section) s[k] = v;
  }
  return j;
}

json spec_json(const WalkSpec& spec) {
  Config c;
  walk_spec_to_config(spec, c, "walk");
  json j = config_json(c)["walk"];
  j["num_sites"] = spec.lattice.num_sites();
  return j;
}

json classify_json(const ClassifyOptions& o, const CoinProfile& coins) {
  return {{"tol_edge", o.tol_edge},
          {"tol_real", o.tol_real},
          {"window", o.window.value_or(default_window(coins))},
          {"weight_threshold", o.weight_threshold},
          {"defect_window", o.defect_window},
          {"conjugate_tol", o.conjugate_tol}};
}

json counts_json(const SpectrumCounts& c) {
  return {{"n_edge_zero", c.n_edge_zero}, {"n_edge_pi", c.n_edge_pi},   {"n_defective", c.n_defective},
          {"n_impurity", c.n_impurity},   {"n_bulk", c.n_bulk},         {"n_ambiguous", c.n_ambiguous}};
}

json perturbation_json(const PerturbationOptions& o) {
  return {{"im_threshold", o.im_threshold},
          {"jump_factor", o.jump_factor},
          {"jump_floor", o.jump_floor},
          {"max_refinements", o.max_refinements},
          {"tol_edge", o.eigen.classify.tol_edge},
          {"tol_real", o.eigen.classify.tol_real},
          {"weight_threshold", o.eigen.classify.weight_threshold}};
}

json modes_json(const ModeOptions& m, const ParityOptions& p) {
  return {{"kappa", m.kappa},
          {"neighborhood", m.neighborhood},
          {"max_omega_delta", m.max_omega_delta},
          {"slack_bins", m.slack_bins},
          {"relative_floor", m.relative_floor},
          {"persistence_t_begin", p.t_begin},
          {"persistence_t_end", p.t_end},
          {"persistence_threshold", p.threshold}};
}

json detected_json(std::span<const DetectedMode> modes) {
  json j = json::array();
  for (const auto& m : modes)
    j.push_back({{"omega_over_pi", m.omega / kPi},
                 {"abs_c", m.magnitude},
                 {"background", m.background},
                 {"family", std::string(to_string(m.family))}});
  return j;
}

/// Output plumbing shared by all subcommands.
class Run {
 public:
  Run(const Flags& flags, Config config, std::string subcommand)
      : flags_(flags), config_(std::move(config)) {
    manifest_["tool"] = "ptqw";
    manifest_["subcommand"] = std::move(subcommand);
    manifest_["flags"] = {{"config", flags.config}, {"out", flags.out}};
    if (flags.threads) manifest_["flags"]["threads"] = *flags.threads;
    if (flags.seed) manifest_["flags"]["seed"] = *flags.seed;
    if (flags.k_res) manifest_["flags"]["k_res"] = *flags.k_res;
    if (flags.sites) manifest_["flags"]["sites"] = *flags.sites;
    if (flags.steps) manifest_["flags"]["steps"] = *flags.steps;
    manifest_["runs"] = json::array();
    const fs::path parent = fs::path(flags.out + "x").parent_path();
    std::error_code ec;
    if (!parent.empty()) fs::create_directories(parent, ec);
    if (ec) throw IoError("cannot create output directory " + parent.string() + ": " + ec.message());
  }

  const Config& config() const { return config_; }
  Config& mutable_config() { return config_; }
  int threads() const { return flags_.threads.value_or(1); }
  const Flags& flags() const { return flags_; }

  std::ofstream open(const std::string& name) {
    const std::string path = flags_.out + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    artifacts_.push_back(path);
    return out;
  }

  json& add_run(const std::string& tag, const std::string& kind) {
    manifest_["runs"].push_back({{"tag", tag}, {"operation", kind}});
    return manifest_["runs"].back();
  }

  /// Walk spec of `section` with the --sites override.
  WalkSpec walk_spec(const std::string& section) const {
    WalkSpec spec = walk_spec_from_config(config_, section);
    if (flags_.sites) spec.lattice = Lattice::centered(*flags_.sites, spec.lattice.boundary());
    return spec;
  }

  Real real(const std::string& section, const std::string& key, Real fallback) const {
    return lookup_real(config_, section, key).value_or(fallback);
  }
  long long integer(const std::string& section, const std::string& key, long long fallback) const {
    return lookup_int(config_, section, key).value_or(fallback);
  }
  Real angle(const std::string& section, const std::string& name) const {
    if (auto a = lookup_angle(config_, section, name)) return *a;
    throw PreconditionError("missing angle '" + name + "' (or '" + name + "_over_pi') in [" + section + "]");
  }
  std::string text(const std::string& section, const std::string& key, const std::string& fallback) const {
    return config_.lookup(section, key).value_or(fallback);
  }

  void finish() {
    manifest_["config"] = config_json(config_);
    json arts = json::array();
    for (const auto& path : artifacts_)
      arts.push_back({{"path", path}, {"bytes", fs::file_size(path)}, {"sha256", sha256_file(path)}});
    manifest_["artifacts"] = arts;
    const std::string path = flags_.out + "manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << manifest_.dump(2) << '\n';
  }

 private:
  Flags flags_;
  Config config_;
  json manifest_;
  std::vector<std::string> artifacts_;
};

std::vector<Real> linspace(Real lo, Real hi, long long n) {
  if (n < 1) throw PreconditionError("grid needs at least one point");
  std::vector<Real> v(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<Real>(i) / static_cast<Real>(n - 1);
  return v;
}

std::vector<Real> angle_grid(const Run& run, const std::string& sec, const std::string& axis, long long points) {
  const Real lo = lookup_angle(run.config(), sec, axis + "_min").value_or(-kPi);
  const Real hi = lookup_angle(run.config(), sec, axis + "_max").value_or(kPi);
  return linspace(lo, hi, points);
}

std::vector<std::int64_t> integer_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" ") == std::string::npos) continue;
    out.push_back(std::stoll(item));
  }
  return out;
}

GapRegime regime_from(const std::string& s) {
  if (s == "large") return GapRegime::large;
  if (s == "small") return GapRegime::small;
  throw PreconditionError("regime must be large or small");
}

ClassifyOptions classify_from(const Run& run, const std::string& sec) {
  ClassifyOptions o;
  o.tol_edge = run.real(sec, "tol_edge", o.tol_edge);
  o.tol_real = run.real(sec, "tol_real", o.tol_real);
  o.weight_threshold = run.real(sec, "weight_threshold", o.weight_threshold);
  if (auto w = lookup_int(run.config(), sec, "window")) o.window = *w;
  return o;
}

PerturbationOptions perturbation_from(const Run& run, const std::string& sec) {
  PerturbationOptions o;
  o.eigen.classify = classify_from(run, sec);
  o.im_threshold = run.real(sec, "im_threshold", o.im_threshold);
  o.threads = run.threads();
  return o;
}

// ---- subcommands ---------------------------------------------------------

void run_dispersion(Run& run, const std::string& sec, const std::string& tag) {
  const Real t1 = run.angle(sec, "theta1"), t2 = run.angle(sec, "theta2");
  const Real gamma = run.real(sec, "gamma", 0);
  const int res = run.flags().k_res.value_or(static_cast<int>(run.integer(sec, "k_res", 1000)));
  const auto grid = momentum_grid(res);
  auto out = run.open(tag + "dispersion.csv");
  write_dispersion_csv(out, dispersion(t1, t2, gamma, grid));
  const GapStatus g = bulk_gap_status(t1, t2, gamma, std::max(res, 1000));
  json& r = run.add_run(tag, "dispersion");
  r["inputs"] = {{"theta1", t1}, {"theta2", t2}, {"gamma", gamma}, {"k_res", res}};
  r["results"] = {{"gap_open", g.gap_open}, {"max_abs_d0", g.max_abs_d0}, {"min_gap_0", g.min_gap_0},
                  {"min_gap_pi", g.min_gap_pi}};
}

void run_phase_diagram(Run& run, const std::string& sec, const std::string& tag) {
  const long long n = run.integer(sec, "grid_points", 101);
  const Real gamma = run.real(sec, "gamma", 0);
  const int res = run.flags().k_res.value_or(static_cast<int>(run.integer(sec, "k_res", kDefaultMomentumResolution)));
  const auto t1 = angle_grid(run, sec, "theta1", n), t2 = angle_grid(run, sec, "theta2", n);
  const auto cells = phase_diagram(t1, t2, gamma, res);
  auto out = run.open(tag + "phase_diagram.csv");
  write_phase_diagram_csv(out, cells);
  int open = 0;
  for (const auto& c : cells) open += c.number.has_value();
  json& r = run.add_run(tag, "phase-diagram");
  r["inputs"] = {{"grid_points", n}, {"gamma", gamma}, {"k_res", res}, {"tol_gap", kGapTolerance}};
  r["results"] = {{"cells", cells.size()}, {"gap_open_cells", open}};
}

SpectrumResult run_spectrum(Run& run, const std::string& sec, const std::string& tag) {
  WalkSpec spec = run.walk_spec(sec);
  if (run.flags().seed && spec.kind == WalkKind::three_step_perturbed_disordered) spec.coins.disorder_seed = *run.flags().seed;
  EigenOptions eo;
  eo.classify = classify_from(run, sec);
  const SpectrumResult r = eigendecompose(build_operator(spec), eo);
  {
    auto out = run.open(tag + "spectrum.csv");
    write_spectrum_csv(out, r);
  }
  const std::string vectors = run.text(sec, "vectors", "none");
  int written = 0;
  if (vectors != "none") {
    if (vectors != "localized") throw PreconditionError("vectors must be none or localized");
    for (std::size_t i = 0; i < r.eigenpairs.size(); ++i) {
      if (r.eigenpairs[i].classification == StateClass::bulk) continue;
      auto out = run.open(tag + "eigenvector_" + std::to_string(i) + ".csv");
      write_eigenvector_csv(out, r.eigenpairs[i], spec.lattice);
      ++written;
    }
  }
  int ill = 0;
  for (const auto& p : r.eigenpairs) ill += p.ill_conditioned;
  json& j = run.add_run(tag, "spectrum");
  j["spec"] = spec_json(spec);
  j["options"] = classify_json(eo.classify, spec.coins);
  j["options"]["ill_conditioned_above"] = 1e12;
  j["results"] = counts_json(r.counts);
  j["results"]["eps_m_over_pi"] = r.eps_m ? json(*r.eps_m / kPi) : json(nullptr);
  j["results"]["ill_conditioned"] = ill;
  j["results"]["eigenvectors_written"] = written;
  j["results"]["warnings"] = r.warnings;
  return r;
}

void run_edge_map(Run& run, const std::string& sec, const std::string& tag) {
  const CoinAngles inner{run.angle(sec, "theta1_inner"), run.angle(sec, "theta2_inner")};
  const long long n = run.integer(sec, "grid_points", 21);
  EdgeMapOptions o;
  o.num_sites = run.flags().sites.value_or(run.integer(sec, "sites", o.num_sites));
  o.half_width = run.integer(sec, "half_width", o.half_width);
  o.eigen.classify = classify_from(run, sec);
  o.threads = run.threads();
  const Real gamma = run.real(sec, "gamma", 0.1);
  const auto t1 = angle_grid(run, sec, "theta1_outer", n), t2 = angle_grid(run, sec, "theta2_outer", n);
  const auto cells = edge_count_map(t1, t2, inner, gamma, o);
  auto out = run.open(tag + "edge_map.csv");
  write_edge_map_csv(out, cells);
  int counted = 0;
  for (const auto& c : cells) counted += c.counts.has_value();
  json& j = run.add_run(tag, "edge-map");
  j["inputs"] = {{"theta1_inner", inner.theta1}, {"theta2_inner", inner.theta2}, {"gamma", gamma},
                 {"grid_points", n},             {"sites", o.num_sites},         {"half_width", o.half_width}};
  j["options"] = classify_json(o.eigen.classify, CoinProfile::inner_outer(o.half_width, inner, inner));
  j["results"] = {{"cells", cells.size()}, {"counted_cells", counted}};
}

void run_delta_sweep(Run& run, const std::string& sec, const std::string& tag) {
  const WalkSpec spec = run.walk_spec(sec);
  const auto deltas = linspace(run.real(sec, "delta_min", 0), run.real(sec, "delta_max", 0.1),
                               run.integer(sec, "delta_points", 21));
  const PerturbationOptions po = perturbation_from(run, sec);
  const DeltaSweep sweep = delta_sweep(spec, deltas, po);
  auto out = run.open(tag + "delta_sweep.csv");
  write_sweep_csv(out, sweep);
  json& j = run.add_run(tag, "delta-sweep");
  j["spec"] = spec_json(spec);
  j["options"] = perturbation_json(po);
  j["options"]["deltas"] = deltas;
  j["results"] = {{"points", sweep.points.size()}, {"notes", sweep.notes}};
  if (sweep.ep_bracket) j["results"]["ep_bracket"] = {sweep.ep_bracket->first, sweep.ep_bracket->second};
}

void run_ep_find(Run& run, const std::string& sec, const std::string& tag) {
  const WalkSpec spec = run.walk_spec(sec);
  EpOptions o;
  o.tol_delta = run.real(sec, "tol_delta", o.tol_delta);
  o.coarse_points = static_cast<int>(run.integer(sec, "coarse_points", o.coarse_points));
  o.perturbation = perturbation_from(run, sec);
  const Real lo = run.real(sec, "delta_lo", 0.05), hi = run.real(sec, "delta_hi", 0.08);
  const ExceptionalPoint ep = find_exceptional_point(spec, lo, hi, o);
  {
    auto out = run.open(tag + "ep_find.csv");
    csv::Writer w(out);
    w.header({"delta_lo", "delta_hi", "delta_ep", "lower_bracket_failed", "upper_bracket_failed", "monotone"});
    w.row(ep.lo, ep.hi, ep.delta_ep ? csv::format(*ep.delta_ep) : std::string(), ep.lower_bracket_failed,
          ep.upper_bracket_failed, ep.monotone);
  }
  json& j = run.add_run(tag, "ep-find");
  j["spec"] = spec_json(spec);
  j["options"] = perturbation_json(o.perturbation);
  j["options"]["tol_delta"] = o.tol_delta;
  j["options"]["coarse_points"] = o.coarse_points;
  j["options"]["search_interval"] = {lo, hi};
  j["results"] = {{"delta_ep", ep.delta_ep ? json(*ep.delta_ep) : json(nullptr)},
                  {"lo", ep.lo},
                  {"hi", ep.hi},
                  {"lower_bracket_failed", ep.lower_bracket_failed},
                  {"upper_bracket_failed", ep.upper_bracket_failed},
                  {"monotone", ep.monotone},
                  {"coalescence_overlap", ep.coalescence_overlap},
                  {"evaluations", ep.evaluations},
                  {"note", ep.note}};
}

void run_disorder(Run& run, const std::string& sec, const std::string& tag) {
  const WalkSpec spec = run.walk_spec(sec);
  const Real theta_r = run.real(sec, "theta_r", 0.1);
  const long long n = run.integer(sec, "seeds", 32);
  const auto base = static_cast<std::uint64_t>(run.flags().seed.value_or(run.integer(sec, "seed", 1)));
  std::vector<std::uint64_t> seeds;
  for (long long i = 0; i < n; ++i) seeds.push_back(base + static_cast<std::uint64_t>(i));
  const PerturbationOptions po = perturbation_from(run, sec);
  const DisorderEnsemble e = disorder_ensemble(spec, theta_r, seeds, po);
  auto out = run.open(tag + "disorder.csv");
  write_ensemble_csv(out, e);
  json failures = json::array();
  for (const auto& s : e.seeds)
    if (!s.failure.empty()) failures.push_back({{"seed", s.seed}, {"failure", s.failure}});
  json& j = run.add_run(tag, "disorder");
  j["spec"] = spec_json(spec);
  j["options"] = perturbation_json(po);
  j["options"]["theta_r"] = theta_r;
  j["options"]["seeds"] = seeds;
  j["results"] = {{"fraction_all_real", e.fraction(Regime::all_real)},
                  {"fraction_conjugate_pairs", e.fraction(Regime::conjugate_pairs)},
                  {"fraction_at_exceptional", e.fraction(Regime::at_exceptional)},
                  {"failures", failures}};
}

std::optional<Real> omega_hint(Run& run, const std::string& sec, const WalkSpec& spec, json& record) {
  if (auto w = lookup_angle(run.config(), sec, "omega_delta")) {
    record["omega_delta_source"] = "config";
    return *w;
  }
  if (run.text(sec, "omega_delta_hint", "none") != "spectrum") return std::nullopt;
  WalkSpec periodic = spec;
  periodic.lattice = Lattice::centered(run.integer(sec, "hint_sites", 601));
  const auto w = defective_pair_frequency(eigendecompose(build_operator(periodic)));
  record["omega_delta_source"] = "spectrum";
  record["hint_sites"] = periodic.lattice.num_sites();
  return w;
}

void run_evolve(Run& run, const std::string& sec, const std::string& tag) {
  WalkSpec spec = run.walk_spec(sec);
  if (run.flags().seed && spec.kind == WalkKind::three_step_perturbed_disordered) spec.coins.disorder_seed = *run.flags().seed;
  const std::int64_t steps = run.flags().steps.value_or(run.integer(sec, "steps", 10'000));
  EvolveOptions eo;
  eo.snapshot_times = integer_list(run.text(sec, "snapshot_times", ""));
  if (auto cap = lookup_int(run.config(), sec, "max_sites")) eo.max_sites = *cap;
  const EvolutionTrace t = evolve(spec, default_initial_state(), steps, eo);
  const FourierSpectrum f = dft(t.p0_normalized);
  {
    auto out = run.open(tag + "trace.csv");
    write_trace_csv(out, t);
  }
  {
    auto out = run.open(tag + "fourier.csv");
    write_fourier_csv(out, f);
  }
  for (const auto& s : t.snapshots) {
    auto out = run.open(tag + "snapshot_t" + std::to_string(s.t) + ".csv");
    write_snapshot_csv(out, s);
  }
  json& j = run.add_run(tag, "evolve");
  j["spec"] = spec_json(spec);
  const ModeOptions mo;
  const ParityOptions po;
  j["options"] = modes_json(mo, po);
  j["options"]["steps"] = steps;
  j["options"]["initial_state"] = "|0> (|L> + i|R>) / sqrt 2";
  j["options"]["rescale_above"] = eo.rescale_above;
  j["options"]["max_sites"] = eo.max_sites;
  const std::optional<Real> hint = omega_hint(run, sec, spec, j["options"]);
  const Real persistence = steps >= po.t_end ? short_time_persistence(t, po) : 0;
  const Parity parity = persistence > po.threshold ? Parity::odd : Parity::even;
  const auto modes = detect_modes(f, {hint, parity}, mo);
  j["results"] = {{"persistence", persistence},
                  {"parity", std::string(to_string(parity))},
                  {"omega_delta_hint_over_pi", hint ? json(*hint / kPi) : json(nullptr)},
                  {"modes", detected_json(modes)},
                  {"final_norm", t.norm.back()},
                  {"log_scale", t.log_scale},
                  {"rescalings", t.rescalings},
                  {"leaked_probability", t.leaked_probability},
                  {"final_window_sites", t.final_window_sites}};
}

void run_infer_edges(Run& run, const std::string& sec, const std::string& tag) {
  const CoinAngles left{run.angle(sec, "theta1_left"), run.angle(sec, "theta2_left")};
  const CoinAngles right{run.angle(sec, "theta1_right"), run.angle(sec, "theta2_right")};
  const Real delta = run.real(sec, "delta", 0.05), gamma = run.real(sec, "gamma", 0);
  InferOptions o;
  o.steps = run.flags().steps.value_or(run.integer(sec, "steps", o.steps));
  o.regime = regime_from(run.text(sec, "regime", "large"));
  json& j = run.add_run(tag, "infer-edges");
  WalkSpec spec;
  spec.coins = CoinProfile::left_right(left, right);
  spec.coins.delta = delta;
  spec.gamma = gamma;
  spec.kind = WalkKind::three_step_perturbed;
  j["spec"] = spec_json(spec);
  j["options"] = modes_json(o.modes, o.parity);
  j["options"]["steps"] = o.steps;
  j["options"]["regime"] = std::string(to_string(o.regime));
  o.omega_delta_hint = omega_hint(run, sec, spec, j["options"]);
  const EdgeCountReport r = infer_edge_count(left, right, delta, gamma, o);
  {
    auto out = run.open(tag + "infer_edges.csv");
    csv::Writer w(out);
    w.header({"omega_over_pi", "abs_c", "background", "family"});
    for (const auto& m : r.modes) w.row(m.omega / kPi, m.magnitude, m.background, std::string(to_string(m.family)));
  }
  j["results"] = {{"parity", std::string(to_string(r.parity))},
                  {"persistence", r.persistence},
                  {"consistent_delta_nu", r.consistent_delta_nu},
                  {"ambiguous", r.ambiguous},
                  {"matches_prediction", r.matches_prediction},
                  {"evidence", r.evidence},
                  {"modes", detected_json(r.modes)}};
}

using Runner = void (*)(Run&, const std::string&, const std::string&);

Runner runner_for(const std::string& name) {
  if (name == "dispersion") return run_dispersion;
  if (name == "phase-diagram") return run_phase_diagram;
  if (name == "spectrum") return [](Run& r, const std::string& s, const std::string& t) { run_spectrum(r, s, t); };
  if (name == "edge-map") return run_edge_map;
  if (name == "delta-sweep") return run_delta_sweep;
  if (name == "ep-find") return run_ep_find;
  if (name == "disorder") return run_disorder;
  if (name == "evolve") return run_evolve;
  if (name == "infer-edges") return run_infer_edges;
  throw PreconditionError("unknown subcommand: " + name);
}

// ---- canned figure configurations -----------------------------------------

struct Panel {
  std::string operation;
  std::string tag;
  std::map<std::string, std::string> keys;
};

std::string num(Real v) { return csv::format(v); }

std::map<std::string, std::string> merge(std::map<std::string, std::string> a,
                                         const std::map<std::string, std::string>& b) {
  for (const auto& [k, v] : b) a[k] = v;
  return a;
}

const std::map<std::string, std::string> kInnerOuter = {
    {"layout", "inner_outer"}, {"half_width", "50"}, {"sites", "801"}, {"theta1_inner_over_pi", "0.4"},
    {"theta2_inner_over_pi", "0.1"}};

std::map<std::string, std::string> outer(const std::string& t1, const std::string& t2) {
  return {{"theta1_outer_over_pi", t1}, {"theta2_outer_over_pi", t2}};
}

std::map<std::string, std::string> right(const std::string& t1, const std::string& t2) {
  return {{"theta1_right_over_pi", t1}, {"theta2_right_over_pi", t2}};
}

const std::map<std::string, std::string> kLeftLarge = {
    {"layout", "left_right"}, {"theta1_left_over_pi", "0.75"}, {"theta2_left_over_pi", "0.05"}};
const std::map<std::string, std::string> kLeftSmall = {
    {"layout", "left_right"}, {"theta1_left_over_pi", "0.125"}, {"theta2_left_over_pi", "0.1"}};

std::vector<Panel> figure_panels(const std::string& id) {
  const std::string third = num(1.0 / 3), fifteenth = num(1.0 / 15), two_thirds = num(2.0 / 3);
  const std::string twelfth = num(1.0 / 12), seventh = num(1.0 / 7);
  std::vector<Panel> p;
  if (id == "fig2") {
    const std::pair<std::string, std::string> params[] = {
        {third, "0.2"}, {"-0.1", "0.125"}, {"0.1", seventh}, {"0.25", "0.25"}};
    const char* names[] = {"a", "b", "c", "d"};
    for (int i = 0; i < 4; ++i)
      p.push_back({"dispersion", std::string("fig2") + names[i] + "_",
                   {{"theta1_over_pi", params[i].first}, {"theta2_over_pi", params[i].second}, {"gamma", "0.1"}}});
  } else if (id == "fig3") {
    p.push_back({"phase-diagram", "fig3a_", {{"gamma", "0"}, {"grid_points", "101"}}});
    p.push_back({"phase-diagram", "fig3b_", {{"gamma", "0.1"}, {"grid_points", "101"}}});
  } else if (id == "fig4") {
    const std::pair<std::string, std::string> outers[] = {{"0.7", "0.05"}, {"0.9", "0.2"}, {"-0.2", "0.3"}, {"-0.6", "0.2"}};
    const char* names[] = {"a", "b", "c", "d"};
    for (int i = 0; i < 4; ++i)
      p.push_back({"spectrum", std::string("fig4") + names[i] + "_",
                   merge(merge(kInnerOuter, outer(outers[i].first, outers[i].second)),
                         {{"gamma", "0.1"}, {"kind", "three_step_symmetric"}, {"vectors", i == 3 ? "localized" : "none"}})});
    p.push_back({"spectrum", "fig4e_",
                 merge(merge(kInnerOuter, outer("-0.6", "0.2")), {{"gamma", "0"}, {"kind", "three_step_symmetric"}})});
  } else if (id == "fig5") {
    p.push_back({"edge-map", "fig5_",
                 {{"theta1_inner_over_pi", "0.4"}, {"theta2_inner_over_pi", "0.1"}, {"gamma", "0.1"},
                  {"grid_points", "21"}, {"sites", "401"}, {"half_width", "50"}}});
  } else if (id == "fig6") {
    for (const auto& [name, o] : {std::pair{"nu1", outer("0.9", "0.2")}, std::pair{"nu2", outer("-0.2", "0.3")}})
      p.push_back({"delta-sweep", std::string("fig6_") + name + "_",
                   merge(merge(kInnerOuter, o), {{"gamma", "0.1"}, {"kind", "three_step"}, {"delta_min", "0"},
                                                 {"delta_max", "0.1"}, {"delta_points", "21"}})});
  } else if (id == "fig7") {
    const std::pair<std::string, std::map<std::string, std::string>> rows[] = {{"nu1", outer("0.9", "0.2")},
                                                                               {"nu2", outer("-0.2", "0.3")}};
    const std::tuple<const char*, const char*, const char*> cols[] = {
        {"a", "0.05", "0"}, {"b", "0.05", "0.1"}, {"c", "0.0696", "0.1"}, {"d", "0.08", "0.1"}};
    for (const auto& [row, o] : rows)
      for (const auto& [col, delta, gamma] : cols)
        p.push_back({"spectrum", "fig7" + std::string(col) + "_" + row + "_",
                     merge(merge(kInnerOuter, o), {{"kind", "three_step_perturbed"}, {"delta", delta}, {"gamma", gamma}})});
  } else if (id == "fig8") {
    const std::tuple<const char*, std::map<std::string, std::string>, const char*> cols[] = {
        {"a", outer("0.9", "0.2"), "0.1"}, {"b", outer("-0.2", "0.3"), "0.001"}, {"c", outer("-0.2", "0.3"), "0.1"}};
    for (const auto& [col, o, theta_r] : cols)
      for (const char* gamma : {"0", "0.1"}) {
        const std::string row = std::string(gamma) == "0" ? "1" : "2";
        const auto keys = merge(merge(kInnerOuter, o), {{"delta", "0.05"}, {"gamma", gamma}, {"sites", "401"}});
        p.push_back({"spectrum", "fig8" + std::string(col) + row + "_",
                     merge(keys, {{"kind", "three_step_perturbed_disordered"}, {"disorder_amplitude", theta_r},
                                  {"disorder_seed", "1"}})});
        p.push_back({"disorder", "fig8" + std::string(col) + row + "_",
                     merge(keys, {{"kind", "three_step"}, {"theta_r", theta_r}, {"seeds", "32"}})});
      }
  } else if (id == "fig9") {
    for (const auto& [name, o] : {std::pair{"a", outer("-0.2", "0.3")}, std::pair{"b", outer("-0.6", "0.15")}})
      p.push_back({"evolve", std::string("fig9") + name + "_",
                   merge(merge(kInnerOuter, o), {{"gamma", "0.1"}, {"kind", "three_step"}, {"steps", "246"},
                                                 {"snapshot_times", "246"}})});
  } else if (id == "fig10") {
    for (const auto& [name, delta] : {std::pair{"a", "0"}, std::pair{"b", "0.02"}, std::pair{"c", "0.05"}}) {
      const auto keys = merge(merge(kLeftLarge, right(num(-1.0 / 3), "0")),
                              {{"kind", "three_step_perturbed"}, {"delta", delta}, {"sites", "601"}});
      p.push_back({"evolve", std::string("fig10") + name + "_", merge(keys, {{"omega_delta_hint", "spectrum"}})});
      p.push_back({"spectrum", std::string("fig10") + name + "_", keys});
    }
  } else if (id == "fig11") {
    for (const auto& [name, r] : {std::pair{"a", right("-0.1", "0.4")}, std::pair{"b", right("-" + fifteenth, two_thirds)}})
      p.push_back({"evolve", std::string("fig11") + name + "_",
                   merge(merge(kLeftLarge, r), {{"kind", "three_step_perturbed"}, {"delta", "0.05"},
                                                {"omega_delta_hint", "spectrum"}})});
  } else if (id == "fig12" || id == "fig13") {
    const std::pair<const char*, std::map<std::string, std::string>> cases[] = {
        {"a", right("-0.2", "-" + twelfth)}, {"b", right("-0.1", "0.4")}, {"c", right("-0.05", "-" + seventh)}};
    for (const auto& [name, r] : cases) {
      auto keys = merge(merge(kLeftSmall, r), {{"kind", "three_step_perturbed"}, {"delta", "0.05"}});
      if (id == "fig13") keys["steps"] = "50";
      else keys["omega_delta_hint"] = "spectrum";
      p.push_back({"evolve", id + name + "_", keys});
      if (id == "fig12") p.push_back({"spectrum", id + name + "_", merge(keys, {{"sites", "601"}})});
    }
  } else {
    throw PreconditionError("unknown figure id: " + id + " (expected fig2 ... fig13)");
  }
  return p;
}

void reproduce_figure(Run& run, const std::string& id) {
  for (const Panel& panel : figure_panels(id)) {
    const std::string sec = panel.tag + panel.operation;
    for (const auto& [k, v] : panel.keys)
      if (!run.config().has(sec, k)) run.mutable_config().set(sec, k, v);
    runner_for(panel.operation)(run, sec, panel.tag);
  }
}

void emit_error(const std::string& type, const std::string& message) {
  std::cerr << json{{"error", {{"type", type}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-unitary three-step quantum walk: topology, spectra and dynamics"};
  app.require_subcommand(1);
  Flags flags;
  std::string figure;
  const std::vector<std::string> names = {"dispersion", "phase-diagram", "spectrum", "edge-map",   "delta-sweep",
                                          "ep-find",    "disorder",      "evolve",   "infer-edges"};
  std::vector<CLI::App*> subs;
  for (const auto& n : names) subs.push_back(app.add_subcommand(n));
  CLI::App* fig = app.add_subcommand("reproduce-figure", "Run the canned configuration of a figure (fig2 ... fig13)");
  fig->add_option("id", figure)->required();
  subs.push_back(fig);
  for (CLI::App* s : subs) {
    s->add_option("--config", flags.config, "Configuration file")->check(CLI::ExistingFile);
    s->add_option("--out", flags.out, "Output path prefix");
    s->add_option("--threads", flags.threads, "Worker threads")->check(CLI::PositiveNumber);
    s->add_option("--seed", flags.seed, "Disorder seed (first seed of an ensemble)");
    s->add_option("--k-res", flags.k_res, "Momentum grid resolution")->check(CLI::PositiveNumber);
    s->add_option("--sites", flags.sites, "Lattice sites")->check(CLI::PositiveNumber);
    s->add_option("--steps", flags.steps, "Time steps")->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("usage", e.what());
    return 2;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    Config config = flags.config.empty() ? Config{} : Config::parse_file(flags.config);
    Run run(flags, std::move(config), sub);
    if (sub == "reproduce-figure")
      reproduce_figure(run, figure);
    else
      runner_for(sub)(run, sub, "");
    run.finish();
  } catch (const PreconditionError& e) {
    emit_error("precondition", e.what());
    return 3;
  } catch (const NumericalError& e) {
    emit_error("numerical", e.what());
    return 4;
  } catch (const IoError& e) {
    emit_error("io", e.what());
    return 5;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 1;
  }
  return 0;
}
