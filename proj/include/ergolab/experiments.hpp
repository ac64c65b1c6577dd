// Copyright 2026 The ergolab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ergolab/constructions.hpp"
#include "ergolab/ensemble.hpp"
#include "ergolab/ergodicity.hpp"
#include "ergolab/hamiltonian.hpp"
#include "ergolab/io.hpp"
#include "ergolab/rates.hpp"
#include "ergolab/tensor_network.hpp"

namespace ergolab::cli {

using nlohmann::json;

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kCatalogVersion = "1";

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Experiment { Spectrum, Scan, Equilibrate, Theorem1, Prop1, Overlap, Rates, Stability, Mps, Gibbs };

inline const std::vector<std::pair<Experiment, std::string>>& experiment_names() {
  static const std::vector<std::pair<Experiment, std::string>> names = {
      {Experiment::Spectrum, "spectrum"}, {Experiment::Scan, "scan"},         {Experiment::Equilibrate, "equilibrate"},
      {Experiment::Theorem1, "theorem1"}, {Experiment::Prop1, "prop1"},       {Experiment::Overlap, "overlap"},
      {Experiment::Rates, "rates"},       {Experiment::Stability, "stability"}, {Experiment::Mps, "mps"},
      {Experiment::Gibbs, "gibbs"}};
  return names;
}

inline std::string to_string(Experiment e) {
  for (const auto& [k, v] : experiment_names())
    if (k == e) return v;
  return "unknown";
}

inline Experiment experiment_from_string(const std::string& s) {
  for (const auto& [k, v] : experiment_names())
    if (v == s) return k;
  throw ConfigError("unknown experiment '" + s + "'");
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct MpsSource {
  /// random | file | ghz | aklt | product
  std::string kind = "random";
  std::size_t count = 5;
  int bond_dim = 2;
  int local_dim = 2;
  std::string path;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::Spectrum;
  std::string model = "mixed-field-ising";
  ModelParams params;
  std::string geometry = "chain-open";
  int n = 8;
  std::vector<int> n_grid;
  std::uint64_t seed = 0;
  std::uint64_t model_seed = 0;
  std::string initial = "neel";
  double epsilon = 0.3;
  SubsystemSearchPolicy policy;
  std::size_t bins = 20;
  std::size_t initial_states = 20;
  std::size_t observables = 5;
  double horizon = kDefaultHorizon;
  std::size_t time_samples = 2000;
  std::size_t samples = 200;
  std::size_t restarts = 8;
  std::vector<double> betas = {0.2, 1.0, 5.0};
  double time = 1.0;
  double t_max = 5.0;
  std::size_t t_points = 26;
  MpsSource mps;
  std::string output_json;
  std::string output_csv;

  /// Fills experiment-dependent defaults for keys the user left out.
  static ExperimentConfig defaults_for(Experiment e) {
    ExperimentConfig c;
    c.experiment = e;
    switch (e) {
      case Experiment::Theorem1:
      case Experiment::Prop1: c.n_grid = {6, 8, 10, 12}; break;
      case Experiment::Mps: c.n_grid = {8, 16, 24, 32, 40, 48, 56, 64}; break;
      case Experiment::Stability:
        c.n = 10;
        c.policy.mode = SearchMode::Contiguous;
        break;
      case Experiment::Rates: c.samples = 2000; break;
      default: break;
    }
    return c;
  }

  json to_json() const {
    json grid = json::array();
    for (int v : n_grid) grid.push_back(v);
    return json{{"experiment", cli::to_string(experiment)},
                {"model", model},
                {"params",
                 {{"J", params.J},
                  {"hx", params.hx},
                  {"hz", params.hz},
                  {"delta", params.delta},
                  {"disorder", params.disorder},
                  {"normalize", params.normalize}}},
                {"geometry", geometry},
                {"N", n},
                {"N_grid", grid},
                {"seed", seed},
                {"model_seed", model_seed},
                {"initial", initial},
                {"epsilon", epsilon},
                {"policy",
                 {{"mode", ergolab::to_string(policy.mode)},
                  {"max_fraction", policy.max_subsystem_fraction},
                  {"sample_budget", policy.sample_budget},
                  {"structured", policy.include_structured}}},
                {"bins", bins},
                {"initial_states", initial_states},
                {"observables", observables},
                {"horizon", horizon},
                {"time_samples", time_samples},
                {"samples", samples},
                {"restarts", restarts},
                {"betas", betas},
                {"T", time},
                {"t_max", t_max},
                {"t_points", t_points},
                {"mps",
                 {{"source", mps.kind},
                  {"count", mps.count},
                  {"bond_dim", mps.bond_dim},
                  {"local_dim", mps.local_dim},
                  {"path", mps.path}}},
                {"output", {{"json", output_json}, {"csv", output_csv}}}};
  }

  /// Hash of the canonical (sorted-key, compact) config without output paths.
  std::string hash() const {
    json j = to_json();
    j.erase("output");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
    return buf;
  }

  void validate() const {
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    try {
      model_from_string(model);
      geometry_from_string(geometry);
      params.validate();
      search_mode_from_string(ergolab::to_string(policy.mode));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      fail(e.what());
    }
    if (n < 2 || n > 30) fail("N must lie in [2, 30]");
    for (int v : n_grid)
      if (v < 2 || v > 4096) fail("N_grid entries must lie in [2, 4096]");
    if (!(policy.max_subsystem_fraction > 0 && policy.max_subsystem_fraction <= 0.5)) fail("policy.max_fraction must lie in (0, 0.5]");
    if (initial != "neel" && initial != "random-product") fail("initial must be 'neel' or 'random-product'");
    if (!(epsilon >= 0 && epsilon <= 1)) fail("epsilon must lie in [0, 1]");
    if (bins < 2) fail("bins must be at least 2");
    if (!(horizon > 0)) fail("horizon must be positive");
    if (time_samples < 10) fail("time_samples must be at least 10");
    if (samples < 1) fail("samples must be positive");
    if (restarts < 1) fail("restarts must be positive");
    if (!(time >= 0 && time <= 1e3)) fail("T must lie in [0, 1000]");
    if (!(t_max >= 0) || t_points < 2) fail("t_max must be non-negative and t_points at least 2");
    for (double b : betas)
      if (!(b >= 0) || !std::isfinite(b)) fail("betas must be finite and non-negative");
    static const std::set<std::string> kinds = {"random", "file", "ghz", "aklt", "product"};
    if (!kinds.count(mps.kind)) fail("mps.source must be one of random, file, ghz, aklt, product");
    if (mps.kind == "file" && mps.path.empty()) fail("mps.source 'file' needs mps.path");
    if (mps.bond_dim < 1 || mps.local_dim < 2 || mps.count < 1) fail("mps bond_dim, local_dim and count must be positive");
    const bool sized = experiment == Experiment::Theorem1 || experiment == Experiment::Prop1 || experiment == Experiment::Mps;
    if (sized && n_grid.size() < 3) fail("N_grid needs at least three sizes for " + cli::to_string(experiment));
    if (experiment == Experiment::Prop1)
      for (int v : n_grid)
        if (v % 2) fail("prop1 needs even sizes");
    if (experiment == Experiment::Stability && policy.mode != SearchMode::Contiguous && policy.mode != SearchMode::HalfCutOnly)
      fail("stability needs policy.mode 'contiguous' or 'half-cut-only'");
  }
};

namespace detail {

inline void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError("unknown key '" + where + k + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("key '" + where + key + "' has the wrong type");
  }
}

}  // namespace detail

/// Parses a config document. Keys absent from the document take the
/// experiment's defaults; unknown keys are errors.
inline ExperimentConfig config_from_json(const json& j) {
  using detail::check_keys;
  using detail::read;
  check_keys(j, {"experiment", "model", "params", "geometry", "N", "N_grid", "seed", "model_seed", "initial", "epsilon",
                 "policy", "bins", "initial_states", "observables", "horizon", "time_samples", "samples", "restarts",
                 "betas", "T", "t_max", "t_points", "mps", "output"},
             "");
  if (!j.contains("experiment") || !j["experiment"].is_string()) throw ConfigError("missing string key 'experiment'");
  ExperimentConfig c = ExperimentConfig::defaults_for(experiment_from_string(j["experiment"].get<std::string>()));
  read(j, "model", c.model, "");
  read(j, "geometry", c.geometry, "");
  read(j, "N", c.n, "");
  read(j, "N_grid", c.n_grid, "");
  read(j, "seed", c.seed, "");
  read(j, "model_seed", c.model_seed, "");
  read(j, "initial", c.initial, "");
  read(j, "epsilon", c.epsilon, "");
  read(j, "bins", c.bins, "");
  read(j, "initial_states", c.initial_states, "");
  read(j, "observables", c.observables, "");
  read(j, "horizon", c.horizon, "");
  read(j, "time_samples", c.time_samples, "");
  read(j, "samples", c.samples, "");
  read(j, "restarts", c.restarts, "");
  read(j, "betas", c.betas, "");
  read(j, "T", c.time, "");
  read(j, "t_max", c.t_max, "");
  read(j, "t_points", c.t_points, "");
  if (j.contains("params")) {
    const auto& p = j["params"];
    check_keys(p, {"J", "hx", "hz", "delta", "disorder", "normalize"}, "params.");
    read(p, "J", c.params.J, "params.");
    read(p, "hx", c.params.hx, "params.");
    read(p, "hz", c.params.hz, "params.");
    read(p, "delta", c.params.delta, "params.");
    read(p, "disorder", c.params.disorder, "params.");
    read(p, "normalize", c.params.normalize, "params.");
  }
  if (j.contains("policy")) {
    const auto& p = j["policy"];
    check_keys(p, {"mode", "max_fraction", "sample_budget", "structured"}, "policy.");
    std::string mode = ergolab::to_string(c.policy.mode);
    read(p, "mode", mode, "policy.");
    try {
      c.policy.mode = search_mode_from_string(mode);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    read(p, "max_fraction", c.policy.max_subsystem_fraction, "policy.");
    read(p, "sample_budget", c.policy.sample_budget, "policy.");
    read(p, "structured", c.policy.include_structured, "policy.");
  }
  if (j.contains("mps")) {
    const auto& p = j["mps"];
    check_keys(p, {"source", "count", "bond_dim", "local_dim", "path"}, "mps.");
    read(p, "source", c.mps.kind, "mps.");
    read(p, "count", c.mps.count, "mps.");
    read(p, "bond_dim", c.mps.bond_dim, "mps.");
    read(p, "local_dim", c.mps.local_dim, "mps.");
    read(p, "path", c.mps.path, "mps.");
  }
  if (j.contains("output")) {
    const auto& p = j["output"];
    check_keys(p, {"json", "csv"}, "output.");
    read(p, "json", c.output_json, "output.");
    read(p, "csv", c.output_csv, "output.");
  }
  c.policy.seed = c.seed;
  c.validate();
  return c;
}

struct ExperimentResult {
  json report;
  std::optional<io::CsvTable> csv;
  bool pass = false;
};

/// Output paths are left out so reports of the same run compare equal.
inline json provenance(const ExperimentConfig& c, const std::vector<std::string>& operations) {
  json config = c.to_json();
  config.erase("output");
  return json{{"tool", "ergolab"},
              {"version", kVersion},
              {"catalog_version", kCatalogVersion},
              {"config", config},
              {"config_hash", c.hash()},
              {"operations", operations},
              {"tolerances",
               {{"structural", kTol.structural},
                {"normalization", kTol.normalization},
                {"hermiticity", kTol.hermiticity},
                {"psd_clamp", kTol.psd_clamp},
                {"spectrum_cutoff", kTol.spectrum_cutoff},
                {"residual", kTol.residual},
                {"dense_dim_guard", kTol.dense_dim_guard}}}};
}

namespace detail {

inline LatticeSpec lattice_of(const ExperimentConfig& c, int n) { return chain(n, 2, geometry_from_string(c.geometry)); }

inline LocalHamiltonian model_of(const ExperimentConfig& c, const LatticeSpec& l) {
  return build_model(model_from_string(c.model), c.params, l, c.model_seed, false);
}

inline json fit_json(const LinearFit& f) {
  return json{{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}, {"slope_stderr", f.slope_stderr}};
}

inline json gaps_json(const GapReport& g) {
  return json{{"tolerance", g.tolerance},
              {"min_gap_difference", g.min_gap_difference},
              {"degenerate_gap_pairs", g.degenerate_gap_pairs},
              {"degenerate_levels", g.degenerate_levels},
              {"exhaustive", g.exhaustive}};
}

inline std::vector<Observable> observable_set(const LatticeSpec& l, std::size_t count, std::uint64_t seed) {
  const int mid = l.num_sites / 2;
  std::vector<Observable> all = {Observable::pauli(l, mid, 'Z'), Observable::pauli(l, mid, 'X'),
                                 Observable::correlator(l, mid - 1, 'Z', mid, 'Z'),
                                 Observable::correlator(l, mid - 1, 'X', mid, 'X')};
  for (std::size_t k = 0; all.size() < count; ++k) all.push_back(Observable::random_local(SiteSet(l, {0, 1}), seed + k));
  all.resize(count);
  return all;
}

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

inline ExperimentResult run_spectrum(const ExperimentConfig& c) {
  const LatticeSpec l = lattice_of(c, c.n);
  auto h = model_of(c, l);
  const SpectralData s = diagonalize_and_shift(h);
  const double residual = spectral_residual(h, s);
  const GapReport gaps = gap_report(s);
  ExperimentResult r;
  r.csv = io::CsvTable{{"index", "energy", "density"}, {}};
  for (Eigen::Index i = 0; i < s.energies.size(); ++i) r.csv->add({static_cast<double>(i), s.energies[i], s.densities[i]});
  r.pass = residual <= kTol.residual;
  r.report = {{"diagonalize_and_shift",
               {{"levels", s.dim()}, {"e_max", s.e_max}, {"ground_shift", s.ground_shift}, {"real", s.real}}},
              {"spectral_residual", residual},
              {"trace_per_site", trace_per_site(model_of(c, l))},
              {"gap_report", gaps_json(gaps)}};
  return r;
}

inline ExperimentResult run_scan(const ExperimentConfig& c) {
  const LatticeSpec l = lattice_of(c, c.n);
  auto h = model_of(c, l);
  const SpectralData s = diagonalize_and_shift(h);
  const ErgodicityProfile p = build_profile(s, c.policy, c.bins);
  ExperimentResult r;
  r.csv = io::CsvTable{{"index", "density", "s2", "s2_over_n", "subsystem_mask"}, {}};
  for (const auto& rec : p.records)
    r.csv->add({static_cast<double>(rec.index), rec.density, rec.s2, rec.s2_over_n, static_cast<double>(rec.subsystem.mask())});
  r.pass = true;
  r.report = {{"build_profile",
               {{"states", p.records.size()},
                {"e_max", p.e_max},
                {"bin_width", p.bin_width},
                {"knots", p.knots},
                {"bin_counts", p.bin_counts},
                {"lipschitz_k", p.lipschitz_k},
                {"entanglement_ergodic", p.entanglement_ergodic()},
                {"worst_envelope_violation", p.worst_envelope_violation()}}}};
  return r;
}

inline ExperimentResult run_equilibrate(const ExperimentConfig& c) {
  const LatticeSpec l = lattice_of(c, c.n);
  auto h = model_of(c, l);
  const SpectralData s = diagonalize_and_shift(h);
  const auto observables = observable_set(l, c.observables, c.seed);
  std::vector<Matrix> a_eig;
  for (const auto& a : observables) a_eig.push_back(eigenbasis_matrix(a, s));
  const double gap_tol = 1e-12 * std::max(1.0, s.norm());
  ExperimentResult r;
  r.csv = io::CsvTable{{"state", "observable", "var_exact", "bound_s2", "bound_sinf", "var_sampled", "sampled_se"}, {}};
  json cases = json::array(), subsystems = json::array();
  std::size_t bound_ok = 0, agree_ok = 0, sub_ok = 0, total = 0;
  for (std::size_t i = 0; i < c.initial_states; ++i) {
    const PureState psi = random_product_state(l, c.seed + i);
    const DiagonalEnsemble de = diagonal_ensemble(psi, s);
    for (std::size_t k = 0; k < observables.size(); ++k) {
      const auto b = check_variance_bounds(de, a_eig[k], observables[k], s.energies, gap_tol);
      const auto v = variance_sampled(de, a_eig[k], s.energies, c.horizon, c.time_samples, c.seed + 7919 * i + k);
      const double diff = std::abs(v.estimate - b.var_exact);
      const bool agree = diff <= 0.05 * b.var_exact || diff <= 3 * v.standard_error;
      ++total;
      bound_ok += b.ok;
      agree_ok += agree;
      cases.push_back({{"state", i},
                       {"observable", b.observable},
                       {"norm", b.norm_a},
                       {"var_exact", b.var_exact},
                       {"bound_s2", b.bound_s2},
                       {"bound_sinf", b.bound_sinf},
                       {"tighter", b.tighter},
                       {"approximate", b.approximate},
                       {"ok", b.ok},
                       {"var_sampled", v.estimate},
                       {"sampled_se", v.standard_error},
                       {"sampled_agrees", agree}});
      r.csv->add({static_cast<double>(i), static_cast<double>(k), b.var_exact, b.bound_s2, b.bound_sinf, v.estimate,
                  v.standard_error});
    }
    const auto sub = subsystem_equilibration(psi, s, SiteSet(l, {l.num_sites / 2}), c.horizon, c.time_samples, c.seed + i);
    sub_ok += sub.ok;
    subsystems.push_back({{"state", i},
                          {"mean_distance", sub.mean_distance},
                          {"standard_error", sub.standard_error},
                          {"max_distance", sub.max_distance},
                          {"bound", sub.bound},
                          {"ok", sub.ok}});
  }
  r.pass = bound_ok == total && agree_ok == total && sub_ok == c.initial_states;
  r.report = {{"check_variance_bounds", cases},
              {"subsystem_equilibration", subsystems},
              {"summary",
               {{"cases", total},
                {"bounds_ok", bound_ok},
                {"sampled_agree", agree_ok},
                {"subsystem_ok", sub_ok},
                {"subsystem_cases", c.initial_states}}}};
  return r;
}

inline json size_point_json(const SizePoint& p) {
  return json{{"N", p.num_sites},
              {"e", p.e},
              {"e_max", p.e_max},
              {"s_inf", p.s_inf},
              {"s2", p.s2},
              {"s1", p.s1},
              {"g_at_e", p.g_at_e},
              {"lipschitz_k", p.lipschitz_k},
              {"ergodic_profile", p.ergodic_profile},
              {"bulk",
               {{"delta", p.bulk.delta},
                {"bound", p.bulk.bound},
                {"levels_in_window", p.bulk.levels_in_window},
                {"max_population", p.bulk.max_population},
                {"violations", p.bulk.violations},
                {"lemma_violations", p.bulk.lemma_violations},
                {"vacuous", p.bulk.vacuous},
                {"ok", p.bulk.ok}}},
              {"tail",
               {{"delta", p.tail.delta}, {"levels_outside", p.tail.levels_outside}, {"max_population", p.tail.max_population}}},
              {"gaps", gaps_json(p.gaps)},
              {"var_exact", p.var_exact},
              {"var_bound_s2", p.var_bound_s2}};
}

inline ExperimentResult run_theorem1(const ExperimentConfig& c) {
  SweepConfig cfg;
  cfg.model = model_from_string(c.model);
  cfg.params = c.params;
  cfg.geometry = geometry_from_string(c.geometry);
  cfg.model_seed = c.model_seed;
  cfg.n_grid = c.n_grid;
  cfg.initial.kind = c.initial == "neel" ? InitialStateRecipe::Kind::Neel : InitialStateRecipe::Kind::RandomProduct;
  cfg.initial.seed = c.seed;
  cfg.policy = c.policy;
  cfg.bins = c.bins;
  cfg.observable = ObservableRecipe{'Z', 0};
  std::vector<SizePoint> points;
  for (int n : cfg.n_grid) points.push_back(analyze_size(cfg, n));
  const Theorem1Report t = verify_theorem1(points);
  const CorollaryReport cor = corollary_trend(points, t.constants.k);
  ExperimentResult r;
  r.csv = io::CsvTable{{"N", "e", "s_inf", "s2", "g_at_e", "bulk_max_population", "bulk_bound", "tail_max_population", "var_exact"}, {}};
  json pts = json::array();
  for (const auto& p : points) {
    pts.push_back(size_point_json(p));
    r.csv->add({static_cast<double>(p.num_sites), p.e, p.s_inf, p.s2, p.g_at_e, p.bulk.max_population, p.bulk.bound,
                p.tail.max_population, p.var_exact});
  }
  r.pass = t.ok;
  r.report = {{"analyze_size", pts},
              {"verify_theorem1",
               {{"strictly_increasing", t.strictly_increasing},
                {"s_inf_fit", fit_json(t.s_inf_fit)},
                {"tail_rate_m", t.tail.m},
                {"tail_fit", fit_json(t.tail.fit)},
                {"g", t.constants.g},
                {"lipschitz_k", t.constants.lipschitz_k},
                {"delta", t.constants.delta},
                {"k", t.constants.k},
                {"offset_c", t.offset_c},
                {"bulk_ok", t.bulk_ok},
                {"applicable", t.applicable},
                {"notes", t.notes},
                {"ok", t.ok}}},
              {"corollary_trend",
               {{"sizes_used", cor.sizes_used},
                {"sizes_excluded", cor.sizes_excluded},
                {"log_variance_fit", fit_json(cor.log_variance_fit)},
                {"slope_negative", cor.slope_negative},
                {"slope_consistent", cor.slope_consistent},
                {"pointwise_bound_ok", cor.pointwise_bound_ok},
                {"notes", cor.notes},
                {"ok", cor.ok}}}};
  return r;
}

inline ExperimentResult run_prop1(const ExperimentConfig& c) {
  const Prop1Report p = verify_prop1(c.epsilon, c.n_grid, {RenyiOrder(2.0), RenyiOrder::infinity()}, c.seed);
  ExperimentResult r;
  r.csv = io::CsvTable{{"N", "s1", "s2", "s_inf", "product_overlap", "overlap_window", "delta"}, {}};
  json pts = json::array();
  for (const auto& q : p.points) {
    pts.push_back({{"N", q.num_sites},
                   {"s1", q.s1},
                   {"s_alpha", q.s_alpha},
                   {"bounds", q.bounds},
                   {"bounds_ok", q.bounds_ok},
                   {"product_overlap", q.product_overlap},
                   {"overlap_window", q.overlap_window},
                   {"overlap_ok", q.overlap_ok},
                   {"delta", q.delta},
                   {"delta_bound", q.delta_bound},
                   {"normalization_defect", q.normalization_defect},
                   {"spectrum_deviation", q.spectrum_deviation},
                   {"perturbed_values", q.perturbed_values}});
    r.csv->add({static_cast<double>(q.num_sites), q.s1, q.s_alpha[0], q.s_alpha[1], q.product_overlap, q.overlap_window, q.delta});
  }
  r.pass = p.ok;
  r.report = {{"prop1_point", pts},
              {"verify_prop1",
               {{"epsilon", p.epsilon},
                {"s1_fit", fit_json(p.s1_fit)},
                {"slope_target", p.slope_target},
                {"slope_window", {p.slope_low, p.slope_high}},
                {"slope_in_window", p.slope_in_window},
                {"bounds_ok", p.bounds_ok},
                {"overlap_ok", p.overlap_ok},
                {"s1_density_positive", p.s1_density_positive},
                {"s2_density_decreasing", p.s2_density_decreasing},
                {"ok", p.ok}}}};
  return r;
}

inline ExperimentResult run_overlap(const ExperimentConfig& c) {
  const LatticeSpec l = lattice_of(c, c.n);
  auto h = model_of(c, l);
  const SpectralData s = diagonalize_and_shift(h);
  ExperimentResult r;
  r.csv = io::CsvTable{{"index", "density", "s2", "bound", "max_random_overlap", "optimized_overlap", "tightest_ratio"}, {}};
  std::size_t violations = 0;
  double tightest = 0;
  for (std::size_t i = 0; i < s.dim(); ++i) {
    const PureState e = s.eigenstate(i);
    const auto best = max_s2_subsystem(e, c.policy);
    const auto rep = lemma_overlap_check(e, best.subsystem, {RenyiOrder(2.0)}, c.samples, c.seed + i, c.restarts);
    violations += rep.violations;
    tightest = std::max(tightest, rep.tightest_ratio);
    r.csv->add({static_cast<double>(i), s.densities[static_cast<Eigen::Index>(i)], rep.entropies[0], rep.bounds[0],
                rep.max_random_overlap, rep.optimized_overlap, rep.tightest_ratio});
  }
  r.pass = violations == 0;
  r.report = {{"lemma_overlap_check",
               {{"eigenstates", s.dim()},
                {"products_per_state", c.samples + 1},
                {"violations", violations},
                {"tightest_ratio", tightest}}},
              {"max_s2_subsystem", {{"policy", ergolab::to_string(c.policy.mode)}}}};
  return r;
}

inline ExperimentResult run_rates(const ExperimentConfig& c) {
  ExperimentResult r;
  // Random (rho, V) on 2 + 2 qubits.
  const LatticeSpec l4 = chain(4);
  const SiteSet a4(l4, {0, 1});
  std::mt19937_64 rng(c.seed);
  std::size_t bound_violations = 0, fd_failures = 0;
  double worst_ratio = 0, worst_fd = 0;
  for (std::size_t k = 0; k < c.samples; ++k) {
    const DensityMatrix rho = random_density(16, rng);
    const Matrix v = random_hermitian(16, rng);
    const auto b = check_rate_bound(rho, a4, v);
    const auto fd = compare_with_finite_difference(rho, a4, v);
    bound_violations += !b.ok;
    fd_failures += fd.relative_error > 1e-6;
    worst_ratio = std::max(worst_ratio, b.ratio);
    worst_fd = std::max(worst_fd, fd.relative_error);
  }
  // Boundary decomposition and the integrated bound on the model chain.
  const LatticeSpec l = lattice_of(c, c.n);
  auto h = model_of(c, l);
  apply_ground_shift(h);
  const SiteSet half = SiteSet::contiguous(l, 0, c.n / 2);
  double worst_boundary = 0;
  bool boundary_ok = true;
  for (std::size_t k = 0; k < 10; ++k) {
    const PureState psi = random_state(l, c.seed + k);
    for (const SiteSet& a : {half, SiteSet::contiguous(l, 1, 2), SiteSet::sublattice(l, 0, 2)}) {
      const auto br = boundary_rate(psi, a, h);
      worst_boundary = std::max(worst_boundary, br.difference);
      boundary_ok = boundary_ok && br.agree && br.bound_ok;
    }
  }
  const PureState psi0 = c.initial == "neel" ? neel_state(l) : random_product_state(l, c.seed);
  const auto integ = integrated_bound_check(psi0, h, half, linspace(0, c.t_max, c.t_points));
  r.csv = io::CsvTable{{"t", "S2", "bound"}, {}};
  for (std::size_t k = 0; k < integ.times.size(); ++k) r.csv->add({integ.times[k], integ.s2[k], integ.bound[k]});
  r.pass = bound_violations == 0 && fd_failures == 0 && boundary_ok && integ.ok;
  r.report = {{"check_rate_bound", {{"samples", c.samples}, {"violations", bound_violations}, {"worst_ratio", worst_ratio}}},
              {"compare_with_finite_difference",
               {{"samples", c.samples}, {"failures", fd_failures}, {"worst_relative_error", worst_fd}, {"tolerance", 1e-6}}},
              {"boundary_rate", {{"worst_difference", worst_boundary}, {"ok", boundary_ok}}},
              {"integrated_bound_check",
               {{"boundary_terms", integ.boundary_terms},
                {"max_term_l1", integ.max_term_l1},
                {"worst_ratio", integ.worst_ratio},
                {"violations", integ.violations},
                {"ok", integ.ok}}}};
  return r;
}

inline ExperimentResult run_stability(const ExperimentConfig& c) {
  const LatticeSpec l = lattice_of(c, c.n);
  auto h = model_of(c, l);
  const SpectralData s = diagonalize_and_shift(h);
  const auto u = QuasiLocalUnitary::single_layer(l, c.time, c.seed);
  const StabilityReport st = stability_experiment(s, u, c.policy, c.bins);
  ExperimentResult r;
  r.csv = io::CsvTable{{"knot", "g_before", "g_after"}, {}};
  for (std::size_t k = 0; k < st.knots_before.size(); ++k)
    r.csv->add({static_cast<double>(k), st.knots_before[k], st.knots_after[k]});
  r.pass = st.ok;
  r.report = {{"stability_experiment",
               {{"states", st.states},
                {"candidates", st.candidates},
                {"T", st.time},
                {"max_term_l1", st.max_term_l1},
                {"max_boundary", st.max_boundary},
                {"max_shift", st.max_shift},
                {"worst_ratio", st.worst_ratio},
                {"violations", st.violations},
                {"envelope_shift", st.envelope_shift},
                {"envelope_allowance", st.envelope_allowance},
                {"envelope_ok", st.envelope_ok},
                {"note", st.note},
                {"ok", st.ok}}}};
  return r;
}

inline std::vector<MPSSpec> mps_specs(const ExperimentConfig& c) {
  const auto& m = c.mps;
  if (m.kind == "file") return {io::read_mps_file(m.path)};
  if (m.kind == "ghz") return {ghz_mps()};
  if (m.kind == "aklt") return {aklt_mps()};
  if (m.kind == "product") {
    std::mt19937_64 rng(c.seed);
    return {product_mps(random_unit_vector(static_cast<std::size_t>(m.local_dim), rng))};
  }
  std::vector<MPSSpec> out;
  for (std::size_t k = 0; k < m.count; ++k) out.push_back(random_mps(m.bond_dim, m.local_dim, c.seed + k));
  return out;
}

inline ExperimentResult run_mps(const ExperimentConfig& c) {
  ExperimentResult r;
  r.csv = io::CsvTable{{"spec", "N", "max_overlap", "log_overlap"}, {}};
  const auto specs = mps_specs(c);
  json reports = json::array();
  bool all_ok = true;
  double worst_agreement = 0;
  std::mt19937_64 rng(c.seed);
  SingleSiteOptimizer opt;
  opt.seed = c.seed;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const auto& spec = specs[k];
    for (int n = 2; n <= 12; n += 2) {
      if (std::pow(static_cast<double>(spec.local_dim()), n) > static_cast<double>(kTol.dense_dim_guard)) break;
      const Vector phi = random_unit_vector(static_cast<std::size_t>(spec.local_dim()), rng);
      const PureState dense = mps_to_dense(spec, n);
      const double direct = std::abs(product_state(dense.lattice, std::vector<Vector>(static_cast<std::size_t>(n), phi))
                                         .amplitudes.dot(dense.amplitudes));
      worst_agreement = std::max(worst_agreement, std::abs(direct - transfer_overlap(spec, phi, n)));
    }
    const auto d = mps_overlap_decay(spec, c.n_grid, opt);
    all_ok = all_ok && d.ok;
    json pts = json::array();
    for (const auto& p : d.points) {
      pts.push_back({{"N", p.n}, {"max_overlap", p.overlap}, {"log_overlap", p.log_overlap}});
      r.csv->add({static_cast<double>(k), static_cast<double>(p.n), p.overlap, p.log_overlap});
    }
    reports.push_back({{"label", spec.label},
                       {"injectivity",
                        {{"leading", d.injectivity.leading},
                         {"second", d.injectivity.second},
                         {"relative_gap", d.injectivity.relative_gap},
                         {"injective", d.injectivity.injective}}},
                       {"points", pts},
                       {"fit", fit_json(d.fit)},
                       {"kappa", d.kappa},
                       {"product_branch", d.product_branch},
                       {"notes", d.notes},
                       {"ok", d.ok}});
  }
  const bool ghz_rejected = !injectivity(ghz_mps()).injective;
  r.pass = all_ok && ghz_rejected && worst_agreement <= 1e-9;
  r.report = {{"mps_overlap_decay", reports},
              {"dense_transfer_agreement", {{"worst_difference", worst_agreement}, {"tolerance", 1e-9}}},
              {"ghz_injectivity", {{"rejected", ghz_rejected}}}};
  return r;
}

inline ExperimentResult run_gibbs(const ExperimentConfig& c) {
  const LatticeSpec l = lattice_of(c, c.n);
  auto h = model_of(c, l);
  const SpectralData s = diagonalize_and_shift(h);
  ExperimentResult r;
  r.csv = io::CsvTable{{"beta", "log_z", "ground_probability", "s_inf", "ground_residual", "entropy_residual"}, {}};
  json rows = json::array();
  bool ok = true;
  for (double beta : c.betas) {
    const auto g = check_gibbs_identities(s, beta);
    ok = ok && g.ok;
    rows.push_back({{"beta", beta},
                    {"log_z", g.log_z},
                    {"free_energy", g.free_energy ? json(*g.free_energy) : json(nullptr)},
                    {"ground_probability", g.ground_probability},
                    {"s_inf", g.s_inf},
                    {"ground_residual", g.ground_residual},
                    {"entropy_residual", g.entropy_residual},
                    {"ok", g.ok}});
    r.csv->add({beta, g.log_z, g.ground_probability, g.s_inf, g.ground_residual, g.entropy_residual});
  }
  r.pass = ok;
  r.report = {{"check_gibbs_identities", rows}};
  return r;
}

inline std::vector<std::string> operations_of(Experiment e) {
  switch (e) {
    case Experiment::Spectrum: return {"build_model", "diagonalize_and_shift", "spectral_residual", "gap_report"};
    case Experiment::Scan: return {"build_model", "diagonalize_and_shift", "build_profile"};
    case Experiment::Equilibrate: return {"diagonal_ensemble", "check_variance_bounds", "variance_sampled", "subsystem_equilibration"};
    case Experiment::Theorem1: return {"analyze_size", "verify_theorem1", "corollary_trend"};
    case Experiment::Prop1: return {"build_epsilon_state", "prop1_point", "verify_prop1"};
    case Experiment::Overlap: return {"max_s2_subsystem", "lemma_overlap_check", "max_product_overlap"};
    case Experiment::Rates: return {"check_rate_bound", "compare_with_finite_difference", "boundary_rate", "integrated_bound_check"};
    case Experiment::Stability: return {"stability_experiment"};
    case Experiment::Mps: return {"mps_to_dense", "transfer_overlap", "mps_overlap_decay", "injectivity"};
    case Experiment::Gibbs: return {"check_gibbs_identities"};
  }
  return {};
}

}  // namespace detail

/// Runs one experiment. The report embeds provenance and a pass flag.
inline ExperimentResult run(const ExperimentConfig& c) {
  c.validate();
  ExperimentResult r;
  switch (c.experiment) {
    case Experiment::Spectrum: r = detail::run_spectrum(c); break;
    case Experiment::Scan: r = detail::run_scan(c); break;
    case Experiment::Equilibrate: r = detail::run_equilibrate(c); break;
    case Experiment::Theorem1: r = detail::run_theorem1(c); break;
    case Experiment::Prop1: r = detail::run_prop1(c); break;
    case Experiment::Overlap: r = detail::run_overlap(c); break;
    case Experiment::Rates: r = detail::run_rates(c); break;
    case Experiment::Stability: r = detail::run_stability(c); break;
    case Experiment::Mps: r = detail::run_mps(c); break;
    case Experiment::Gibbs: r = detail::run_gibbs(c); break;
  }
  json full = {{"provenance", provenance(c, detail::operations_of(c.experiment))},
               {"experiment", to_string(c.experiment)},
               {"results", r.report},
               {"pass", r.pass}};
  r.report = std::move(full);
  return r;
}

}  // namespace ergolab::cli
