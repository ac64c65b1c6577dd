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

// Eigenstate entanglement scans: per-eigenstate subsystem search, the lower
// envelope g(e) of S_2/N with its Lipschitz constant, population tail and
// bulk checks, and size sweeps of S_inf(omega) and temporal variances.

#pragma once

#include <bit>
#include <cstdint>
#include <numeric>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ergolab/core.hpp"
#include "ergolab/ensemble.hpp"
#include "ergolab/entropy.hpp"
#include "ergolab/hamiltonian.hpp"
#include "ergolab/state.hpp"

namespace ergolab {

enum class SearchMode { Exhaustive, RandomSample, HalfCutOnly, Contiguous };

inline std::string to_string(SearchMode m) {
  switch (m) {
    case SearchMode::Exhaustive: return "exhaustive";
    case SearchMode::RandomSample: return "random-sample";
    case SearchMode::HalfCutOnly: return "half-cut-only";
    case SearchMode::Contiguous: return "contiguous";
  }
  return "unknown";
}

inline SearchMode search_mode_from_string(const std::string& s) {
  if (s == "exhaustive") return SearchMode::Exhaustive;
  if (s == "random-sample") return SearchMode::RandomSample;
  if (s == "half-cut-only") return SearchMode::HalfCutOnly;
  if (s == "contiguous") return SearchMode::Contiguous;
  throw std::invalid_argument("unknown search mode '" + s + "'");
}

inline constexpr double kMaxExhaustiveCandidates = 1e6;

/// Number of site sets with 1 <= |A| <= k on n sites.
inline double count_subsets_up_to(int n, int k) {
  double total = 0, c = 1;
  for (int j = 1; j <= k; ++j) {
    c = c * (n - j + 1) / j;
    total += c;
  }
  return total;
}

struct SubsystemSearchPolicy {
  SearchMode mode = SearchMode::RandomSample;
  /// Largest |A| considered is floor(N * max_subsystem_fraction).
  double max_subsystem_fraction = 0.5;
  /// Random subsets drawn in random-sample mode, on top of the structured ones.
  std::size_t sample_budget = 500;
  std::uint64_t seed = 0;
  /// Contiguous blocks of every admissible length, and even/odd sublattices.
  bool include_structured = true;

  int max_size(int n) const { return std::max(1, static_cast<int>(std::floor(n * max_subsystem_fraction + 1e-12))); }

  void validate(const LatticeSpec& lattice) const {
    if (!(max_subsystem_fraction > 0 && max_subsystem_fraction <= 0.5))
      throw std::invalid_argument("max_subsystem_fraction must lie in (0, 1/2]");
    if (mode == SearchMode::Exhaustive &&
        count_subsets_up_to(lattice.num_sites, max_size(lattice.num_sites)) > kMaxExhaustiveCandidates)
      throw UnsupportedError("exhaustive search over more than 1e6 site sets");
  }
};

/// Candidate subsystems for one lattice, in a fixed order.
inline std::vector<SiteSet> candidate_subsystems(const LatticeSpec& lattice, const SubsystemSearchPolicy& policy) {
  policy.validate(lattice);
  const int n = lattice.num_sites;
  const int kmax = policy.max_size(n);
  std::vector<SiteSet> out;
  std::set<std::uint64_t> seen;
  auto push = [&](const SiteSet& a) {
    if (a.empty() || static_cast<int>(a.size()) > kmax) return;
    if (seen.insert(a.mask()).second) out.push_back(a);
  };
  auto push_blocks = [&] {
    const bool periodic = lattice.geometry == Geometry::ChainPeriodic;
    for (int len = 1; len <= kmax; ++len)
      for (int start = 0; start + (periodic ? 0 : len) <= (periodic ? n - 1 : n); ++start)
        push(SiteSet::contiguous(lattice, start, len));
  };
  switch (policy.mode) {
    case SearchMode::HalfCutOnly: push(SiteSet::contiguous(lattice, 0, n / 2)); break;
    case SearchMode::Exhaustive:
      for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask)
        if (std::popcount(mask) <= kmax) push(SiteSet::from_mask(lattice, mask));
      break;
    case SearchMode::Contiguous: push_blocks(); break;
    case SearchMode::RandomSample: {
      if (policy.include_structured) {
        push_blocks();
        push(SiteSet::sublattice(lattice, 0, 2));
        push(SiteSet::sublattice(lattice, 1, 2));
      }
      std::mt19937_64 rng(policy.seed);
      std::uniform_int_distribution<int> size(1, kmax);
      std::vector<int> sites(static_cast<std::size_t>(n));
      for (std::size_t k = 0; k < policy.sample_budget; ++k) {
        std::iota(sites.begin(), sites.end(), 0);
        std::shuffle(sites.begin(), sites.end(), rng);
        const int m = size(rng);
        push(SiteSet(lattice, std::vector<int>(sites.begin(), sites.begin() + m)));
      }
      break;
    }
  }
  return out;
}

/// Evaluates S_2 of many marginals of many states over a fixed candidate list.
/// Index gathers are precomputed once per candidate.
class SubsystemScanner {
 public:
  SubsystemScanner(const LatticeSpec& lattice, std::vector<SiteSet> candidates)
      : lattice_(lattice), candidates_(std::move(candidates)) {
    gathers_.reserve(candidates_.size());
    for (const auto& a : candidates_) {
      IndexSplit split(lattice_, a);
      std::vector<std::uint32_t> g(lattice_.hilbert_dim());
      for (std::size_t i = 0; i < lattice_.hilbert_dim(); ++i) g[split.keep(i) + split.keep_dim() * split.rest(i)] = static_cast<std::uint32_t>(i);
      gathers_.push_back(Gather{static_cast<Eigen::Index>(split.keep_dim()), static_cast<Eigen::Index>(split.rest_dim()), std::move(g)});
    }
  }

  const std::vector<SiteSet>& candidates() const { return candidates_; }

  /// S_2 of candidate k for the state psi.
  template <typename V>
  double s2(const V& psi, std::size_t k, typename V::PlainObject& buffer) const {
    using Mat = Eigen::Matrix<typename V::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Gather& g = gathers_[k];
    buffer.resize(psi.size());
    for (std::size_t i = 0; i < g.index.size(); ++i) buffer[static_cast<Eigen::Index>(i)] = psi[g.index[i]];
    Eigen::Map<const Mat> m(buffer.data(), g.rows, g.cols);
    Mat gram;
    if (g.rows <= g.cols) gram.noalias() = m * m.adjoint();
    else gram.noalias() = m.adjoint() * m;
    return std::max(0.0, -std::log(gram.squaredNorm()));
  }

  struct Best {
    std::size_t index = 0;
    double s2 = 0;
  };

  template <typename V>
  Best best(const V& psi) const {
    typename V::PlainObject buffer;
    Best b;
    b.s2 = -1;
    for (std::size_t k = 0; k < candidates_.size(); ++k) {
      const double v = s2(psi, k, buffer);
      if (v > b.s2) b = Best{k, v};
    }
    return b;
  }

 private:
  struct Gather {
    Eigen::Index rows, cols;
    std::vector<std::uint32_t> index;
  };
  LatticeSpec lattice_;
  std::vector<SiteSet> candidates_;
  std::vector<Gather> gathers_;
};

struct SubsystemResult {
  SiteSet subsystem;
  double s2 = 0;
  std::size_t evaluated = 0;
  /// Set when the search did not cover every admissible subsystem, i.e. the
  /// result is the best found within the sampling budget.
  bool budget_exhausted = false;
};

inline SubsystemResult max_s2_subsystem(const PureState& psi, const SubsystemSearchPolicy& policy) {
  SubsystemScanner scanner(psi.lattice, candidate_subsystems(psi.lattice, policy));
  const auto b = scanner.best(psi.amplitudes);
  SubsystemResult r;
  r.subsystem = scanner.candidates()[b.index];
  r.s2 = b.s2;
  r.evaluated = scanner.candidates().size();
  const int n = psi.lattice.num_sites;
  r.budget_exhausted = static_cast<double>(r.evaluated) < count_subsets_up_to(n, policy.max_size(n));
  return r;
}

/// Constants entering the linear entropy growth rate at density e.
struct GrowthConstants {
  double g = 0;
  double m = 0;
  double lipschitz_k = 0;
  /// Window half-width g / (2K).
  double delta = 0;
  /// k(e) = g/4 * min{1, m g / K^2}.
  double k = 0;
};

inline GrowthConstants growth_constants(double g, double m, double lipschitz_k) {
  if (g < 0 || m < 0 || lipschitz_k < 0) throw std::invalid_argument("growth constants must be non-negative");
  GrowthConstants c{g, m, lipschitz_k, 0, 0};
  c.delta = lipschitz_k > 0 ? g / (2 * lipschitz_k) : std::numeric_limits<double>::infinity();
  const double ratio = lipschitz_k > 0 ? m * g / (lipschitz_k * lipschitz_k) : 1.0;
  c.k = 0.25 * g * std::min(1.0, ratio);
  return c;
}

struct EigenstateRecord {
  std::size_t index = 0;
  double density = 0;
  SiteSet subsystem;
  double s2 = 0;
  double s2_over_n = 0;
};

/// Per-eigenstate maximal S_2 with a piecewise-linear lower envelope g(e)
/// over energy-density bins. The envelope is fitted, not derived.
struct ErgodicityProfile {
  LatticeSpec lattice;
  SubsystemSearchPolicy policy;
  std::vector<EigenstateRecord> records;
  double e_max = 0;
  double bin_width = 0;
  /// Minimum S_2/N per bin (NaN when a bin is empty).
  std::vector<double> bin_minima;
  std::vector<std::size_t> bin_counts;
  /// Envelope values at the bin edges 0, w, 2w, ..., e_max.
  std::vector<double> knots;
  double lipschitz_k = 0;

  std::size_t bins() const { return bin_minima.size(); }

  double g(double e) const {
    if (knots.empty()) throw StructuralError("profile has no envelope");
    if (bin_width <= 0) return knots.front();
    const double x = std::clamp(e, 0.0, e_max) / bin_width;
    const auto j = std::min(static_cast<std::size_t>(x), knots.size() - 2);
    const double t = x - static_cast<double>(j);
    return std::max(0.0, (1 - t) * knots[j] + t * knots[j + 1]);
  }

  /// g at the centre of every bin except the two extremal ones.
  std::vector<double> interior_values() const {
    std::vector<double> v;
    for (std::size_t b = 1; b + 1 < bins(); ++b) v.push_back(g((static_cast<double>(b) + 0.5) * bin_width));
    return v;
  }

  /// True when g is positive (above `threshold`) at every interior bin centre.
  bool entanglement_ergodic(double threshold = 1e-6) const {
    const auto v = interior_values();
    return !v.empty() && std::all_of(v.begin(), v.end(), [&](double x) { return x > threshold; });
  }

  /// Largest amount by which any record falls below the envelope (<= 0 means none does).
  double worst_envelope_violation() const {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& r : records) worst = std::max(worst, g(r.density) - r.s2_over_n);
    return worst;
  }
};

/// Fits the envelope from per-eigenstate records.
inline void fit_envelope(ErgodicityProfile& p, std::size_t bin_count) {
  if (bin_count < 3) throw std::invalid_argument("need at least three bins");
  p.bin_width = p.e_max / static_cast<double>(bin_count);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  p.bin_minima.assign(bin_count, nan);
  p.bin_counts.assign(bin_count, 0);
  for (const auto& r : p.records) {
    const std::size_t b = p.bin_width > 0 ? std::min(bin_count - 1, static_cast<std::size_t>(r.density / p.bin_width)) : 0;
    ++p.bin_counts[b];
    p.bin_minima[b] = std::isnan(p.bin_minima[b]) ? r.s2_over_n : std::min(p.bin_minima[b], r.s2_over_n);
  }
  const auto populated = std::count_if(p.bin_counts.begin(), p.bin_counts.end(), [](std::size_t c) { return c > 0; });
  if (populated < 3) throw InsufficientDataError("fewer than three populated energy-density bins");
  // Empty bins inherit the nearest populated neighbour (the smaller one on ties).
  std::vector<double> filled(bin_count);
  for (std::size_t b = 0; b < bin_count; ++b) {
    if (p.bin_counts[b] > 0) {
      filled[b] = p.bin_minima[b];
      continue;
    }
    for (std::size_t r = 1;; ++r) {
      double v = std::numeric_limits<double>::infinity();
      if (b >= r && p.bin_counts[b - r] > 0) v = std::min(v, p.bin_minima[b - r]);
      if (b + r < bin_count && p.bin_counts[b + r] > 0) v = std::min(v, p.bin_minima[b + r]);
      if (std::isfinite(v)) {
        filled[b] = v;
        break;
      }
    }
  }
  p.knots.assign(bin_count + 1, 0.0);
  for (std::size_t j = 0; j <= bin_count; ++j) {
    double v = std::numeric_limits<double>::infinity();
    if (j > 0) v = std::min(v, filled[j - 1]);
    if (j < bin_count) v = std::min(v, filled[j]);
    p.knots[j] = std::max(0.0, v);
  }
  p.lipschitz_k = 0;
  if (p.bin_width > 0)
    for (std::size_t j = 0; j < bin_count; ++j)
      p.lipschitz_k = std::max(p.lipschitz_k, std::abs(p.knots[j + 1] - p.knots[j]) / p.bin_width);
}

/// Scans every eigenstate of `s` and fits the envelope. `bin_count` bins of
/// width e_max / bin_count.
inline ErgodicityProfile build_profile(const SpectralData& s, const SubsystemSearchPolicy& policy, std::size_t bin_count = 20) {
  ErgodicityProfile p;
  p.lattice = s.lattice;
  p.policy = policy;
  p.e_max = s.e_max;
  SubsystemScanner scanner(s.lattice, candidate_subsystems(s.lattice, policy));
  const double n = s.lattice.num_sites;
  p.records.resize(s.dim());
  const bool real = s.real && s.vectors.imag().cwiseAbs().maxCoeff() == 0.0;
  const RealMatrix real_vectors = real ? RealMatrix(s.vectors.real()) : RealMatrix();
  parallel_for(s.dim(), [&](std::size_t i) {
    const auto c = static_cast<Eigen::Index>(i);
    const auto b = real ? scanner.best(RealVector(real_vectors.col(c))) : scanner.best(Vector(s.vectors.col(c)));
    p.records[i] = EigenstateRecord{i, s.densities[c], scanner.candidates()[b.index], b.s2, b.s2 / n};
  });
  fit_envelope(p, bin_count);
  return p;
}

/// Neel product state |0101...>.
inline PureState neel_state(const LatticeSpec& lattice) {
  std::vector<int> digits(static_cast<std::size_t>(lattice.num_sites));
  for (int x = 0; x < lattice.num_sites; ++x) digits[static_cast<std::size_t>(x)] = x % 2;
  return basis_state(lattice, digits);
}

/// Energy density <psi|H|psi>/N with E_0 = 0.
inline double energy_density(const DiagonalEnsemble& de, const SpectralData& s) {
  return de.populations.dot(s.energies) / s.lattice.num_sites;
}

struct TailSample {
  int num_sites = 0;
  double e = 0;
  double delta = 0;
  std::size_t levels_outside = 0;
  double max_population = 0;
  bool empty = true;
};

/// Largest population among levels with |e_i - e| > delta.
inline TailSample tail_max_population(const DiagonalEnsemble& de, const SpectralData& s, double e, double delta) {
  if (!(delta > 0)) throw std::invalid_argument("tail window half-width must be positive");
  TailSample t;
  t.num_sites = s.lattice.num_sites;
  t.e = e;
  t.delta = delta;
  for (Eigen::Index i = 0; i < s.densities.size(); ++i) {
    if (std::abs(s.densities[i] - e) <= delta) continue;
    ++t.levels_outside;
    t.max_population = std::max(t.max_population, de.populations[i]);
  }
  t.empty = t.levels_outside == 0;
  return t;
}

struct TailFit {
  /// m from log p_max = -m delta^2 N + b.
  double m = 0;
  LinearFit fit;
  std::size_t used = 0;
  std::vector<std::string> notes;
  bool ok = false;
};

/// Fits the decay rate of the largest tail population against delta^2 N.
/// Empty tails and zero populations are skipped with a note.
inline TailFit fit_tail_rate(const std::vector<TailSample>& samples) {
  TailFit f;
  std::vector<double> x, y;
  for (const auto& t : samples) {
    if (t.empty) {
      f.notes.push_back("N=" + std::to_string(t.num_sites) + ": no levels outside the window");
      continue;
    }
    if (!(t.max_population > 0)) {
      f.notes.push_back("N=" + std::to_string(t.num_sites) + ": zero tail population");
      continue;
    }
    x.push_back(t.delta * t.delta * t.num_sites);
    y.push_back(std::log(t.max_population));
  }
  f.used = x.size();
  if (x.size() < 2) {
    f.notes.push_back("fewer than two usable sizes");
    return f;
  }
  f.fit = linear_fit(x, y);
  f.m = -f.fit.slope;
  f.ok = f.m > 0;
  return f;
}

struct BulkReport {
  double e = 0;
  double g = 0;
  double lipschitz_k = 0;
  double delta = 0;
  double slack = 10;
  double bound = 0;  // slack * e^{-g N / 4}
  std::size_t levels_in_window = 0;
  double max_population = 0;
  std::size_t violations = 0;
  /// Populations compared against e^{-S_2(best A_i)/2} of their own eigenstate.
  std::size_t lemma_violations = 0;
  double worst_lemma_ratio = 0;
  bool applicable = false;
  bool vacuous = false;
  bool ok = false;
};

/// Checks populations inside |e_i - e| <= g(e)/(2K) against slack * e^{-g(e) N/4}.
inline BulkReport bulk_check(const DiagonalEnsemble& de, const SpectralData& s, const ErgodicityProfile& profile, double e,
                             double slack = 10.0) {
  BulkReport r;
  r.e = e;
  r.slack = slack;
  r.g = profile.g(e);
  r.lipschitz_k = profile.lipschitz_k;
  const double n = s.lattice.num_sites;
  // Overlap-lemma cross-check runs on every level regardless of the window.
  for (Eigen::Index i = 0; i < de.populations.size(); ++i) {
    const double lemma = std::exp(-profile.records[static_cast<std::size_t>(i)].s2 / 2);
    const double ratio = de.populations[i] / lemma;
    r.worst_lemma_ratio = std::max(r.worst_lemma_ratio, ratio);
    if (de.populations[i] > lemma * (1 + 1e-9) + 1e-14) ++r.lemma_violations;
  }
  if (!(r.g > 0)) {
    r.applicable = false;
    r.ok = r.lemma_violations == 0;
    return r;
  }
  r.applicable = true;
  r.delta = growth_constants(r.g, 0.0, r.lipschitz_k).delta;
  r.bound = slack * std::exp(-r.g * n / 4);
  for (Eigen::Index i = 0; i < s.densities.size(); ++i) {
    if (std::abs(s.densities[i] - e) > r.delta) continue;
    ++r.levels_in_window;
    r.max_population = std::max(r.max_population, de.populations[i]);
    if (de.populations[i] > r.bound) ++r.violations;
  }
  r.vacuous = r.levels_in_window == 0;
  r.ok = r.violations == 0 && r.lemma_violations == 0;
  return r;
}

/// Initial-state recipe shared across system sizes.
struct InitialStateRecipe {
  enum class Kind { Neel, RandomProduct } kind = Kind::Neel;
  std::uint64_t seed = 0;

  PureState build(const LatticeSpec& l) const {
    return kind == Kind::Neel ? neel_state(l) : random_product_state(l, seed + static_cast<std::uint64_t>(l.num_sites));
  }
  std::string label() const { return kind == Kind::Neel ? "neel" : "random-product"; }
};

/// Local observable placed relative to the chain so it is defined at every N.
struct ObservableRecipe {
  char axis = 'Z';
  /// Second axis for a nearest-neighbour correlator; 0 for a single-site operator.
  char partner_axis = 0;

  Observable build(const LatticeSpec& l) const {
    const int mid = l.num_sites / 2;
    if (partner_axis == 0) return Observable::pauli(l, mid, axis);
    return Observable::correlator(l, mid - 1, axis, mid, partner_axis);
  }
};

struct SweepConfig {
  ModelName model = ModelName::MixedFieldIsing;
  ModelParams params;
  Geometry geometry = Geometry::ChainOpen;
  std::uint64_t model_seed = 0;
  std::vector<int> n_grid = {6, 8, 10, 12};
  InitialStateRecipe initial;
  SubsystemSearchPolicy policy;
  std::size_t bins = 20;
  /// Tail window half-width; defaults to the bulk window g(e)/(2K) of each size.
  std::optional<double> tail_delta;
  double bulk_slack = 10.0;
  /// Gap-coincidence tolerance relative to ||H|| for the variance sweep.
  double gap_tolerance = 1e-12;
  std::optional<ObservableRecipe> observable;
};

struct SizePoint {
  int num_sites = 0;
  double e = 0;
  double e_max = 0;
  double s_inf = 0;
  double s2 = 0;
  double s1 = 0;
  double g_at_e = 0;
  double lipschitz_k = 0;
  bool ergodic_profile = false;
  TailSample tail;
  BulkReport bulk;
  GapReport gaps;
  // Variance data (only with an observable recipe).
  double var_exact = std::numeric_limits<double>::quiet_NaN();
  double var_bound_s2 = std::numeric_limits<double>::quiet_NaN();
  double norm_a = 0;
};

/// Builds, diagonalizes and analyzes one size. The caller may inspect the
/// spectral data and profile through `inspect` before they are released.
inline SizePoint analyze_size(const SweepConfig& cfg, int n,
                              const std::function<void(const SpectralData&, const ErgodicityProfile&)>& inspect = nullptr) {
  const LatticeSpec l = chain(n, 2, cfg.geometry);
  auto h = build_model(cfg.model, cfg.params, l, cfg.model_seed, false);
  const SpectralData s = diagonalize_and_shift(h);
  const ErgodicityProfile profile = build_profile(s, cfg.policy, cfg.bins);
  const PureState psi = cfg.initial.build(l);
  const DiagonalEnsemble de = diagonal_ensemble(psi, s);
  SizePoint p;
  p.num_sites = n;
  p.e = energy_density(de, s);
  p.e_max = s.e_max;
  p.s_inf = de.renyi(RenyiOrder::infinity());
  p.s2 = de.renyi(2.0);
  p.s1 = de.renyi(1.0);
  p.g_at_e = profile.g(p.e);
  p.lipschitz_k = profile.lipschitz_k;
  p.ergodic_profile = profile.entanglement_ergodic();
  p.bulk = bulk_check(de, s, profile, p.e, cfg.bulk_slack);
  double tail_delta = cfg.tail_delta.value_or(p.bulk.delta);
  if (!(tail_delta > 0) || !std::isfinite(tail_delta)) tail_delta = 0.2 * s.e_max;
  p.tail = tail_max_population(de, s, p.e, tail_delta);
  p.gaps = gap_report(s.energies, cfg.gap_tolerance * std::max(1.0, s.norm()), true);
  if (cfg.observable) {
    const Observable a = cfg.observable->build(l);
    const auto v = variance_exact(de, eigenbasis_matrix(a, s), s.energies);
    p.var_exact = v.value;
    p.norm_a = a.norm;
    p.var_bound_s2 = a.norm * a.norm * std::exp(-p.s2);
  }
  if (inspect) inspect(s, profile);
  return p;
}

struct Theorem1Report {
  std::vector<SizePoint> points;
  bool strictly_increasing = false;
  LinearFit s_inf_fit;
  TailFit tail;
  GrowthConstants constants;
  /// Smallest c with S_inf(omega_N) >= k N - c over the grid.
  double offset_c = 0;
  bool bulk_ok = false;
  bool applicable = false;
  std::vector<std::string> notes;
  bool ok = false;
};

inline Theorem1Report verify_theorem1(const std::vector<SizePoint>& points) {
  if (points.size() < 3) throw InsufficientDataError("Theorem-1 sweep needs at least three sizes");
  Theorem1Report r;
  r.points = points;
  std::vector<double> x, y;
  std::vector<TailSample> tails;
  r.strictly_increasing = true;
  r.bulk_ok = true;
  for (std::size_t k = 0; k < points.size(); ++k) {
    x.push_back(points[k].num_sites);
    y.push_back(points[k].s_inf);
    tails.push_back(points[k].tail);
    if (k > 0 && !(points[k].s_inf > points[k - 1].s_inf)) r.strictly_increasing = false;
    if (!points[k].bulk.ok) r.bulk_ok = false;
    if (points[k].bulk.vacuous) r.notes.push_back("N=" + std::to_string(points[k].num_sites) + ": bulk window holds no levels");
  }
  r.s_inf_fit = linear_fit(x, y);
  r.tail = fit_tail_rate(tails);
  for (const auto& n : r.tail.notes) r.notes.push_back(n);
  const SizePoint& last = points.back();
  r.applicable = last.g_at_e > 0;
  if (!r.applicable) r.notes.push_back("g(e) = 0 at the initial energy density: theorem inapplicable");
  r.constants = growth_constants(last.g_at_e, std::max(0.0, r.tail.m), last.lipschitz_k);
  r.offset_c = -std::numeric_limits<double>::infinity();
  for (const auto& p : points) r.offset_c = std::max(r.offset_c, r.constants.k * p.num_sites - p.s_inf);
  r.ok = r.applicable && r.strictly_increasing && r.s_inf_fit.slope > 0 && r.bulk_ok && r.tail.ok;
  return r;
}

struct CorollaryReport {
  std::vector<int> sizes_used;
  std::vector<int> sizes_excluded;
  LinearFit log_variance_fit;
  double k_e = 0;
  bool slope_negative = false;
  /// slope <= -k(e) + 2 * slope standard error.
  bool slope_consistent = false;
  bool pointwise_bound_ok = false;
  bool monotone_decreasing = false;
  std::vector<std::string> notes;
  bool ok = false;
};

/// Fits log Var(N) over sizes with clean gap reports and compares with -k(e).
inline CorollaryReport corollary_trend(const std::vector<SizePoint>& points, double k_e) {
  CorollaryReport r;
  r.k_e = k_e;
  std::vector<double> x, y;
  r.pointwise_bound_ok = true;
  for (const auto& p : points) {
    if (std::isnan(p.var_exact)) throw std::invalid_argument("corollary_trend: sweep ran without an observable");
    if (p.s_inf < 1e-12) {
      // A single occupied level: the variance vanishes whatever the gaps.
      if (p.var_exact > 1e-12 * std::max(1.0, p.norm_a * p.norm_a)) r.pointwise_bound_ok = false;
      r.notes.push_back("N=" + std::to_string(p.num_sites) + ": initial state is an eigenstate");
      continue;
    }
    if (!p.gaps.clean()) {
      r.sizes_excluded.push_back(p.num_sites);
      r.notes.push_back("N=" + std::to_string(p.num_sites) + " excluded: " + std::to_string(p.gaps.degenerate_gap_pairs) +
                        " gap coincidences within tolerance " + std::to_string(p.gaps.tolerance));
      continue;
    }
    if (p.var_exact > p.var_bound_s2 * (1 + 1e-9)) r.pointwise_bound_ok = false;
    if (!(p.var_exact > 0)) {
      r.notes.push_back("N=" + std::to_string(p.num_sites) + ": zero variance (fully equilibrated)");
      continue;
    }
    r.sizes_used.push_back(p.num_sites);
    x.push_back(p.num_sites);
    y.push_back(std::log(p.var_exact));
  }
  if (x.size() < 2) {
    // Zero variance at every usable size is the fully equilibrated case.
    const bool all_zero = x.empty() && r.sizes_excluded.size() < points.size();
    if (!all_zero) r.notes.push_back("fewer than two usable sizes");
    r.ok = all_zero && r.pointwise_bound_ok;
    return r;
  }
  r.log_variance_fit = linear_fit(x, y);
  r.slope_negative = r.log_variance_fit.slope < 0;
  r.slope_consistent = r.log_variance_fit.slope <= -k_e + 2 * r.log_variance_fit.slope_stderr;
  r.monotone_decreasing = true;
  for (std::size_t k = 1; k < y.size(); ++k)
    if (!(y[k] < y[k - 1])) r.monotone_decreasing = false;
  r.ok = r.slope_negative && r.slope_consistent && r.pointwise_bound_ok;
  return r;
}

}  // namespace ergolab
