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

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "ergolab/entropy.hpp"
#include "ergolab/state.hpp"

namespace ergolab {

/// Normalized sqrt(1-eps)|Psi> + sqrt(eps)|Omega>, with Psi a product state
/// and Omega maximally entangled across `half_cut`.
struct EpsilonState {
  double epsilon = 0;
  SiteSet half_cut;
  PureState product_part;
  PureState entangled_part;
  PureState state;
  /// Norm of the superposition before normalization.
  double raw_norm = 1;
  double normalization_defect = 0;
  /// || (1 (x) <Psi_{A^c}|) |Omega> ||.
  double delta = 0;
  double delta_bound = 0;
};

inline EpsilonState build_epsilon_state(const LatticeSpec& lattice, double epsilon, const SiteSet& half_cut,
                                        std::uint64_t seed) {
  if (lattice.num_sites % 2 != 0) throw UnsupportedError("the epsilon construction needs an even number of sites");
  if (2 * static_cast<int>(half_cut.size()) != lattice.num_sites) throw StructuralError("half_cut must contain N/2 sites");
  if (!(half_cut.lattice() == lattice)) throw StructuralError("half_cut belongs to a different lattice");
  if (!(epsilon >= 0 && epsilon <= 1)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  EpsilonState e;
  e.epsilon = epsilon;
  e.half_cut = half_cut;
  const auto factors = random_product_factors(lattice, seed);
  e.product_part = product_state(lattice, factors);
  e.entangled_part = maximally_entangled(lattice, half_cut);

  const Vector raw = std::sqrt(1 - epsilon) * e.product_part.amplitudes + std::sqrt(epsilon) * e.entangled_part.amplitudes;
  e.raw_norm = raw.norm();
  e.normalization_defect = std::abs(e.raw_norm - 1);
  e.state = PureState::normalized(lattice, raw);

  const SiteSet rest = half_cut.complement();
  std::vector<Vector> rest_factors;
  for (int x : rest.sites()) rest_factors.push_back(factors[static_cast<std::size_t>(x)]);
  e.delta = contract_with_product(e.entangled_part.amplitudes, lattice, rest, rest_factors).norm();
  e.delta_bound = std::exp(-std::log(static_cast<double>(lattice.local_dim)) * static_cast<double>(half_cut.size()) / 2);
  if (e.delta > e.delta_bound * (1 + 1e-9))
    throw NumericalError("overlap norm " + std::to_string(e.delta) + " exceeds " + std::to_string(e.delta_bound));
  if (e.normalization_defect > 2 * e.delta_bound * (1 + 1e-9)) throw NumericalError("normalization defect too large");
  return e;
}

/// Closed-form spectrum of xi_A = (1-eps)|a><a| + eps 1/d_A, descending.
inline RealVector model_spectrum(double epsilon, std::size_t d_a) {
  RealVector q = RealVector::Constant(static_cast<Eigen::Index>(d_a), epsilon / static_cast<double>(d_a));
  q[0] += 1 - epsilon;
  return q;
}

/// Upper bound alpha/(alpha-1) log(1/(1-eps)) on S_alpha(xi_A).
inline double epsilon_entropy_bound(double epsilon, RenyiOrder alpha) {
  if (!(alpha.alpha() > 1)) throw std::invalid_argument("the bound needs alpha > 1");
  const double base = -std::log1p(-epsilon);
  if (alpha.is_infinite()) return base;
  return alpha.alpha() / (alpha.alpha() - 1) * base;
}

struct Prop1Point {
  int num_sites = 0;
  double delta = 0;
  double delta_bound = 0;
  double normalization_defect = 0;
  double product_overlap = 0;
  double overlap_window = 0;
  bool overlap_ok = false;
  double s1 = 0;
  std::vector<double> s_alpha;
  std::vector<double> bounds;
  bool bounds_ok = false;
  /// Largest |eigenvalue difference| between raw_norm^2 rho_A and xi_A.
  double spectrum_deviation = 0;
  std::size_t perturbed_values = 0;
};

/// Per-size quantities for one EpsilonState.
inline Prop1Point prop1_point(const EpsilonState& e, const std::vector<RenyiOrder>& alphas, double slack = 0.1) {
  const LatticeSpec& l = e.state.lattice;
  Prop1Point p;
  p.num_sites = l.num_sites;
  p.delta = e.delta;
  p.delta_bound = e.delta_bound;
  p.normalization_defect = e.normalization_defect;
  p.product_overlap = std::norm(overlap(e.product_part, e.state));
  p.overlap_window = 2 * std::pow(static_cast<double>(l.local_dim), -static_cast<double>(e.half_cut.size()));
  p.overlap_ok = std::abs(p.product_overlap - (1 - e.epsilon)) <= p.overlap_window;

  const DensityMatrix rho = partial_trace(e.state, e.half_cut);
  RealVector q = spectrum(rho);
  p.s1 = renyi_entropy(q, RenyiOrder::von_neumann());
  p.bounds_ok = true;
  for (const auto& a : alphas) {
    p.s_alpha.push_back(renyi_entropy(q, a));
    p.bounds.push_back(epsilon_entropy_bound(e.epsilon, a));
    if (p.s_alpha.back() > p.bounds.back() + slack) p.bounds_ok = false;
  }

  std::sort(q.data(), q.data() + q.size(), std::greater<>());
  const RealVector model = model_spectrum(e.epsilon, rho.dim());
  const RealVector diff = (q * e.raw_norm * e.raw_norm - model).cwiseAbs();
  p.spectrum_deviation = diff.maxCoeff();
  p.perturbed_values = static_cast<std::size_t>((diff.array() > 1e-12).count());
  return p;
}

struct Prop1Report {
  double epsilon = 0;
  std::vector<RenyiOrder> alphas;
  std::vector<Prop1Point> points;
  LinearFit s1_fit;
  double slope_target = 0;
  double slope_low = 0;
  double slope_high = 0;
  bool slope_in_window = false;
  bool bounds_ok = false;
  bool overlap_ok = false;
  /// S_1/N stays above half the asymptotic density at every size.
  bool s1_density_positive = false;
  /// S_2/N decreases strictly with N.
  bool s2_density_decreasing = false;
  bool ok = false;
};

/// Builds the epsilon state at every size (half cut = first N/2 sites) and
/// checks the entropy scaling and the constant Renyi bounds.
inline Prop1Report verify_prop1(double epsilon, const std::vector<int>& n_grid, const std::vector<RenyiOrder>& alphas,
                                std::uint64_t seed, int local_dim = 2, double slack = 0.1) {
  if (n_grid.size() < 3) throw InsufficientDataError("the slope fit needs at least three sizes");
  if (!(epsilon > 0 && epsilon < 1)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  Prop1Report r;
  r.epsilon = epsilon;
  r.alphas = alphas;
  std::vector<double> x, y;
  for (int n : n_grid) {
    const LatticeSpec l = chain(n, local_dim);
    const auto e = build_epsilon_state(l, epsilon, SiteSet::contiguous(l, 0, n / 2), seed);
    r.points.push_back(prop1_point(e, alphas, slack));
    x.push_back(n);
    y.push_back(r.points.back().s1);
  }
  r.s1_fit = linear_fit(x, y);
  r.slope_target = epsilon / 2 * std::log(static_cast<double>(local_dim));
  r.slope_low = 0.8 * r.slope_target;
  r.slope_high = 1.2 * r.slope_target;
  r.slope_in_window = r.s1_fit.slope >= r.slope_low && r.s1_fit.slope <= r.slope_high;
  r.bounds_ok = std::all_of(r.points.begin(), r.points.end(), [](const Prop1Point& p) { return p.bounds_ok; });
  r.overlap_ok = std::all_of(r.points.begin(), r.points.end(), [](const Prop1Point& p) { return p.overlap_ok; });
  r.s1_density_positive = std::all_of(r.points.begin(), r.points.end(),
                                      [&](const Prop1Point& p) { return p.s1 / p.num_sites > 0.5 * r.slope_target; });
  r.s2_density_decreasing = true;
  const auto two = std::find_if(alphas.begin(), alphas.end(), [](RenyiOrder a) { return a.alpha() == 2.0; });
  if (two != alphas.end()) {
    const auto k = static_cast<std::size_t>(two - alphas.begin());
    for (std::size_t i = 1; i < r.points.size(); ++i)
      if (!(r.points[i].s_alpha[k] / r.points[i].num_sites < r.points[i - 1].s_alpha[k] / r.points[i - 1].num_sites))
        r.s2_density_decreasing = false;
  }
  r.ok = r.slope_in_window && r.bounds_ok && r.overlap_ok && r.s1_density_positive && r.s2_density_decreasing;
  return r;
}

struct ProductOverlap {
  std::vector<Vector> factors;
  double overlap = 0;
  /// Objective after each sweep of the winning restart.
  std::vector<double> history;
  std::size_t best_restart = 0;
  bool monotone = true;

  PureState state(const LatticeSpec& lattice) const { return product_state(lattice, factors); }
};

/// |<prod|phi>|^2 for the product of `factors`.
inline double product_overlap(const PureState& phi, const std::vector<Vector>& factors) {
  const auto& l = phi.lattice;
  return std::norm(contract_with_product(phi.amplitudes, l, SiteSet::all(l), factors)[0]);
}

/// Alternating single-site maximization of |<prod|phi>|^2. With every site
/// but x fixed, the best factor on x is the normalized contraction of phi
/// with the other factors.
inline ProductOverlap max_product_overlap(const PureState& phi, std::size_t restarts = 8, std::size_t sweeps = 100,
                                          std::uint64_t seed = 0) {
  if (restarts < 1 || sweeps < 1) throw std::invalid_argument("restarts and sweeps must be positive");
  const LatticeSpec& l = phi.lattice;
  const auto n = static_cast<std::size_t>(l.num_sites);
  std::vector<SiteSet> others(n);
  for (int x = 0; x < l.num_sites; ++x) others[static_cast<std::size_t>(x)] = SiteSet(l, {x}).complement();

  std::vector<ProductOverlap> runs(restarts);
  parallel_for(restarts, [&](std::size_t r) {
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + r);
    std::vector<Vector> f(n);
    for (auto& v : f) v = random_unit_vector(static_cast<std::size_t>(l.local_dim), rng);
    ProductOverlap& run = runs[r];
    double current = product_overlap(phi, f);
    run.history.push_back(current);
    for (std::size_t s = 0; s < sweeps; ++s) {
      for (std::size_t x = 0; x < n; ++x) {
        std::vector<Vector> rest;
        for (std::size_t y = 0; y < n; ++y)
          if (y != x) rest.push_back(f[y]);
        const Vector c = contract_with_product(phi.amplitudes, l, others[x], rest);
        const double norm = c.norm();
        if (norm > 0) f[x] = c / norm;
      }
      const double next = product_overlap(phi, f);
      if (next < current - 1e-13) run.monotone = false;
      run.history.push_back(next);
      const bool converged = next - current < 1e-14;
      current = std::max(current, next);
      if (converged) break;
    }
    run.factors = f;
    run.overlap = product_overlap(phi, f);
    run.best_restart = r;
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts; ++r)
    if (runs[r].overlap > runs[best].overlap) best = r;
  ProductOverlap out = runs[best];
  out.monotone = std::all_of(runs.begin(), runs.end(), [](const ProductOverlap& p) { return p.monotone; });
  return out;
}

struct LemmaOverlapReport {
  SiteSet subsystem;
  std::vector<RenyiOrder> alphas;
  std::vector<double> entropies;
  std::vector<double> bounds;
  double max_random_overlap = 0;
  double optimized_overlap = 0;
  /// Largest overlap / bound over all tested products and orders.
  double tightest_ratio = 0;
  RenyiOrder tightest_alpha{2.0};
  std::size_t violations = 0;
  /// Factors of the first violating product state, if any.
  std::vector<Vector> offending;
  bool ok = true;
};

/// Checks |<prod|phi>|^2 <= exp(-((alpha-1)/alpha) S_alpha(sigma_A)) for
/// random products and for the optimizer's best product.
inline LemmaOverlapReport lemma_overlap_check(const PureState& phi, const SiteSet& a, const std::vector<RenyiOrder>& alphas,
                                              std::size_t samples, std::uint64_t seed, std::size_t restarts = 8) {
  for (const auto& al : alphas)
    if (!(al.alpha() > 1)) throw std::invalid_argument("lemma_overlap_check needs alpha > 1");
  LemmaOverlapReport r;
  r.subsystem = a;
  r.alphas = alphas;
  const RealVector q = spectrum(partial_trace(phi, a));
  for (const auto& al : alphas) {
    const double s = renyi_entropy(q, al);
    r.entropies.push_back(s);
    const double w = al.is_infinite() ? 1.0 : (al.alpha() - 1) / al.alpha();
    r.bounds.push_back(std::exp(-w * s));
  }
  const auto check = [&](const std::vector<Vector>& f, double ov) {
    for (std::size_t k = 0; k < alphas.size(); ++k) {
      const double ratio = ov / r.bounds[k];
      if (ratio > r.tightest_ratio) {
        r.tightest_ratio = ratio;
        r.tightest_alpha = alphas[k];
      }
      if (ov > r.bounds[k] * (1 + 1e-10) + 1e-14) {
        if (r.violations == 0) r.offending = f;
        ++r.violations;
      }
    }
  };
  std::vector<std::vector<Vector>> factors(samples);
  std::vector<double> overlaps(samples);
  parallel_for(samples, [&](std::size_t i) {
    factors[i] = random_product_factors(phi.lattice, seed + 1 + i);
    overlaps[i] = product_overlap(phi, factors[i]);
  });
  for (std::size_t i = 0; i < samples; ++i) {
    r.max_random_overlap = std::max(r.max_random_overlap, overlaps[i]);
    check(factors[i], overlaps[i]);
  }
  const auto best = max_product_overlap(phi, restarts, 100, seed);
  r.optimized_overlap = best.overlap;
  check(best.factors, best.overlap);
  r.ok = r.violations == 0;
  return r;
}

}  // namespace ergolab
