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

#include "gtest/gtest.h"

#include "ergolab/constructions.hpp"
#include "ergolab/hamiltonian.hpp"

using namespace ergolab;

namespace {

SiteSet first_half(const LatticeSpec& l) { return SiteSet::contiguous(l, 0, l.num_sites / 2); }

const std::vector<RenyiOrder> kOrders = {RenyiOrder(2.0), RenyiOrder(3.0), RenyiOrder::infinity()};

PureState ghz(int n) {
  const auto l = chain(n);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(l.hilbert_dim()));
  v[0] = v[v.size() - 1] = 1;
  return PureState::normalized(l, v);
}

}  // namespace

TEST(epsilon_state, endpoints) {
  const auto l = chain(6);
  const auto zero = build_epsilon_state(l, 0.0, first_half(l), 3);
  EXPECT_NEAR(std::norm(overlap(zero.state, zero.product_part)), 1.0, 1e-12);
  const auto one = build_epsilon_state(l, 1.0, first_half(l), 3);
  EXPECT_NEAR(std::norm(overlap(one.state, maximally_entangled(l, first_half(l)))), 1.0, 1e-12);
  EXPECT_NEAR(renyi_entropy(partial_trace(one.state, first_half(l)), 2.0), 3 * std::log(2.0), 1e-10);
}

TEST(epsilon_state, rejects_bad_shapes) {
  const auto l7 = chain(7);
  EXPECT_THROW(build_epsilon_state(l7, 0.3, SiteSet::contiguous(l7, 0, 3), 0), UnsupportedError);
  const auto l6 = chain(6);
  EXPECT_THROW(build_epsilon_state(l6, 0.3, SiteSet::contiguous(l6, 0, 2), 0), StructuralError);
  EXPECT_THROW(build_epsilon_state(l6, 1.3, first_half(l6), 0), std::invalid_argument);
}

TEST(epsilon_state, overlap_close_to_one_minus_epsilon_at_n8) {
  const auto l = chain(8);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto e = build_epsilon_state(l, 0.3, first_half(l), seed);
    const double ov = std::norm(overlap(e.product_part, e.state));
    EXPECT_GE(ov, 0.7 - 0.125);
    EXPECT_LE(ov, 0.7 + 0.125);
  }
}

TEST(epsilon_state, delta_equals_inverse_sqrt_subsystem_dimension) {
  // The complement marginal of Omega is maximally mixed, so delta^2 = 1/d_A.
  for (int n : {4, 6, 8, 10}) {
    const auto l = chain(n);
    const auto e = build_epsilon_state(l, 0.4, first_half(l), 11);
    EXPECT_NEAR(e.delta, std::pow(2.0, -n / 4.0), 1e-12);
    EXPECT_LE(e.delta, e.delta_bound * (1 + 1e-12));
  }
}

TEST(epsilon_state, non_contiguous_half_cut) {
  const auto l = chain(8);
  const SiteSet even(l, {0, 2, 4, 6});
  const auto e = build_epsilon_state(l, 0.3, even, 2);
  const double explicit_norm = (std::sqrt(0.7) * e.product_part.amplitudes + std::sqrt(0.3) * e.entangled_part.amplitudes).norm();
  EXPECT_NEAR(e.raw_norm, explicit_norm, 1e-14);
  EXPECT_NEAR(e.state.amplitudes.norm(), 1.0, 1e-14);
}

TEST(epsilon_state, normalization_defect_bound_shrinks_per_site) {
  double previous = 0;
  for (int n : {4, 6, 8, 10, 12}) {
    const auto l = chain(n);
    double worst = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto e = build_epsilon_state(l, 0.5, first_half(l), seed);
      worst = std::max(worst, e.normalization_defect);
      ASSERT_LE(e.normalization_defect, 2 * e.delta_bound);
      if (previous > 0) ASSERT_NEAR(e.delta_bound / previous, M_SQRT1_2, 1e-12);
    }
    previous = build_epsilon_state(l, 0.5, first_half(l), 0).delta_bound;
    EXPECT_LT(worst, 2 * previous);
  }
}

TEST(prop1, bound_substitution) {
  EXPECT_NEAR(epsilon_entropy_bound(0.3, RenyiOrder(2.0)), 2 * std::log(1 / 0.7), 1e-15);
  EXPECT_NEAR(epsilon_entropy_bound(0.3, RenyiOrder(2.0)), 0.7133, 1e-4);
  EXPECT_NEAR(epsilon_entropy_bound(0.3, RenyiOrder::infinity()), std::log(1 / 0.7), 1e-15);
  EXPECT_THROW(epsilon_entropy_bound(0.3, RenyiOrder(1.0)), std::invalid_argument);
  // The alpha = infinity bound is the tightest.
  for (double a : {1.5, 2.0, 5.0, 50.0})
    EXPECT_GT(epsilon_entropy_bound(0.3, RenyiOrder(a)), epsilon_entropy_bound(0.3, RenyiOrder::infinity()));
}

TEST(prop1, model_spectrum_closed_forms) {
  for (std::size_t d_a : {8u, 64u, 1024u}) {
    const auto q = model_spectrum(0.3, d_a);
    EXPECT_NEAR(q.sum(), 1.0, 1e-12);
    EXPECT_NEAR(renyi_entropy(q, RenyiOrder::infinity()), -std::log(0.7 + 0.3 / d_a), 1e-12);
    const double da = static_cast<double>(d_a);
    const double s1 = -(0.7 + 0.3 / da) * std::log(0.7 + 0.3 / da) - (da - 1) * 0.3 / da * std::log(0.3 / da);
    EXPECT_NEAR(renyi_entropy(q, RenyiOrder::von_neumann()), s1, 1e-10);
    EXPECT_GE(s1, (da - 1) / da * 0.3 * std::log(da));
  }
}

TEST(prop1, model_volume_law_slope_approaches_target) {
  std::vector<double> x, y;
  for (int n = 30; n <= 40; n += 2) {
    x.push_back(n);
    y.push_back(renyi_entropy(model_spectrum(0.3, std::size_t{1} << (n / 2)), RenyiOrder::von_neumann()));
  }
  EXPECT_NEAR(linear_fit(x, y).slope, 0.15 * std::log(2.0), 1e-4);
}

TEST(prop1, exact_spectrum_differs_from_model_in_two_values) {
  for (int n : {6, 8, 10}) {
    const auto l = chain(n);
    const auto e = build_epsilon_state(l, 0.3, first_half(l), 5);
    const auto p = prop1_point(e, kOrders);
    EXPECT_LE(p.perturbed_values, 2u);
    EXPECT_LE(p.spectrum_deviation, 2 * e.delta);
  }
}

TEST(prop1, renyi_entropies_stay_bounded) {
  const auto r = verify_prop1(0.3, {6, 8, 10, 12}, kOrders, 1);
  EXPECT_TRUE(r.bounds_ok);
  EXPECT_TRUE(r.overlap_ok);
  EXPECT_TRUE(r.s1_density_positive);
  EXPECT_TRUE(r.s2_density_decreasing);
  EXPECT_NEAR(r.slope_target, 0.15 * std::log(2.0), 1e-15);
  for (const auto& p : r.points) {
    EXPECT_LE(p.s_alpha[2], std::log(1 / 0.7) + 0.1);
    EXPECT_LE(p.s_alpha[2], p.s_alpha[1] + 1e-12);
    EXPECT_LE(p.s_alpha[1], p.s_alpha[0] + 1e-12);
    EXPECT_GT(p.s1, p.s_alpha[0]);
  }
  // S_1 grows with N while the alpha > 1 entropies stay below a constant.
  for (std::size_t i = 1; i < r.points.size(); ++i) EXPECT_GT(r.points[i].s1 - r.points[i - 1].s1, 0.15);
  EXPECT_GT(r.s1_fit.slope, 0.0);
}

TEST(prop1, needs_three_sizes) {
  EXPECT_THROW(verify_prop1(0.3, {6, 8}, kOrders, 0), InsufficientDataError);
}

TEST(product_overlap, product_state_reaches_one) {
  const auto l = chain(6);
  const auto psi = random_product_state(l, 4);
  const auto r = max_product_overlap(psi, 2, 50, 0);
  EXPECT_NEAR(r.overlap, 1.0, 1e-12);
  EXPECT_NEAR(std::norm(overlap(r.state(l), psi)), 1.0, 1e-12);
}

TEST(product_overlap, bell_pair_is_one_half) {
  const auto l = chain(2);
  EXPECT_NEAR(max_product_overlap(maximally_entangled(l, SiteSet(l, {0}))).overlap, 0.5, 1e-12);
}

TEST(product_overlap, ghz_matches_bloch_grid) {
  // Grid over a common single-site vector cos(t/2)|0> + e^{ip} sin(t/2)|1>.
  const auto g = ghz(6);
  double grid = 0;
  for (int i = 0; i <= 64; ++i)
    for (int j = 0; j < 128; ++j) {
      const double t = M_PI * i / 64, ph = 2 * M_PI * j / 128;
      const Complex amp = (std::pow(std::cos(t / 2), 6) + std::pow(std::exp(Complex(0, ph)) * std::sin(t / 2), 6)) / std::sqrt(2.0);
      grid = std::max(grid, std::norm(amp));
    }
  EXPECT_NEAR(grid, 0.5, 1e-12);
  const auto r = max_product_overlap(g, 8, 100, 3);
  EXPECT_NEAR(r.overlap, grid, 1e-9);
  EXPECT_TRUE(r.monotone);
}

TEST(product_overlap, monotone_history_and_beats_random_products) {
  const auto l = chain(8);
  const auto phi = random_state(l, 9);
  const auto r = max_product_overlap(phi, 8, 200, 1);
  EXPECT_TRUE(r.monotone);
  for (std::size_t k = 1; k < r.history.size(); ++k) EXPECT_GE(r.history[k], r.history[k - 1] - 1e-13);
  double best_random = 0;
  for (std::uint64_t s = 0; s < 200; ++s) best_random = std::max(best_random, product_overlap(phi, random_product_factors(l, s)));
  EXPECT_GE(r.overlap, best_random);
}

TEST(product_overlap, schmidt_aligned_two_qubit_equality) {
  const auto l = chain(2);
  for (double p : {0.5, 0.7, 0.9}) {
    Vector v = Vector::Zero(4);
    v[0] = std::sqrt(p);
    v[3] = std::sqrt(1 - p);
    const PureState psi(l, v);
    const double bound = std::exp(-renyi_entropy(partial_trace(psi, SiteSet(l, {0})), RenyiOrder::infinity()));
    EXPECT_NEAR(max_product_overlap(psi).overlap, bound, 1e-12);
  }
}

TEST(product_overlap, restarts_are_thread_independent) {
  const auto phi = random_state(chain(7), 2);
  setenv("ERGOLAB_THREADS", "1", 1);
  const auto a = max_product_overlap(phi, 6, 50, 5);
  setenv("ERGOLAB_THREADS", "4", 1);
  const auto b = max_product_overlap(phi, 6, 50, 5);
  unsetenv("ERGOLAB_THREADS");
  EXPECT_EQ(a.overlap, b.overlap);
  EXPECT_EQ(a.best_restart, b.best_restart);
}

TEST(lemma, maximally_entangled_infinity_bound_is_inverse_dimension) {
  const auto l = chain(8);
  const auto omega = maximally_entangled(l, first_half(l));
  const auto r = lemma_overlap_check(omega, first_half(l), {RenyiOrder::infinity()}, 100, 0);
  EXPECT_NEAR(r.bounds[0], 1.0 / 16, 1e-12);
  EXPECT_TRUE(r.ok);
  EXPECT_NEAR(r.optimized_overlap, 1.0 / 16, 1e-9);
}

TEST(lemma, product_state_trivial_bound) {
  const auto l = chain(6);
  const auto r = lemma_overlap_check(random_product_state(l, 1), first_half(l), kOrders, 50, 0);
  for (double b : r.bounds) EXPECT_NEAR(b, 1.0, 1e-10);
  EXPECT_TRUE(r.ok);
}

TEST(lemma, rejects_alpha_at_most_one) {
  const auto l = chain(4);
  EXPECT_THROW(lemma_overlap_check(random_state(l, 0), first_half(l), {RenyiOrder(1.0)}, 1, 0), std::invalid_argument);
}

TEST(lemma, ising_mid_spectrum_eigenstate) {
  const auto s = diagonalize(build_model(ModelName::MixedFieldIsing, {}, chain(8), 0));
  const auto& l = s.lattice;
  for (std::size_t i : {100u, 128u, 160u}) {
    const auto psi = s.eigenstate(i);
    for (const auto& a : {first_half(l), SiteSet(l, {0, 2, 4, 6}), SiteSet(l, {1, 2, 5})}) {
      const auto r = lemma_overlap_check(psi, a, kOrders, 200, i);
      EXPECT_TRUE(r.ok);
      EXPECT_LT(r.tightest_ratio, 1.0);
      EXPECT_EQ(r.violations, 0u);
    }
  }
}

TEST(lemma, sampled_products_obey_infinity_bound_for_every_subsystem) {
  const auto l = chain(6);
  const auto phi = random_state(l, 3);
  const auto best = max_product_overlap(phi);
  for (std::uint64_t mask = 1; mask < 63; ++mask) {
    const auto a = SiteSet::from_mask(l, mask);
    const double bound = std::exp(-renyi_entropy(partial_trace(phi, a), RenyiOrder::infinity()));
    ASSERT_LE(best.overlap, bound + 1e-12);
  }
}
