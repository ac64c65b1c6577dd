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

#include "ergolab/rates.hpp"

using namespace ergolab;
using namespace ergolab::pauli;

TEST(basis, qubit_basis_is_pauli) {
  const auto b = hermitian_basis(2);
  ASSERT_EQ(b.size(), 4u);
  EXPECT_TRUE(b[0].isApprox(I()));
  EXPECT_TRUE(b[1].isApprox(X()));
  EXPECT_TRUE(b[2].isApprox(Y()));
  EXPECT_TRUE(b[3].isApprox(Z()));
}

TEST(basis, unit_operator_norm_and_orthogonality) {
  for (int d : {2, 3, 4}) {
    const auto b = hermitian_basis(d);
    ASSERT_EQ(b.size(), static_cast<std::size_t>(d * d));
    for (std::size_t i = 0; i < b.size(); ++i) {
      EXPECT_TRUE(is_hermitian(b[i]));
      EXPECT_NEAR(hermitian_norm(b[i]), 1.0, 1e-12);
      for (std::size_t j = 0; j < i; ++j) EXPECT_NEAR(std::abs((b[i] * b[j]).trace()), 0.0, 1e-12);
    }
  }
}

TEST(decompose, zz_is_one_term) {
  const auto dec = decompose_interaction(kron(Z(), Z()), 1, 1);
  ASSERT_EQ(dec.terms.size(), 1u);
  EXPECT_NEAR(dec.l1_norm, 1.0, 1e-15);
  EXPECT_NEAR(dec.terms[0].coefficient, 1.0, 1e-15);
}

TEST(decompose, zero_is_empty) {
  const auto dec = decompose_interaction(Matrix::Zero(4, 4), 1, 1);
  EXPECT_TRUE(dec.terms.empty());
  EXPECT_EQ(dec.l1_norm, 0.0);
}

TEST(decompose, random_round_trip) {
  std::mt19937_64 rng(1);
  for (auto [na, nb] : std::vector<std::pair<int, int>>{{1, 1}, {2, 2}, {1, 3}}) {
    for (int k = 0; k < 10; ++k) {
      const Matrix v = random_hermitian(1 << (na + nb), rng);
      const auto dec = decompose_interaction(v, na, nb);
      EXPECT_LE((dec.reconstruct() - v).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_LE(dec.max_imaginary, 1e-12);
      for (const auto& t : dec.terms) {
        ASSERT_NEAR(hermitian_norm(t.a), 1.0, 1e-10);
        ASSERT_NEAR(hermitian_norm(t.b), 1.0, 1e-10);
      }
    }
  }
}

TEST(decompose, qutrit_round_trip) {
  std::mt19937_64 rng(2);
  const Matrix v = random_hermitian(9, rng);
  EXPECT_LE((decompose_interaction(v, 1, 1, 3).reconstruct() - v).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(decompose, rejects_non_hermitian) {
  EXPECT_THROW(decompose_interaction(kron(X(), Z()) * kI, 1, 1), std::invalid_argument);
  EXPECT_THROW(decompose_interaction(Matrix::Zero(8, 8), 1, 1), StructuralError);
}

TEST(decompose, catalog_bond_norms) {
  const auto l = chain(4);
  const SiteSet a(l, {0, 1});
  const auto ising = build_model(ModelName::MixedFieldIsing, {}, l, 0);
  EXPECT_NEAR(decompose_term(ising.terms[1], a).l1_norm, ising.scale, 1e-12);
  const auto heis = build_model(ModelName::HeisenbergRandomField, {}, l, 0);
  EXPECT_NEAR(decompose_term(heis.terms[1], a).l1_norm, 3 * heis.scale, 1e-12);
  // A site of A may come second in the term support.
  const SiteSet b(l, {2, 3});
  EXPECT_NEAR(decompose_term(heis.terms[1], b).l1_norm, 3 * heis.scale, 1e-12);
}

TEST(rate, commuting_inputs_give_zero) {
  const auto l = chain(2);
  const SiteSet a(l, {0});
  RealVector p(4);
  p << 0.1, 0.2, 0.3, 0.4;
  EXPECT_NEAR(entangling_rate(DensityMatrix::diagonal(p), a, kron(Z(), Z())), 0.0, 1e-15);
}

TEST(rate, product_state_under_zz_is_zero) {
  // tr_B[ZZ, rho_A (x) rho_B] = tr(Z rho_B) [Z, rho_A], and tr(rho_A [Z, rho_A]) = 0.
  std::mt19937_64 rng(3);
  const auto l = chain(2);
  for (int k = 0; k < 20; ++k) {
    const auto ra = random_density(2, rng), rb = random_density(2, rng);
    const DensityMatrix rho(kron(ra.matrix(), rb.matrix()));
    EXPECT_NEAR(entangling_rate(rho, SiteSet(l, {0}), kron(Z(), Z())), 0.0, 1e-12);
  }
}

TEST(rate, matches_finite_difference) {
  std::mt19937_64 rng(4);
  const auto l = chain(4);
  const SiteSet a(l, {0, 1});
  double worst = 0;
  for (int k = 0; k < 300; ++k) {
    const auto rho = random_density(16, rng);
    const auto c = compare_with_finite_difference(rho, a, random_hermitian(16, rng));
    worst = std::max(worst, c.relative_error);
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(rate, non_contiguous_cut_matches_finite_difference) {
  std::mt19937_64 rng(5);
  const auto l = chain(4);
  for (int k = 0; k < 50; ++k) {
    const auto c = compare_with_finite_difference(random_density(16, rng), SiteSet(l, {0, 2}), random_hermitian(16, rng));
    ASSERT_LE(c.relative_error, 1e-6);
  }
}

TEST(rate, pure_route_matches_dense_route) {
  std::mt19937_64 rng(6);
  const auto l = chain(5);
  const auto psi = random_state(l, 1);
  const SiteSet support(l, {1, 3});
  const Matrix v = random_hermitian(4, rng);
  for (const auto& a : {SiteSet(l, {0, 1}), SiteSet(l, {3}), SiteSet(l, {1, 2, 4})}) {
    const double pure = entangling_rate(psi, a, v, support);
    const double dense = entangling_rate(DensityMatrix::from_pure(psi), a, embed_operator(v, support));
    EXPECT_NEAR(pure, dense, 1e-12);
  }
}

TEST(rate, purity_underflow_rejected) {
  EXPECT_THROW(detail::rate_from_commutator_trace(Matrix::Zero(2, 2), Matrix::Zero(2, 2)), NumericalError);
}

TEST(rate_bound, zero_interaction) {
  std::mt19937_64 rng(7);
  const auto l = chain(2);
  const auto r = check_rate_bound(random_density(4, rng), SiteSet(l, {0}), Matrix::Zero(4, 4));
  EXPECT_EQ(r.rate, 0.0);
  EXPECT_EQ(r.bound, 0.0);
  EXPECT_TRUE(r.ok);
}

TEST(rate_bound, random_sweep_never_violated) {
  std::mt19937_64 rng(8);
  const auto l = chain(4);
  const SiteSet a(l, {0, 1});
  double worst = 0;
  for (int k = 0; k < 500; ++k) {
    const auto r = check_rate_bound(random_density(16, rng), a, random_hermitian(16, rng));
    ASSERT_TRUE(r.ok);
    worst = std::max(worst, r.ratio);
  }
  EXPECT_LT(worst, 1.0);
}

TEST(rate_bound, partially_entangled_pair_under_swap_like_generator) {
  const auto l = chain(2);
  const Matrix v = 0.5 * (kron(X(), Y()) - kron(Y(), X()));
  double best = 0;
  for (int k = 1; k < 100; ++k) {
    const double th = M_PI / 2 * k / 100;
    Vector p = Vector::Zero(4);
    p[1] = std::cos(th);
    p[2] = std::sin(th);
    const auto r = check_rate_bound(DensityMatrix::from_pure(p), SiteSet(l, {0}), v);
    ASSERT_TRUE(r.ok);
    best = std::max(best, r.ratio);
  }
  EXPECT_GT(best, 0.3);
  EXPECT_LE(best, 1.0);
}

TEST(boundary, whole_lattice_has_no_boundary) {
  const auto l = chain(6);
  const auto h = build_model(ModelName::MixedFieldIsing, {}, l, 0);
  const auto r = boundary_rate(random_state(l, 0), SiteSet::all(l), h);
  EXPECT_TRUE(r.straddling.empty());
  EXPECT_NEAR(r.direct, 0.0, 1e-12);
  EXPECT_EQ(r.decomposed, 0.0);
}

TEST(boundary, contiguous_blocks_have_at_most_two_terms) {
  for (auto g : {Geometry::ChainOpen, Geometry::ChainPeriodic}) {
    const auto l = chain(8, 2, g);
    const auto h = build_model(ModelName::HeisenbergRandomField, {}, l, 0);
    for (int start = 0; start < 8; ++start)
      for (int len = 1; len < 8; ++len) {
        if (g == Geometry::ChainOpen && start + len > 8) continue;
        const auto n = h.straddling(SiteSet::contiguous(l, start, len)).size();
        ASSERT_LE(n, 2u);
        ASSERT_GE(n, 1u);
      }
  }
}

TEST(boundary, decomposed_equals_direct_at_n6) {
  for (auto m : {ModelName::MixedFieldIsing, ModelName::XXZDisordered, ModelName::HeisenbergRandomField}) {
    const auto l = chain(6);
    const auto h = build_model(m, {}, l, 2);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto psi = random_state(l, seed);
      for (const auto& a : {SiteSet::contiguous(l, 0, 3), SiteSet(l, {0, 2, 4}), SiteSet(l, {1, 2, 5})}) {
        const auto r = boundary_rate(psi, a, h);
        EXPECT_TRUE(r.agree) << r.difference;
        EXPECT_TRUE(r.bound_ok);
      }
    }
  }
}

TEST(integrated, zero_time_is_zero) {
  const auto l = chain(6);
  const auto h = build_model(ModelName::MixedFieldIsing, {}, l, 0);
  const auto r = integrated_bound_check(random_product_state(l, 0), h, SiteSet::contiguous(l, 0, 3), {0.0});
  EXPECT_NEAR(std::abs(r.s2[0] - marginal_renyi2(random_product_state(l, 0).amplitudes, l, SiteSet::contiguous(l, 0, 3))), 0.0,
              1e-12);
  EXPECT_EQ(r.bound[0], 0.0);
  EXPECT_TRUE(r.ok);
}

TEST(integrated, half_cut_envelope_at_n8) {
  const auto l = chain(8);
  const auto h = build_model(ModelName::MixedFieldIsing, {}, l, 0);
  std::vector<double> ts;
  for (int k = 0; k <= 50; ++k) ts.push_back(0.1 * k);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto r = integrated_bound_check(random_product_state(l, seed), h, SiteSet::contiguous(l, 0, 4), ts);
    EXPECT_TRUE(r.ok);
    EXPECT_EQ(r.boundary_terms, 1u);
    EXPECT_LT(r.worst_ratio, 0.5);
  }
}

TEST(integrated, sublattice_counts_every_bond) {
  const auto l = chain(8);
  const auto h = build_model(ModelName::MixedFieldIsing, {}, l, 0);
  std::vector<double> ts;
  for (int k = 0; k <= 20; ++k) ts.push_back(0.25 * k);
  const auto r = integrated_bound_check(random_product_state(l, 1), h, SiteSet::sublattice(l, 0, 2), ts);
  EXPECT_EQ(r.boundary_terms, 7u);
  EXPECT_TRUE(r.ok);
}

TEST(integrated, no_straddling_terms_keeps_entropy_constant) {
  const auto l = chain(6);
  auto h = build_model(ModelName::HeisenbergRandomField, {}, l, 0);
  const SiteSet a = SiteSet::contiguous(l, 0, 3);
  std::erase_if(h.terms, [&](const LocalTerm& t) { return t.support.sites() == std::vector<int>{2, 3}; });
  ASSERT_TRUE(h.straddling(a).empty());
  std::vector<double> ts;
  for (int k = 0; k <= 20; ++k) ts.push_back(0.5 * k);
  const auto r = integrated_bound_check(random_state(l, 3), h, a, ts);
  for (double s : r.s2) EXPECT_NEAR(s, r.s2[0], 1e-9);
}

TEST(unitary, validation) {
  const auto l = chain(4);
  auto u = QuasiLocalUnitary::single_layer(l, 1.0, 0);
  EXPECT_EQ(u.generator.terms.size(), 2u);
  const Matrix d = u.dense();
  EXPECT_LE((d * d.adjoint() - Matrix::Identity(16, 16)).cwiseAbs().maxCoeff(), 1e-12);
  u.generator.terms[0].norm = 2;
  EXPECT_THROW(u.validate(), std::invalid_argument);
  auto v = QuasiLocalUnitary::identity(l);
  v.time = -1;
  EXPECT_THROW(v.validate(), std::invalid_argument);
}

TEST(stability, identity_leaves_profile_unchanged) {
  const auto h = build_model(ModelName::MixedFieldIsing, {}, chain(6), 0);
  const auto s = diagonalize(h);
  SubsystemSearchPolicy p;
  p.mode = SearchMode::Contiguous;
  const auto r = stability_experiment(s, QuasiLocalUnitary::identity(s.lattice), p);
  EXPECT_NEAR(r.max_shift, 0.0, 1e-12);
  EXPECT_EQ(r.knots_before, r.knots_after);
  EXPECT_TRUE(r.ok);
}

TEST(stability, single_layer_shift_within_bound_at_n8) {
  const auto h = build_model(ModelName::MixedFieldIsing, {}, chain(8), 0);
  const auto s = diagonalize(h);
  SubsystemSearchPolicy p;
  p.mode = SearchMode::Contiguous;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto r = stability_experiment(s, QuasiLocalUnitary::single_layer(s.lattice, 1.0, seed), p);
    EXPECT_EQ(r.violations, 0u);
    EXPECT_LE(r.max_boundary, 2u);
    EXPECT_GT(r.max_shift, 0.0);
    EXPECT_LE(r.worst_ratio, 1.0);
    EXPECT_TRUE(r.envelope_ok);
    EXPECT_TRUE(r.ok);
  }
}

TEST(stability, rejects_non_contiguous_policy) {
  const auto s = diagonalize(build_model(ModelName::MixedFieldIsing, {}, chain(4), 0));
  SubsystemSearchPolicy p;
  p.mode = SearchMode::Exhaustive;
  EXPECT_THROW(stability_experiment(s, QuasiLocalUnitary::identity(s.lattice), p), std::invalid_argument);
}

TEST(stability, contiguous_policy_lists_blocks) {
  const auto l = chain(6);
  SubsystemSearchPolicy p;
  p.mode = SearchMode::Contiguous;
  EXPECT_EQ(candidate_subsystems(l, p).size(), 6u + 5u + 4u);
  EXPECT_EQ(search_mode_from_string("contiguous"), SearchMode::Contiguous);
}
