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

#include "ergolab/entropy.hpp"
#include "ergolab/state.hpp"

using namespace ergolab;

namespace {

// Moves the sites of `keep` to the front (in order) by an explicit digit
// permutation, then traces out the trailing block of a contiguous split.
Matrix permutation_oracle(const Vector& psi, int n, const std::vector<int>& keep) {
  std::vector<int> order = keep;
  for (int x = 0; x < n; ++x)
    if (std::find(keep.begin(), keep.end(), x) == keep.end()) order.push_back(x);
  const std::size_t dim = std::size_t{1} << n;
  Vector permuted(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    std::size_t j = 0;
    for (int k = 0; k < n; ++k) {
      const std::size_t bit = (i >> (n - 1 - order[static_cast<std::size_t>(k)])) & 1u;
      j = (j << 1) | bit;
    }
    permuted[static_cast<Eigen::Index>(j)] = psi[static_cast<Eigen::Index>(i)];
  }
  const Eigen::Index a = Eigen::Index{1} << keep.size();
  const Eigen::Index b = static_cast<Eigen::Index>(dim) / a;
  Matrix out = Matrix::Zero(a, a);
  for (Eigen::Index r = 0; r < a; ++r)
    for (Eigen::Index c = 0; c < a; ++c)
      for (Eigen::Index k = 0; k < b; ++k) out(r, c) += permuted[r * b + k] * std::conj(permuted[c * b + k]);
  return out;
}

DensityMatrix random_mixed(std::size_t dim, int rank, std::mt19937_64& rng) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (int k = 0; k < rank; ++k) {
    const Vector v = random_unit_vector(dim, rng);
    m += u(rng) * v * v.adjoint();
  }
  return DensityMatrix(m / m.trace().real());
}

}  // namespace

TEST(lattice, site_zero_is_most_significant) {
  const auto l = chain(3);
  EXPECT_EQ(l.stride(0), 4u);
  EXPECT_EQ(l.digit(0b100, 0), 1);
  EXPECT_EQ(l.digit(0b100, 2), 0);
}

TEST(lattice, site_set_rejects_duplicates_and_out_of_range) {
  const auto l = chain(4);
  EXPECT_THROW(SiteSet(l, {1, 1}), StructuralError);
  EXPECT_THROW(SiteSet(l, {4}), StructuralError);
  EXPECT_EQ(SiteSet(l, {2, 0}).sites(), (std::vector<int>{0, 2}));
  EXPECT_EQ(SiteSet(l, {0, 2}).complement().sites(), (std::vector<int>{1, 3}));
}

TEST(lattice, rejects_single_site) { EXPECT_THROW(chain(1).validate(), std::exception); }

TEST(partial_trace, product_reduction) {
  const auto l = chain(2);
  const auto psi = basis_state(l, {0, 0});
  const auto rho = partial_trace(psi, SiteSet(l, {0}));
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 1;
  EXPECT_LT((rho.matrix() - expected).norm(), 1e-14);
}

TEST(partial_trace, bell_pair_marginal_is_maximally_mixed) {
  const auto l = chain(2);
  const auto omega = maximally_entangled(l, SiteSet(l, {0}));
  const auto rho = partial_trace(omega, SiteSet(l, {0}));
  EXPECT_LT((rho.matrix() - Matrix::Identity(2, 2) / 2.0).norm(), 1e-14);
}

TEST(partial_trace, non_contiguous_matches_permutation_oracle) {
  const auto l = chain(4);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto psi = random_state(l, seed);
    const auto rho = partial_trace(psi, SiteSet(l, {0, 2}));
    EXPECT_LT((rho.matrix() - permutation_oracle(psi.amplitudes, 4, {0, 2})).norm(), 1e-12);
  }
  const auto l5 = chain(5);
  const auto psi = random_state(l5, 99);
  EXPECT_LT((partial_trace(psi, SiteSet(l5, {1, 3, 4})).matrix() - permutation_oracle(psi.amplitudes, 5, {1, 3, 4})).norm(),
            1e-12);
}

TEST(partial_trace, dense_route_matches_pure_route) {
  const auto l = chain(4);
  const auto psi = random_state(l, 3);
  const SiteSet keep(l, {1, 3});
  const auto a = partial_trace(psi, keep);
  const auto b = partial_trace(DensityMatrix::from_pure(psi), l, keep);
  EXPECT_LT((a.matrix() - b.matrix()).norm(), 1e-12);
}

TEST(partial_trace, dimension_mismatch_is_structural) {
  const auto l = chain(3);
  EXPECT_THROW(amplitude_matrix(Vector::Zero(4), l, SiteSet(l, {0})), StructuralError);
  EXPECT_THROW(partial_trace(DensityMatrix::maximally_mixed(4), l, SiteSet(l, {0})), StructuralError);
}

TEST(partial_trace, linear_and_trace_preserving) {
  const auto l = chain(3);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::uint64_t> mask(1, 6);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto r1 = random_mixed(8, 3, rng);
    const auto r2 = random_mixed(8, 2, rng);
    const double w = u(rng);
    const DensityMatrix mix(w * r1.matrix() + (1 - w) * r2.matrix());
    const auto keep = SiteSet::from_mask(l, mask(rng));
    const auto lhs = partial_trace(mix, l, keep);
    const Matrix rhs = w * partial_trace(r1, l, keep).matrix() + (1 - w) * partial_trace(r2, l, keep).matrix();
    ASSERT_LT((lhs.matrix() - rhs).cwiseAbs().maxCoeff(), kTol.structural);
    ASSERT_NEAR(lhs.matrix().trace().real(), 1.0, kTol.structural);
  }
}

TEST(partial_trace, nested_traces_compose) {
  const auto l = chain(5);
  const auto psi = random_state(l, 21);
  const SiteSet a(l, {0, 2, 3});
  const SiteSet b(l, {2, 3});
  const auto rho_a = partial_trace(psi, a);
  const auto la = chain(3);
  const auto direct = partial_trace(psi, b);
  const auto nested = partial_trace(rho_a, la, b.relative_to(a));
  EXPECT_LT((direct.matrix() - nested.matrix()).norm(), 1e-12);
}

TEST(partial_trace, schmidt_symmetry) {
  const auto l = chain(5);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto psi = random_state(l, seed);
    const auto keep = SiteSet::from_mask(l, 1 + seed % 30);
    RealVector qa = spectrum(partial_trace(psi, keep));
    RealVector qb = spectrum(partial_trace(psi, keep.complement()));
    std::sort(qa.begin(), qa.end(), std::greater<>());
    std::sort(qb.begin(), qb.end(), std::greater<>());
    const auto k = std::min(qa.size(), qb.size());
    ASSERT_LT((qa.head(k) - qb.head(k)).cwiseAbs().maxCoeff(), 1e-9);
    if (qa.size() > k) ASSERT_LT(qa.tail(qa.size() - k).cwiseAbs().maxCoeff(), 1e-9);
    if (qb.size() > k) ASSERT_LT(qb.tail(qb.size() - k).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(overlap, self_and_orthogonal) {
  const auto l = chain(3);
  const auto psi = random_state(l, 1);
  EXPECT_NEAR(std::abs(overlap(psi, psi)), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(overlap(basis_state(l, {0, 1, 0}), basis_state(l, {1, 1, 0}))), 0.0, 1e-15);
  EXPECT_THROW(overlap(psi, random_state(chain(4), 1)), StructuralError);
}

TEST(overlap, product_with_maximally_entangled_is_bounded) {
  const auto l = chain(4);
  const SiteSet a(l, {0, 1});
  const auto omega = maximally_entangled(l, a);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const double o = std::norm(overlap(random_product_state(l, seed), omega));
    ASSERT_LE(o, std::exp(-2 * std::log(2.0)) + 1e-12);
  }
}

TEST(fidelity, identity_and_pure_overlap) {
  std::mt19937_64 rng(5);
  const auto rho = random_mixed(8, 4, rng);
  EXPECT_NEAR(fidelity(rho, rho), 1.0, 1e-9);
  const auto l = chain(3);
  const auto a = random_state(l, 1);
  const auto b = random_state(l, 2);
  EXPECT_NEAR(fidelity(DensityMatrix::from_pure(a), DensityMatrix::from_pure(b)), std::abs(overlap(a, b)), 1e-7);
}

TEST(fidelity, symmetric_and_monotone_under_partial_trace) {
  const auto l = chain(3);
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto r = random_mixed(8, 3, rng);
    const auto s = random_mixed(8, 3, rng);
    const double f = fidelity(r, s);
    ASSERT_NEAR(f, fidelity(s, r), 1e-10);
    const SiteSet keep(l, {0, 2});
    ASSERT_LE(f, fidelity(partial_trace(r, l, keep), partial_trace(s, l, keep)) + 1e-10);
  }
}

TEST(trace_distance, trivial_values) {
  const auto l = chain(2);
  const auto a = DensityMatrix::from_pure(basis_state(l, {0, 0}));
  const auto b = DensityMatrix::from_pure(basis_state(l, {0, 1}));
  EXPECT_NEAR(trace_distance(a, a), 0.0, 1e-14);
  EXPECT_NEAR(trace_distance(a, b), 2.0, 1e-14);
}

TEST(trace_distance, dominates_sampled_observable_gaps) {
  std::mt19937_64 rng(17);
  const auto r = random_mixed(4, 2, rng);
  const auto s = random_mixed(4, 3, rng);
  const double d = trace_distance(r, s);
  std::normal_distribution<double> g;
  double best = 0;
  for (int k = 0; k < 500; ++k) {
    Matrix a(4, 4);
    for (auto& x : a.reshaped()) x = Complex(g(rng), g(rng));
    a = 0.5 * (a + a.adjoint()).eval();
    a /= hermitian_norm(a);
    best = std::max(best, std::abs((r.matrix() * a).trace().real() - (s.matrix() * a).trace().real()));
  }
  EXPECT_LE(best, d + 1e-12);
  EXPECT_GT(best, 0.5 * d);
  // Sign projector attains the maximum.
  Eigen::SelfAdjointEigenSolver<Matrix> es(r.matrix() - s.matrix());
  const RealVector sign = es.eigenvalues().unaryExpr([](double v) { return v >= 0 ? 1.0 : -1.0; });
  const Matrix p = es.eigenvectors() * sign.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  EXPECT_NEAR(((r.matrix() - s.matrix()) * p).trace().real(), d, 1e-12);
}

TEST(density_matrix, validates_and_clamps) {
  Matrix bad = Matrix::Identity(2, 2);
  EXPECT_THROW(DensityMatrix{bad}, NumericalError);
  Matrix nonherm = Matrix::Identity(2, 2) / 2.0;
  nonherm(0, 1) = 0.3;
  EXPECT_THROW(DensityMatrix{nonherm}, NumericalError);
  RealVector q(3);
  q << 0.5, 0.5 + 5e-11, -5e-11;
  EXPECT_GE(clamp_spectrum(q).minCoeff(), 0.0);
  q << 0.6, 0.6, -0.2;
  EXPECT_THROW(clamp_spectrum(q), NumericalError);
}

TEST(builders, maximally_entangled_entropy) {
  const auto l2 = chain(2);
  const SiteSet a2(l2, {0});
  EXPECT_NEAR(renyi_entropy(partial_trace(maximally_entangled(l2, a2), a2), 2.0), std::log(2.0), 1e-12);
  const auto l6 = chain(6);
  const SiteSet a(l6, {0, 2, 4});
  EXPECT_NEAR(renyi_entropy(partial_trace(maximally_entangled(l6, a), a), RenyiOrder::infinity()), std::log(8.0), 1e-12);
  EXPECT_THROW(maximally_entangled(l6, SiteSet(l6, {0, 1, 2, 3})), UnsupportedError);
}

TEST(builders, random_product_has_no_entanglement) {
  const auto l = chain(5);
  const auto psi = random_product_state(l, 4);
  for (std::uint64_t mask = 1; mask < 31; ++mask)
    ASSERT_NEAR(renyi_entropy(partial_trace(psi, SiteSet::from_mask(l, mask)), 2.0), 0.0, 1e-10);
}

TEST(builders, tensor_product_orders_first_factor_high) {
  const auto a = basis_state(chain(2), {1, 0});
  const auto b = basis_state(chain(2), {0, 1});
  const auto ab = tensor_product(a, b);
  EXPECT_EQ(ab.lattice.num_sites, 4);
  EXPECT_NEAR(std::abs(ab.amplitudes[0b1001]), 1.0, 1e-15);
}

TEST(state, normalization_is_enforced) {
  const auto l = chain(2);
  EXPECT_THROW(PureState(l, Vector::Ones(4)), NumericalError);
  EXPECT_THROW(PureState(l, Vector::Ones(3)), StructuralError);
  EXPECT_THROW(PureState::normalized(l, Vector::Zero(4)), NumericalError);
}
