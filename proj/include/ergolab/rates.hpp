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

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "ergolab/ergodicity.hpp"
#include "ergolab/hamiltonian.hpp"
#include "ergolab/state.hpp"

namespace ergolab {

/// Hermitian basis of d x d matrices, every element of operator norm 1:
/// the identity, E_jk + E_kj and -i(E_jk - E_kj) for j < k, and
/// diag(1, ..., 1, -l, 0, ...) / l for l = 1 .. d-1. The elements are
/// Hilbert-Schmidt orthogonal but not orthonormal; tr(P^2) is d for the
/// identity, 2 for the off-diagonal ones and (l + 1) / l for the diagonal
/// ones. For d = 2 this is I, X, Y, Z.
inline std::vector<Matrix> hermitian_basis(int d) {
  if (d < 1) throw std::invalid_argument("local dimension must be positive");
  std::vector<Matrix> out;
  out.push_back(Matrix::Identity(d, d));
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      Matrix s = Matrix::Zero(d, d);
      s(j, k) = s(k, j) = 1;
      out.push_back(s);
      Matrix a = Matrix::Zero(d, d);
      a(j, k) = -kI;
      a(k, j) = kI;
      out.push_back(a);
    }
  for (int l = 1; l < d; ++l) {
    Matrix z = Matrix::Zero(d, d);
    for (int m = 0; m < l; ++m) z(m, m) = 1.0 / l;
    z(l, l) = -1;
    out.push_back(z);
  }
  return out;
}

/// All n-fold tensor products of hermitian_basis(d), first factor most
/// significant.
inline std::vector<Matrix> product_basis(int n, int d) {
  const auto single = hermitian_basis(d);
  std::vector<Matrix> out{Matrix::Identity(1, 1)};
  for (int k = 0; k < n; ++k) {
    std::vector<Matrix> next;
    next.reserve(out.size() * single.size());
    for (const auto& p : out)
      for (const auto& s : single) next.push_back(kron(p, s));
    out = std::move(next);
  }
  return out;
}

struct InteractionTerm {
  double coefficient = 0;
  std::size_t index_a = 0;
  std::size_t index_b = 0;
  Matrix a;
  Matrix b;
};

/// V = sum_ij c_ij A_i (x) B_j with ||A_i|| = ||B_j|| = 1.
struct InteractionDecomposition {
  int sites_a = 0;
  int sites_b = 0;
  int local_dim = 2;
  std::vector<InteractionTerm> terms;
  double l1_norm = 0;
  /// Largest |Im c_ij| seen before discarding imaginary parts.
  double max_imaginary = 0;

  Matrix reconstruct() const {
    const auto da = static_cast<Eigen::Index>(checked_pow(static_cast<std::size_t>(local_dim), static_cast<std::size_t>(sites_a)));
    const auto db = static_cast<Eigen::Index>(checked_pow(static_cast<std::size_t>(local_dim), static_cast<std::size_t>(sites_b)));
    Matrix v = Matrix::Zero(da * db, da * db);
    for (const auto& t : terms) v += t.coefficient * kron(t.a, t.b);
    return v;
  }
};

/// Expands a Hermitian V on (A, B), A the more significant factor, in the
/// product basis. Coefficients below 1e-14 are dropped.
inline InteractionDecomposition decompose_interaction(const Matrix& v, int sites_a, int sites_b, int d = 2) {
  const auto da = static_cast<Eigen::Index>(checked_pow(static_cast<std::size_t>(d), static_cast<std::size_t>(sites_a)));
  const auto db = static_cast<Eigen::Index>(checked_pow(static_cast<std::size_t>(d), static_cast<std::size_t>(sites_b)));
  if (v.rows() != da * db || v.cols() != da * db) throw StructuralError("interaction dimension does not match the cut");
  if (!is_hermitian(v, kTol.structural)) throw std::invalid_argument("interaction is not Hermitian");
  InteractionDecomposition out;
  out.sites_a = sites_a;
  out.sites_b = sites_b;
  out.local_dim = d;
  const auto basis_a = product_basis(sites_a, d);
  const auto basis_b = product_basis(sites_b, d);
  for (std::size_t j = 0; j < basis_b.size(); ++j) {
    const Matrix& b = basis_b[j];
    // m(x, x') = sum_{y, y'} V(x y, x' y') B(y', y)
    Matrix m = Matrix::Zero(da, da);
    for (Eigen::Index x = 0; x < da; ++x)
      for (Eigen::Index xp = 0; xp < da; ++xp) {
        Complex acc = 0;
        for (Eigen::Index y = 0; y < db; ++y)
          for (Eigen::Index yp = 0; yp < db; ++yp) acc += v(x * db + y, xp * db + yp) * b(yp, y);
        m(x, xp) = acc;
      }
    const double norm_b = (b * b).trace().real();
    for (std::size_t i = 0; i < basis_a.size(); ++i) {
      const Matrix& a = basis_a[i];
      const Complex c = (a * m).trace() / ((a * a).trace().real() * norm_b);
      out.max_imaginary = std::max(out.max_imaginary, std::abs(c.imag()));
      if (std::abs(c.real()) <= 1e-14) continue;
      out.terms.push_back(InteractionTerm{c.real(), i, j, a, b});
      out.l1_norm += std::abs(c.real());
    }
  }
  if (out.max_imaginary > kTol.structural) throw NumericalError("complex coefficient in a Hermitian expansion");
  return out;
}

/// Permutes a full-lattice operator into (A, A^c) ordering.
inline Matrix reorder_for_cut(const Matrix& op, const LatticeSpec& lattice, const SiteSet& a) {
  IndexSplit split(lattice, a);
  const std::size_t dim = lattice.hilbert_dim();
  std::vector<Eigen::Index> to(dim);
  for (std::size_t i = 0; i < dim; ++i) to[i] = static_cast<Eigen::Index>(split.keep(i) * split.rest_dim() + split.rest(i));
  Matrix out(op.rows(), op.cols());
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) out(to[i], to[j]) = op(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return out;
}

/// Operator acting as `op` on `support` and trivially elsewhere.
inline Matrix embed_operator(const Matrix& op, const SiteSet& support) {
  const LatticeSpec& l = support.lattice();
  IndexSplit split(l, support);
  const auto n = static_cast<Eigen::Index>(l.hilbert_dim());
  std::vector<std::vector<Eigen::Index>> groups(split.rest_dim(), std::vector<Eigen::Index>(split.keep_dim()));
  for (std::size_t i = 0; i < l.hilbert_dim(); ++i) groups[split.rest(i)][split.keep(i)] = static_cast<Eigen::Index>(i);
  Matrix out = Matrix::Zero(n, n);
  for (const auto& g : groups)
    for (std::size_t x = 0; x < g.size(); ++x)
      for (std::size_t y = 0; y < g.size(); ++y) out(g[x], g[y]) = op(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
  return out;
}

/// Decomposes a local term across the cut (support ∩ A | support \ A).
inline InteractionDecomposition decompose_term(const LocalTerm& t, const SiteSet& a) {
  const LatticeSpec& l = t.support.lattice();
  const LatticeSpec small = chain(std::max(2, static_cast<int>(t.support.size())), l.local_dim);
  std::vector<int> inside;
  for (std::size_t k = 0; k < t.support.size(); ++k)
    if (a.contains(t.support.sites()[k])) inside.push_back(static_cast<int>(k));
  Matrix op = t.op;
  if (t.support.size() == 1) op = kron(t.op, Matrix::Identity(l.local_dim, l.local_dim));
  const Matrix ordered = reorder_for_cut(op, small, SiteSet(small, inside));
  const int na = static_cast<int>(inside.size());
  return decompose_interaction(ordered, na, small.num_sites - na, l.local_dim);
}

namespace detail {

inline double rate_from_commutator_trace(const Matrix& rho_a, const Matrix& tr_b_comm) {
  const double purity = rho_a.squaredNorm();
  if (!(purity > 1e-12)) throw NumericalError("marginal purity underflow");
  const Complex g = 2.0 * kI * (rho_a * tr_b_comm).trace() / purity;
  if (std::abs(g.imag()) > kTol.structural * std::max(1.0, std::abs(g.real())))
    throw NumericalError("entangling rate has an imaginary part");
  return g.real();
}

}  // namespace detail

/// Renyi-2 entangling rate 2i tr(rho_A tr_B[V, rho]) / tr(rho_A^2) for a
/// full-lattice V.
inline double entangling_rate(const DensityMatrix& rho, const SiteSet& a, const Matrix& v) {
  const LatticeSpec& l = a.lattice();
  if (rho.dim() != l.hilbert_dim() || static_cast<std::size_t>(v.rows()) != l.hilbert_dim())
    throw StructuralError("entangling_rate: dimensions do not match the lattice");
  const Matrix comm = v * rho.matrix() - rho.matrix() * v;
  const Matrix rho_a = partial_trace_operator(rho.matrix(), l, a);
  return detail::rate_from_commutator_trace(rho_a, partial_trace_operator(comm, l, a));
}

/// Pure-state route for a V given on `support`, without dense operators.
inline double entangling_rate(const PureState& psi, const SiteSet& a, const Matrix& v_local, const SiteSet& support) {
  const Matrix m = amplitude_matrix(psi.amplitudes, psi.lattice, a);
  const Matrix mv = amplitude_matrix(apply_local(v_local, support, psi.amplitudes), psi.lattice, a);
  const Matrix x = mv * m.adjoint();
  return detail::rate_from_commutator_trace(m * m.adjoint(), x - x.adjoint());
}

/// Rho evolved for time t under V.
inline Matrix evolve_density(const Matrix& rho, const Eigen::SelfAdjointEigenSolver<Matrix>& v_eig, double t) {
  const Vector phase = (-kI * t * v_eig.eigenvalues().cast<Complex>()).array().exp().matrix();
  const Matrix u = v_eig.eigenvectors() * phase.asDiagonal() * v_eig.eigenvectors().adjoint();
  return u * rho * u.adjoint();
}

/// Gaussian Hermitian matrix (GUE up to scale).
inline Matrix random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return 0.5 * (m + m.adjoint());
}

/// Density matrix W W^dagger / tr with W of uniformly random rank 1..n.
inline DensityMatrix random_density(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const int rank = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n));
  Matrix m(n, rank);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rank; ++j) m(i, j) = Complex(g(rng), g(rng));
  const Matrix r = m * m.adjoint();
  return DensityMatrix(r / r.trace().real());
}

struct RateComparison {
  double analytic = 0;
  double central = 0;
  double richardson = 0;
  double finite_difference = 0;
  bool used_richardson = false;
  double marginal_purity = 0;
  double relative_error = 0;
};

/// Compares the analytic rate with the centred difference of S_2(rho_A(t))
/// at step h. Richardson extrapolation of the h and h/2 differences replaces
/// it when the marginal purity is below `richardson_purity` or when the two
/// differences disagree by more than 1e-8 of the scale. The relative error
/// uses max(|rate|, 1e-4) as the scale.
inline RateComparison compare_with_finite_difference(const DensityMatrix& rho, const SiteSet& a, const Matrix& v,
                                                     double h = 1e-5, double richardson_purity = 1e-2) {
  const LatticeSpec& l = a.lattice();
  Eigen::SelfAdjointEigenSolver<Matrix> es(v);
  const auto s2_at = [&](double t) {
    return -std::log(partial_trace_operator(evolve_density(rho.matrix(), es, t), l, a).squaredNorm());
  };
  RateComparison r;
  r.analytic = entangling_rate(rho, a, v);
  r.marginal_purity = partial_trace_operator(rho.matrix(), l, a).squaredNorm();
  r.central = (s2_at(h) - s2_at(-h)) / (2 * h);
  const double half = (s2_at(h / 2) - s2_at(-h / 2)) / h;
  r.richardson = (4 * half - r.central) / 3;
  const double scale = std::max(std::abs(r.central), 1e-4);
  r.used_richardson = r.marginal_purity < richardson_purity || std::abs(half - r.central) > 1e-8 * scale;
  r.finite_difference = r.used_richardson ? r.richardson : r.central;
  r.relative_error = std::abs(r.analytic - r.finite_difference) / std::max(std::abs(r.analytic), 1e-4);
  return r;
}

struct RateBoundReport {
  double rate = 0;
  double l1_norm = 0;
  double bound = 0;
  double ratio = 0;
  bool ok = true;
};

/// |rate| <= 4 ||C||_1 with V decomposed across (A, A^c).
inline RateBoundReport check_rate_bound(const DensityMatrix& rho, const SiteSet& a, const Matrix& v) {
  const LatticeSpec& l = a.lattice();
  RateBoundReport r;
  r.rate = entangling_rate(rho, a, v);
  const auto dec = decompose_interaction(reorder_for_cut(v, l, a), static_cast<int>(a.size()),
                                         l.num_sites - static_cast<int>(a.size()), l.local_dim);
  r.l1_norm = dec.l1_norm;
  r.bound = 4 * r.l1_norm;
  r.ratio = r.bound > 0 ? std::abs(r.rate) / r.bound : (std::abs(r.rate) > 0 ? INFINITY : 0.0);
  r.ok = std::abs(r.rate) <= r.bound * (1 + 1e-10) + 1e-12;
  return r;
}

struct BoundaryRateReport {
  double decomposed = 0;
  double direct = 0;
  double difference = 0;
  std::vector<std::size_t> straddling;
  std::vector<double> term_rates;
  std::vector<double> term_l1;
  double max_term_l1 = 0;
  /// 4 |dA| max_x ||C_x||_1.
  double boundary_bound = 0;
  bool agree = true;
  bool bound_ok = true;
};

/// Sum of per-term rates over terms straddling A, against the rate of the
/// full Hamiltonian.
inline BoundaryRateReport boundary_rate(const PureState& psi, const SiteSet& a, const LocalHamiltonian& h,
                                        double tol = 1e-8) {
  BoundaryRateReport r;
  r.straddling = h.straddling(a);
  for (std::size_t k : r.straddling) {
    const auto& t = h.terms[k];
    r.term_rates.push_back(entangling_rate(psi, a, t.op, t.support));
    r.decomposed += r.term_rates.back();
    r.term_l1.push_back(decompose_term(t, a).l1_norm);
    r.max_term_l1 = std::max(r.max_term_l1, r.term_l1.back());
  }
  r.direct = entangling_rate(DensityMatrix::from_pure(psi), a, assemble(h));
  r.difference = std::abs(r.decomposed - r.direct);
  r.agree = r.difference <= tol;
  r.boundary_bound = 4.0 * static_cast<double>(r.straddling.size()) * r.max_term_l1;
  r.bound_ok = std::abs(r.direct) <= r.boundary_bound * (1 + 1e-10) + 1e-12;
  return r;
}

struct IntegratedBoundReport {
  std::vector<double> times;
  std::vector<double> s2;
  std::vector<double> bound;
  std::size_t boundary_terms = 0;
  double max_term_l1 = 0;
  /// Largest |S_2(t) - S_2(0)| / bound(t) over t > 0.
  double worst_ratio = 0;
  std::size_t violations = 0;
  bool ok = true;
};

/// |S_2(rho_A(t)) - S_2(rho_A(0))| <= 4 t |dA| max_x ||C_x||_1 on a time grid.
inline IntegratedBoundReport integrated_bound_check(const PureState& psi0, const LocalHamiltonian& h, const SpectralData& s,
                                                    const SiteSet& a, const std::vector<double>& t_grid) {
  IntegratedBoundReport r;
  const auto straddling = h.straddling(a);
  r.boundary_terms = straddling.size();
  for (std::size_t k : straddling) r.max_term_l1 = std::max(r.max_term_l1, decompose_term(h.terms[k], a).l1_norm);
  const double s0 = marginal_renyi2(psi0.amplitudes, psi0.lattice, a);
  for (double t : t_grid) {
    if (!std::isfinite(t)) throw std::invalid_argument("time grid must be finite");
    const double st = marginal_renyi2(evolve(psi0, s, t).amplitudes, psi0.lattice, a);
    const double b = 4.0 * std::abs(t) * static_cast<double>(r.boundary_terms) * r.max_term_l1;
    r.times.push_back(t);
    r.s2.push_back(st);
    r.bound.push_back(b);
    const double change = std::abs(st - s0);
    if (b > 0) r.worst_ratio = std::max(r.worst_ratio, change / b);
    if (change > b + 1e-9) ++r.violations;
  }
  r.ok = r.violations == 0;
  return r;
}

inline IntegratedBoundReport integrated_bound_check(const PureState& psi0, const LocalHamiltonian& h, const SiteSet& a,
                                                    const std::vector<double>& t_grid) {
  return integrated_bound_check(psi0, h, diagonalize(h), a, t_grid);
}

/// exp(-i H' t) with a strictly local generator of term norms at most 1.
struct QuasiLocalUnitary {
  LocalHamiltonian generator;
  double time = 0;

  void validate() const {
    generator.validate();
    for (const auto& t : generator.terms)
      if (t.norm > 1 + 1e-12) throw std::invalid_argument("generator terms must have norm at most 1");
    if (!(std::isfinite(time) && time >= 0)) throw std::invalid_argument("time must be finite and non-negative");
  }

  Matrix dense() const {
    validate();
    const Matrix h = assemble(generator);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const Vector phase = (-kI * time * es.eigenvalues().cast<Complex>()).array().exp().matrix();
    return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
  }

  static QuasiLocalUnitary identity(const LatticeSpec& lattice) {
    QuasiLocalUnitary u;
    u.generator.lattice = lattice;
    u.generator.model = "identity";
    return u;
  }

  /// One layer of random two-site terms of norm 1 on bonds (0,1), (2,3), ...
  static QuasiLocalUnitary single_layer(const LatticeSpec& lattice, double time, std::uint64_t seed) {
    QuasiLocalUnitary u;
    u.time = time;
    u.generator.lattice = lattice;
    u.generator.model = "single-layer";
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    const int d2 = lattice.local_dim * lattice.local_dim;
    for (int x = 0; x + 1 < lattice.num_sites; x += 2) {
      Matrix m(d2, d2);
      for (int i = 0; i < d2; ++i)
        for (int j = 0; j < d2; ++j) m(i, j) = Complex(g(rng), g(rng));
      Matrix herm = 0.5 * (m + m.adjoint());
      herm /= hermitian_norm(herm);
      u.generator.terms.push_back(two_site_term(lattice, x, x + 1, herm));
    }
    u.validate();
    return u;
  }
};

struct StabilityReport {
  std::size_t states = 0;
  std::size_t candidates = 0;
  double time = 0;
  double max_term_l1 = 0;
  std::size_t max_boundary = 0;
  double max_shift = 0;
  /// Largest |shift| / bound over states and subsystems with bound > 0.
  double worst_ratio = 0;
  std::size_t violations = 0;
  std::vector<double> knots_before;
  std::vector<double> knots_after;
  /// min_j (g_after - g_before) at the knots.
  double envelope_shift = 0;
  /// 4 T max|dA| max ||C_x||_1 / N.
  double envelope_allowance = 0;
  bool envelope_ok = true;
  std::string note;
  bool ok = true;
};

/// Conjugates the eigenbasis by U' and compares S_2 on every contiguous
/// candidate subsystem, state by state, against 4 T |dA| max ||C_x||_1.
inline StabilityReport stability_experiment(const SpectralData& s, const QuasiLocalUnitary& u,
                                            const SubsystemSearchPolicy& policy, std::size_t bins = 20) {
  if (policy.mode != SearchMode::Contiguous && policy.mode != SearchMode::HalfCutOnly)
    throw std::invalid_argument("stability_experiment needs a contiguous subsystem policy");
  if (!(u.generator.lattice == s.lattice)) throw StructuralError("unitary acts on a different lattice");
  const LatticeSpec& l = s.lattice;
  const auto candidates = candidate_subsystems(l, policy);
  SubsystemScanner scanner(l, candidates);
  StabilityReport r;
  r.states = s.dim();
  r.candidates = candidates.size();
  r.time = u.time;
  r.note = "finite-size surrogate: per-state bound at fixed N, no asymptotic surface-to-volume claim";

  std::vector<double> bound(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto straddling = u.generator.straddling(candidates[k]);
    double c = 0;
    for (std::size_t t : straddling) c = std::max(c, decompose_term(u.generator.terms[t], candidates[k]).l1_norm);
    r.max_term_l1 = std::max(r.max_term_l1, c);
    r.max_boundary = std::max(r.max_boundary, straddling.size());
    bound[k] = 4.0 * u.time * static_cast<double>(straddling.size()) * c;
  }
  const Matrix rotated = u.dense() * s.vectors;

  const double n = l.num_sites;
  ErgodicityProfile before, after;
  for (auto* p : {&before, &after}) {
    p->lattice = l;
    p->policy = policy;
    p->e_max = s.e_max;
    p->records.resize(s.dim());
  }
  std::vector<double> max_shift(s.dim(), 0.0), worst(s.dim(), 0.0);
  std::vector<std::size_t> bad(s.dim(), 0);
  parallel_for(s.dim(), [&](std::size_t i) {
    const auto c = static_cast<Eigen::Index>(i);
    const Vector v0 = s.vectors.col(c);
    const Vector v1 = rotated.col(c);
    Vector buffer;
    double best0 = -1, best1 = -1;
    std::size_t arg0 = 0, arg1 = 0;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      const double a = scanner.s2(v0, k, buffer);
      const double b = scanner.s2(v1, k, buffer);
      if (a > best0) best0 = a, arg0 = k;
      if (b > best1) best1 = b, arg1 = k;
      const double shift = std::abs(b - a);
      max_shift[i] = std::max(max_shift[i], shift);
      if (bound[k] > 0) worst[i] = std::max(worst[i], shift / bound[k]);
      if (shift > bound[k] + 1e-10) ++bad[i];
    }
    before.records[i] = EigenstateRecord{i, s.densities[c], candidates[arg0], best0, best0 / n};
    after.records[i] = EigenstateRecord{i, s.densities[c], candidates[arg1], best1, best1 / n};
  });
  for (std::size_t i = 0; i < s.dim(); ++i) {
    r.max_shift = std::max(r.max_shift, max_shift[i]);
    r.worst_ratio = std::max(r.worst_ratio, worst[i]);
    r.violations += bad[i];
  }
  fit_envelope(before, bins);
  fit_envelope(after, bins);
  r.knots_before = before.knots;
  r.knots_after = after.knots;
  r.envelope_allowance = 4.0 * u.time * static_cast<double>(r.max_boundary) * r.max_term_l1 / n;
  r.envelope_shift = INFINITY;
  for (std::size_t j = 0; j < r.knots_before.size(); ++j) {
    r.envelope_shift = std::min(r.envelope_shift, r.knots_after[j] - r.knots_before[j]);
    if (r.knots_after[j] < r.knots_before[j] - r.envelope_allowance - 1e-12) r.envelope_ok = false;
  }
  r.ok = r.violations == 0 && r.envelope_ok;
  return r;
}

}  // namespace ergolab
