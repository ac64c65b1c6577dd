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

// Strictly local lattice Hamiltonians: catalog, dense assembly, full
// spectral decomposition, gap diagnostics and Gibbs-state identities.

#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ergolab/core.hpp"
#include "ergolab/eigensolver.hpp"
#include "ergolab/entropy.hpp"
#include "ergolab/lattice.hpp"
#include "ergolab/state.hpp"

namespace ergolab {

namespace pauli {
inline Matrix I() { return Matrix::Identity(2, 2); }
inline Matrix X() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline Matrix Y() {
  Matrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}
inline Matrix Z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
inline Matrix by_axis(char axis) {
  switch (axis) {
    case 'X': case 'x': return X();
    case 'Y': case 'y': return Y();
    case 'Z': case 'z': return Z();
    case 'I': case 'i': return I();
    default: throw std::invalid_argument(std::string("unknown Pauli axis ") + axis);
  }
}
}  // namespace pauli

/// Two-site swap on local dimension d.
inline Matrix swap_gate(int d) {
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  Matrix s = Matrix::Zero(n, n);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) s(a * d + b, b * d + a) = 1.0;
  return s;
}

/// Hermitian operator on a small support, acting on the support's sites in
/// ascending order.
struct LocalTerm {
  SiteSet support;
  Matrix op;
  double norm = 0;
};

/// Builds a LocalTerm from an operator written for sites (a, b) in that order.
inline LocalTerm two_site_term(const LatticeSpec& lattice, int a, int b, const Matrix& op_ab) {
  LocalTerm t;
  t.support = SiteSet(lattice, {a, b});
  if (a < b) {
    t.op = op_ab;
  } else {
    const Matrix s = swap_gate(lattice.local_dim);
    t.op = s * op_ab * s;
  }
  t.norm = hermitian_norm(t.op);
  return t;
}

inline LocalTerm one_site_term(const LatticeSpec& lattice, int x, const Matrix& op) {
  return LocalTerm{SiteSet(lattice, {x}), op, hermitian_norm(op)};
}

enum class ModelName { MixedFieldIsing, XXZDisordered, HeisenbergRandomField };

inline std::string to_string(ModelName m) {
  switch (m) {
    case ModelName::MixedFieldIsing: return "mixed-field-ising";
    case ModelName::XXZDisordered: return "xxz-disordered";
    case ModelName::HeisenbergRandomField: return "heisenberg-random-field";
  }
  return "unknown";
}

inline ModelName model_from_string(const std::string& s) {
  if (s == "mixed-field-ising") return ModelName::MixedFieldIsing;
  if (s == "xxz-disordered") return ModelName::XXZDisordered;
  if (s == "heisenberg-random-field") return ModelName::HeisenbergRandomField;
  throw std::invalid_argument("unknown model '" + s + "'");
}

/// Catalog parameters, all in units of the Pauli matrices.
///  mixed-field-ising:       sum J Z Z + sum (hx X + hz Z)
///  xxz-disordered:          sum J (X X + Y Y + delta Z Z) + sum w_x Z, w_x ~ U[-W, W]
///  heisenberg-random-field: sum J (X X + Y Y + Z Z) + sum (u_x X + w_x Z), u, w ~ U[-W, W]
/// Documented ranges: |J|, |hx|, |hz|, |delta| <= 10 and 0 <= W <= 10.
struct ModelParams {
  double J = 1.0;
  double hx = 0.9045;
  double hz = 0.8090;
  double delta = 0.5;
  double disorder = 1.0;
  /// Rescale every term so the largest term norm is exactly 1.
  bool normalize = true;

  void validate() const {
    for (double v : {J, hx, hz, delta})
      if (!(std::abs(v) <= 10.0)) throw std::invalid_argument("model parameter outside [-10, 10]");
    if (!(disorder >= 0.0 && disorder <= 10.0)) throw std::invalid_argument("disorder strength outside [0, 10]");
  }
};

struct LocalHamiltonian {
  LatticeSpec lattice;
  std::vector<LocalTerm> terms;
  /// Subtracted from the sum of terms so that the ground energy is zero.
  double ground_shift = 0;
  /// Factor the raw catalog couplings were multiplied by.
  double scale = 1.0;
  int locality = 2;
  std::string model = "custom";

  void validate() const {
    lattice.validate();
    for (const auto& t : terms) {
      if (!(t.support.lattice() == lattice)) throw StructuralError("term support on a different lattice");
      if (static_cast<std::size_t>(t.op.rows()) != t.support.dim()) throw StructuralError("term operator dimension mismatch");
      if (!is_hermitian(t.op)) throw NumericalError("local term is not Hermitian");
      int diam = 0;
      for (int a : t.support.sites())
        for (int b : t.support.sites()) diam = std::max(diam, lattice.distance(a, b));
      if (diam + 1 > locality) throw StructuralError("term support exceeds locality bound");
    }
  }

  bool is_real() const {
    for (const auto& t : terms)
      if (!ergolab::is_real(t.op, 1e-15)) return false;
    return true;
  }

  double max_term_norm() const {
    double m = 0;
    for (const auto& t : terms) m = std::max(m, t.norm);
    return m;
  }

  /// (H - ground_shift) |psi>.
  Vector apply(const Vector& psi) const {
    Vector out = -ground_shift * psi;
    for (const auto& t : terms) out += apply_local(t.op, t.support, psi);
    return out;
  }

  /// Indices of terms whose support meets both A and its complement.
  std::vector<std::size_t> straddling(const SiteSet& a) const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      bool in = false, out_ = false;
      for (int x : terms[k].support.sites()) (a.contains(x) ? in : out_) = true;
      if (in && out_) out.push_back(k);
    }
    return out;
  }
};

namespace detail {

/// full[rest][keep] = computational index.
inline std::vector<std::vector<std::size_t>> index_groups(const LatticeSpec& lattice, const SiteSet& support) {
  IndexSplit split(lattice, support);
  std::vector<std::vector<std::size_t>> g(split.rest_dim(), std::vector<std::size_t>(split.keep_dim()));
  for (std::size_t i = 0; i < lattice.hilbert_dim(); ++i) g[split.rest(i)][split.keep(i)] = i;
  return g;
}

template <typename M, typename Op>
void accumulate_term(M& h, const LatticeSpec& lattice, const SiteSet& support, const Op& op) {
  const auto groups = index_groups(lattice, support);
  const auto k = static_cast<Eigen::Index>(support.dim());
  for (const auto& g : groups)
    for (Eigen::Index a = 0; a < k; ++a)
      for (Eigen::Index b = 0; b < k; ++b) {
        const auto v = op(a, b);
        if (v != typename Op::Scalar(0))
          h(static_cast<Eigen::Index>(g[static_cast<std::size_t>(a)]), static_cast<Eigen::Index>(g[static_cast<std::size_t>(b)])) += v;
      }
}

inline void guard_dense(const LatticeSpec& lattice) {
  if (lattice.hilbert_dim() > kTol.dense_dim_guard)
    throw ResourceGuardError("dense dimension " + std::to_string(lattice.hilbert_dim()) + " exceeds guard " +
                             std::to_string(kTol.dense_dim_guard) + "; reduce the number of sites");
}

}  // namespace detail

/// Dense matrix of a real Hamiltonian (all terms real), shift included.
inline RealMatrix assemble_real(const LocalHamiltonian& h) {
  detail::guard_dense(h.lattice);
  if (!h.is_real()) throw UnsupportedError("assemble_real: Hamiltonian has complex terms");
  const auto n = static_cast<Eigen::Index>(h.lattice.hilbert_dim());
  RealMatrix m = RealMatrix::Zero(n, n);
  for (const auto& t : h.terms) detail::accumulate_term(m, h.lattice, t.support, RealMatrix(t.op.real()));
  m.diagonal().array() -= h.ground_shift;
  return m;
}

inline Matrix assemble(const LocalHamiltonian& h) {
  detail::guard_dense(h.lattice);
  const auto n = static_cast<Eigen::Index>(h.lattice.hilbert_dim());
  Matrix m = Matrix::Zero(n, n);
  for (const auto& t : h.terms) detail::accumulate_term(m, h.lattice, t.support, t.op);
  m.diagonal().array() -= h.ground_shift;
  return m;
}

/// Smallest eigenvalue of the sum of terms, before any shift.
inline double raw_ground_energy(const LocalHamiltonian& h) {
  LocalHamiltonian raw = h;
  raw.ground_shift = 0;
  if (raw.is_real()) return symmetric_eigen(assemble_real(raw), false).values[0];
  return hermitian_eigen(assemble(raw), false).values[0];
}

/// Sets ground_shift so the ground energy is zero.
inline void apply_ground_shift(LocalHamiltonian& h) { h.ground_shift = raw_ground_energy(h); }

/// tr(H_raw) / (N d^N), computed from the terms.
inline double trace_per_site(const LocalHamiltonian& h) {
  double t = 0;
  for (const auto& term : h.terms) t += term.op.trace().real() / static_cast<double>(term.support.dim());
  return t / h.lattice.num_sites;
}

/// Builds a catalog model; strictly 2-local and deterministic under `seed`.
inline LocalHamiltonian build_model(ModelName name, const ModelParams& params, const LatticeSpec& lattice,
                                    std::uint64_t seed, bool shift_ground = true) {
  params.validate();
  lattice.validate();
  if (lattice.local_dim != 2) throw UnsupportedError("catalog models are spin-1/2 (local_dim = 2)");
  if (lattice.geometry == Geometry::ChainPeriodic && lattice.num_sites < 3)
    throw UnsupportedError("periodic chains need at least three sites");
  using namespace pauli;
  const int n = lattice.num_sites;
  std::vector<std::pair<int, int>> bonds;
  for (int x = 0; x + 1 < n; ++x) bonds.emplace_back(x, x + 1);
  if (lattice.geometry == Geometry::ChainPeriodic) bonds.emplace_back(n - 1, 0);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-params.disorder, params.disorder);

  LocalHamiltonian h;
  h.lattice = lattice;
  h.model = to_string(name);
  Matrix bond_op;
  switch (name) {
    case ModelName::MixedFieldIsing: bond_op = params.J * kron(Z(), Z()); break;
    case ModelName::XXZDisordered:
      bond_op = params.J * (kron(X(), X()) + kron(Y(), Y()) + params.delta * kron(Z(), Z()));
      break;
    case ModelName::HeisenbergRandomField:
      bond_op = params.J * (kron(X(), X()) + kron(Y(), Y()) + kron(Z(), Z()));
      break;
  }
  for (auto [a, b] : bonds) h.terms.push_back(two_site_term(lattice, a, b, bond_op));
  for (int x = 0; x < n; ++x) {
    Matrix field;
    switch (name) {
      case ModelName::MixedFieldIsing: field = params.hx * X() + params.hz * Z(); break;
      case ModelName::XXZDisordered: field = uni(rng) * Z(); break;
      case ModelName::HeisenbergRandomField: {
        const double u = uni(rng);
        const double w = uni(rng);
        field = u * X() + w * Z();
        break;
      }
    }
    h.terms.push_back(one_site_term(lattice, x, field));
  }
  // Cleanly real storage: the Y Y products above are real but carry -0 imaginary parts.
  for (auto& t : h.terms) t.op = t.op.real().cast<Complex>();
  const double max_norm = h.max_term_norm();
  if (params.normalize && max_norm > 0) {
    h.scale = 1.0 / max_norm;
    for (auto& t : h.terms) {
      t.op *= h.scale;
      t.norm *= h.scale;
    }
  }
  h.validate();
  if (shift_ground) apply_ground_shift(h);
  return h;
}

/// Eigen-decomposition with energies shifted so E_0 = 0 and densities e_i = E_i / N.
struct SpectralData {
  LatticeSpec lattice;
  RealVector energies;
  RealVector densities;
  /// Eigenvectors as columns, first non-negligible component real positive.
  Matrix vectors;
  double e_max = 0;
  /// Total constant subtracted from the raw sum of terms.
  double ground_shift = 0;
  /// Ground energy of the assembled (already shifted) matrix before the final re-zeroing.
  double residual_ground = 0;
  bool real = true;

  std::size_t dim() const { return static_cast<std::size_t>(energies.size()); }
  double norm() const { return e_max * lattice.num_sites; }
  PureState eigenstate(std::size_t i) const {
    return PureState::normalized(lattice, vectors.col(static_cast<Eigen::Index>(i)));
  }
};

namespace detail {
inline void fix_phase(Matrix& v) {
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    const double scale = v.col(c).cwiseAbs().maxCoeff();
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      if (std::abs(v(r, c)) > 1e-8 * scale) {
        const Complex ph = std::conj(v(r, c)) / std::abs(v(r, c));
        v.col(c) *= ph;
        break;
      }
    }
  }
}
}  // namespace detail

/// Full dense decomposition. Refuses dimensions above the dense guard.
inline SpectralData diagonalize(const LocalHamiltonian& h) {
  detail::guard_dense(h.lattice);
  SpectralData s;
  s.lattice = h.lattice;
  s.real = h.is_real();
  if (s.real) {
    auto es = symmetric_eigen(assemble_real(h));
    s.energies = std::move(es.values);
    s.vectors = es.vectors.cast<Complex>();
  } else {
    auto es = hermitian_eigen(assemble(h));
    s.energies = std::move(es.values);
    s.vectors = std::move(es.vectors);
  }
  detail::fix_phase(s.vectors);
  s.residual_ground = s.energies[0];
  s.ground_shift = h.ground_shift + s.energies[0];
  s.energies.array() -= s.energies[0];
  s.densities = s.energies / h.lattice.num_sites;
  s.e_max = s.densities.maxCoeff();
  return s;
}

/// Diagonalizes and stores the resulting ground shift in `h`, saving the
/// separate values-only solve of apply_ground_shift.
inline SpectralData diagonalize_and_shift(LocalHamiltonian& h) {
  SpectralData s = diagonalize(h);
  h.ground_shift = s.ground_shift;
  s.residual_ground = 0;
  return s;
}

/// max_i ||H v_i - E_i v_i|| / max(1, ||H||).
inline double spectral_residual(const LocalHamiltonian& h, const SpectralData& s) {
  Matrix hm = assemble(h);
  hm.diagonal().array() -= s.residual_ground;
  const Matrix r = hm * s.vectors - s.vectors * s.energies.cast<Complex>().asDiagonal();
  return r.colwise().norm().maxCoeff() / std::max(1.0, s.norm());
}

struct GapReport {
  double tolerance = 0;
  double min_gap_difference = std::numeric_limits<double>::infinity();
  std::size_t degenerate_gap_pairs = 0;
  std::size_t degenerate_levels = 0;
  bool exhaustive = true;
  std::size_t levels_scanned = 0;

  bool clean() const { return degenerate_gap_pairs == 0 && degenerate_levels == 0; }
};

/// Scans energy differences G_ij = E_i - E_j (i != j) for coincidences
/// within `tol`. Exhaustive up to `exhaustive_max_sites`; above that a
/// random subset of `sample_levels` levels is scanned exhaustively.
inline GapReport gap_report(const RealVector& energies, double tol, bool exhaustive = true, std::size_t sample_levels = 1024,
                            std::uint64_t seed = 0) {
  if (!(tol > 0)) throw std::invalid_argument("gap_report: tolerance must be positive");
  GapReport r;
  r.tolerance = tol;
  r.exhaustive = exhaustive;
  std::vector<double> levels(energies.data(), energies.data() + energies.size());
  if (!exhaustive && levels.size() > sample_levels) {
    std::mt19937_64 rng(seed);
    std::shuffle(levels.begin(), levels.end(), rng);
    levels.resize(sample_levels);
  }
  std::sort(levels.begin(), levels.end());
  r.levels_scanned = levels.size();
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] - levels[i - 1] < tol) ++r.degenerate_levels;
  // Each unordered difference stands for the ordered pair and its mirror.
  std::vector<double> gaps;
  gaps.reserve(levels.size() * (levels.size() - 1) / 2);
  for (std::size_t i = 0; i < levels.size(); ++i)
    for (std::size_t j = i + 1; j < levels.size(); ++j) gaps.push_back(levels[j] - levels[i]);
  std::sort(gaps.begin(), gaps.end());
  for (std::size_t k = 1; k < gaps.size(); ++k) {
    const double diff = gaps[k] - gaps[k - 1];
    r.min_gap_difference = std::min(r.min_gap_difference, diff);
    if (diff < tol) ++r.degenerate_gap_pairs;
  }
  return r;
}

inline GapReport gap_report(const SpectralData& s, std::optional<double> tol = std::nullopt, std::size_t exhaustive_max_sites = 10,
                            std::uint64_t seed = 0) {
  const double t = tol.value_or(1e-10 * std::max(1.0, s.norm()));
  return gap_report(s.energies, t, s.lattice.num_sites <= exhaustive_max_sites, 1024, seed);
}

/// Boltzmann weights e^{-beta E_i} / Z in the energy eigenbasis.
inline RealVector gibbs_populations(const SpectralData& s, double beta) {
  if (!(beta >= 0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be finite and non-negative");
  RealVector w = (-beta * s.energies.array()).exp();
  return w / w.sum();
}

inline double log_partition_function(const SpectralData& s, double beta) {
  if (!(beta >= 0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be finite and non-negative");
  // E_0 = 0, so every exponent is <= 0 and the sum is >= 1.
  return std::log((-beta * s.energies.array()).exp().sum());
}

inline DensityMatrix gibbs_state(const SpectralData& s, double beta) {
  const RealVector p = gibbs_populations(s, beta);
  return DensityMatrix(s.vectors * p.cast<Complex>().asDiagonal() * s.vectors.adjoint());
}

/// F_beta = -(1/beta) log Z_beta; undefined at beta = 0.
inline double free_energy(const SpectralData& s, double beta) {
  if (!(beta > 0)) throw std::domain_error("free energy needs beta > 0; use log_partition_function at beta = 0");
  return -log_partition_function(s, beta) / beta;
}

struct GibbsReport {
  double beta = 0;
  double log_z = 0;
  std::optional<double> free_energy;
  double ground_probability = 0;
  double s_inf = 0;
  /// |p(beta) - e^{beta F}| (or |p - 1/dim| at beta = 0).
  double ground_residual = 0;
  /// |S_inf + beta F| (or |S_inf - log dim| at beta = 0).
  double entropy_residual = 0;
  bool ok = false;
};

inline GibbsReport check_gibbs_identities(const SpectralData& s, double beta, double tol = kTol.structural) {
  GibbsReport r;
  r.beta = beta;
  const RealVector p = gibbs_populations(s, beta);
  r.log_z = log_partition_function(s, beta);
  r.ground_probability = p[0];
  r.s_inf = renyi_entropy(p, RenyiOrder::infinity());
  if (beta > 0) {
    const double f = free_energy(s, beta);
    r.free_energy = f;
    r.ground_residual = std::abs(r.ground_probability - std::exp(beta * f));
    r.entropy_residual = std::abs(r.s_inf + beta * f);
  } else {
    const double log_dim = std::log(static_cast<double>(s.dim()));
    r.ground_residual = std::abs(r.ground_probability - 1.0 / static_cast<double>(s.dim()));
    r.entropy_residual = std::abs(r.s_inf - log_dim) + std::abs(r.log_z - log_dim);
  }
  r.ok = r.ground_residual <= tol && r.entropy_residual <= tol;
  return r;
}

/// <psi|H|psi> with the ground shift applied.
inline double energy_expectation(const LocalHamiltonian& h, const Vector& psi) { return psi.dot(h.apply(psi)).real(); }

}  // namespace ergolab
