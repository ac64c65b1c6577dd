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

#include <random>
#include <vector>

#include "ergolab/core.hpp"
#include "ergolab/lattice.hpp"

namespace ergolab {

/// Normalized state vector on a lattice.
struct PureState {
  LatticeSpec lattice;
  Vector amplitudes;

  PureState() = default;

  PureState(const LatticeSpec& l, Vector amps) : lattice(l), amplitudes(std::move(amps)) {
    lattice.validate();
    if (static_cast<std::size_t>(amplitudes.size()) != lattice.hilbert_dim())
      throw StructuralError("amplitude vector length " + std::to_string(amplitudes.size()) +
                            " does not match lattice dimension " + std::to_string(lattice.hilbert_dim()));
    if (std::abs(amplitudes.norm() - 1.0) > kTol.normalization)
      throw NumericalError("state vector is not normalized");
  }

  /// Rescales `amps` to unit norm; zero vectors are rejected.
  static PureState normalized(const LatticeSpec& l, Vector amps) {
    const double n = amps.norm();
    if (!(n > 0)) throw NumericalError("cannot normalize a zero vector");
    amps /= n;
    return PureState(l, std::move(amps));
  }

  std::size_t dim() const { return static_cast<std::size_t>(amplitudes.size()); }
};

/// Hermitian, unit-trace, positive semi-definite matrix.
class DensityMatrix {
 public:
  DensityMatrix() = default;

  explicit DensityMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0) throw StructuralError("density matrix must be square");
    if (!is_hermitian(m_, kTol.structural)) throw NumericalError("density matrix is not Hermitian");
    if (std::abs(m_.trace() - Complex(1.0)) > kTol.structural) throw NumericalError("density matrix trace differs from 1");
    m_ = 0.5 * (m_ + m_.adjoint()).eval();
  }

  static DensityMatrix from_pure(const Vector& psi) { return DensityMatrix(psi * psi.adjoint()); }
  static DensityMatrix from_pure(const PureState& psi) { return from_pure(psi.amplitudes); }

  static DensityMatrix maximally_mixed(std::size_t dim) {
    return DensityMatrix(Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)) /
                         static_cast<double>(dim));
  }

  /// Diagonal state with the given probability vector.
  static DensityMatrix diagonal(const RealVector& p) { return DensityMatrix(p.cast<Complex>().asDiagonal()); }

  const Matrix& matrix() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  double purity() const { return m_.squaredNorm(); }

 private:
  Matrix m_;
};

/// Clamps eigenvalues in [-psd_clamp, 0) to zero and renormalizes. More
/// negative eigenvalues raise NumericalError.
inline RealVector clamp_spectrum(RealVector q) {
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (q[i] < -kTol.psd_clamp) throw NumericalError("matrix is not positive semi-definite");
    if (q[i] < 0) q[i] = 0;
  }
  const double s = q.sum();
  if (!(s > 0)) throw NumericalError("spectrum sums to zero");
  return q / s;
}

/// Ascending eigenvalues of rho after PSD clamping.
inline RealVector spectrum(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
  return clamp_spectrum(es.eigenvalues());
}

/// Reshapes psi into a (d^|keep| x d^|rest|) matrix M with psi = vec(M).
inline Matrix amplitude_matrix(const Vector& psi, const LatticeSpec& lattice, const SiteSet& keep) {
  if (static_cast<std::size_t>(psi.size()) != lattice.hilbert_dim())
    throw StructuralError("state dimension does not match lattice");
  if (!(keep.lattice() == lattice)) throw StructuralError("site set belongs to a different lattice");
  IndexSplit split(lattice, keep);
  Matrix m(static_cast<Eigen::Index>(split.keep_dim()), static_cast<Eigen::Index>(split.rest_dim()));
  for (std::size_t i = 0; i < lattice.hilbert_dim(); ++i)
    m(static_cast<Eigen::Index>(split.keep(i)), static_cast<Eigen::Index>(split.rest(i))) = psi[static_cast<Eigen::Index>(i)];
  return m;
}

inline Vector from_amplitude_matrix(const Matrix& m, const LatticeSpec& lattice, const SiteSet& keep) {
  IndexSplit split(lattice, keep);
  Vector psi(static_cast<Eigen::Index>(lattice.hilbert_dim()));
  for (std::size_t i = 0; i < lattice.hilbert_dim(); ++i)
    psi[static_cast<Eigen::Index>(i)] = m(static_cast<Eigen::Index>(split.keep(i)), static_cast<Eigen::Index>(split.rest(i)));
  return psi;
}

/// Reduced density operator tr_{keep^c} |psi><psi|, computed from the
/// amplitude reshape without forming the full density matrix.
inline DensityMatrix partial_trace(const PureState& psi, const SiteSet& keep) {
  const Matrix m = amplitude_matrix(psi.amplitudes, psi.lattice, keep);
  return DensityMatrix(m * m.adjoint());
}

/// Partial trace of an arbitrary operator (not necessarily a state).
inline Matrix partial_trace_operator(const Matrix& m, const LatticeSpec& lattice, const SiteSet& keep) {
  if (static_cast<std::size_t>(m.rows()) != lattice.hilbert_dim() || m.rows() != m.cols())
    throw StructuralError("operator dimension does not match lattice");
  if (!(keep.lattice() == lattice)) throw StructuralError("site set belongs to a different lattice");
  IndexSplit split(lattice, keep);
  const auto kd = static_cast<Eigen::Index>(split.keep_dim());
  Matrix out = Matrix::Zero(kd, kd);
  // Group full indices by their rest sub-index.
  std::vector<std::vector<Eigen::Index>> groups(split.rest_dim(), std::vector<Eigen::Index>(split.keep_dim()));
  for (std::size_t i = 0; i < lattice.hilbert_dim(); ++i) groups[split.rest(i)][split.keep(i)] = static_cast<Eigen::Index>(i);
  for (const auto& g : groups)
    for (Eigen::Index a = 0; a < kd; ++a)
      for (Eigen::Index b = 0; b < kd; ++b) out(a, b) += m(g[static_cast<std::size_t>(a)], g[static_cast<std::size_t>(b)]);
  return out;
}

/// Dense route for mixed inputs.
inline DensityMatrix partial_trace(const DensityMatrix& rho, const LatticeSpec& lattice, const SiteSet& keep) {
  if (rho.dim() != lattice.hilbert_dim()) throw StructuralError("density matrix dimension does not match lattice");
  return DensityMatrix(partial_trace_operator(rho.matrix(), lattice, keep));
}

/// Renyi-2 purity tr(rho_A^2) of a pure state's marginal, using whichever
/// side of the bipartition is smaller.
inline double marginal_purity(const Vector& psi, const LatticeSpec& lattice, const SiteSet& keep) {
  const Matrix m = amplitude_matrix(psi, lattice, keep);
  if (m.rows() <= m.cols()) return (m * m.adjoint()).squaredNorm();
  return (m.adjoint() * m).squaredNorm();
}

/// Applies `op` (acting on the sites of `support`, in their sorted order) to psi.
inline Vector apply_local(const Matrix& op, const SiteSet& support, const Vector& psi) {
  const LatticeSpec& lattice = support.lattice();
  if (static_cast<std::size_t>(op.rows()) != support.dim() || op.rows() != op.cols())
    throw StructuralError("local operator dimension does not match its support");
  const Matrix m = amplitude_matrix(psi, lattice, support);
  return from_amplitude_matrix(op * m, lattice, support);
}

inline Complex overlap(const PureState& a, const PureState& b) {
  if (!(a.lattice == b.lattice)) throw StructuralError("overlap: states live on different lattices");
  return a.amplitudes.dot(b.amplitudes);
}

namespace detail {
inline Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const RealVector q = clamp_spectrum(es.eigenvalues());
  return es.eigenvectors() * q.cwiseSqrt().cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}
}  // namespace detail

/// Uhlmann fidelity tr sqrt(sqrt(rho) sigma sqrt(rho)), evaluated as the sum
/// of singular values of sqrt(rho) sqrt(sigma). Equals |<phi|psi>| on pure states.
inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw StructuralError("fidelity: dimension mismatch");
  const Matrix prod = detail::psd_sqrt(rho.matrix()) * detail::psd_sqrt(sigma.matrix());
  Eigen::JacobiSVD<Matrix> svd(prod);
  return std::clamp(svd.singularValues().sum(), 0.0, 1.0);
}

/// Trace norm ||rho - sigma||_1 (sum of singular values, not halved).
inline double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw StructuralError("trace_distance: dimension mismatch");
  const Matrix diff = rho.matrix() - sigma.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

/// Haar-random unit vector in C^d.
inline Vector random_unit_vector(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(static_cast<Eigen::Index>(d));
  for (auto& c : v) c = Complex(g(rng), g(rng));
  return v / v.norm();
}

/// Product of normalized single-site vectors, site 0 first.
inline PureState product_state(const LatticeSpec& lattice, const std::vector<Vector>& factors) {
  if (factors.size() != static_cast<std::size_t>(lattice.num_sites)) throw StructuralError("one factor per site required");
  Vector psi = Vector::Ones(1);
  for (const auto& f : factors) {
    if (f.size() != lattice.local_dim) throw StructuralError("factor dimension differs from local dimension");
    Vector next(psi.size() * f.size());
    for (Eigen::Index i = 0; i < psi.size(); ++i) next.segment(i * f.size(), f.size()) = psi[i] * f;
    psi = std::move(next);
  }
  return PureState::normalized(lattice, std::move(psi));
}

inline std::vector<Vector> random_product_factors(const LatticeSpec& lattice, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Vector> f;
  for (int x = 0; x < lattice.num_sites; ++x) f.push_back(random_unit_vector(static_cast<std::size_t>(lattice.local_dim), rng));
  return f;
}

inline PureState random_product_state(const LatticeSpec& lattice, std::uint64_t seed) {
  return product_state(lattice, random_product_factors(lattice, seed));
}

/// Haar-random state on the full lattice.
inline PureState random_state(const LatticeSpec& lattice, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return PureState(lattice, random_unit_vector(lattice.hilbert_dim(), rng));
}

/// Computational basis state |digits>.
inline PureState basis_state(const LatticeSpec& lattice, const std::vector<int>& digits) {
  if (digits.size() != static_cast<std::size_t>(lattice.num_sites)) throw StructuralError("one digit per site required");
  std::size_t idx = 0;
  for (int x = 0; x < lattice.num_sites; ++x) {
    if (digits[static_cast<std::size_t>(x)] < 0 || digits[static_cast<std::size_t>(x)] >= lattice.local_dim)
      throw StructuralError("digit out of range");
    idx = idx * static_cast<std::size_t>(lattice.local_dim) + static_cast<std::size_t>(digits[static_cast<std::size_t>(x)]);
  }
  Vector v = Vector::Zero(static_cast<Eigen::Index>(lattice.hilbert_dim()));
  v[static_cast<Eigen::Index>(idx)] = 1.0;
  return PureState(lattice, std::move(v));
}

/// Maximally entangled state between A and its complement: the k-th site of
/// A is paired with the k-th site of A^c in a d-level Bell pair; unpaired
/// complement sites are left in |0>.
inline PureState maximally_entangled(const LatticeSpec& lattice, const SiteSet& a) {
  const SiteSet ac = a.complement();
  if (a.size() > ac.size()) throw UnsupportedError("maximally_entangled requires |A| <= N - |A|");
  const auto d = static_cast<std::size_t>(lattice.local_dim);
  const std::size_t pairs = a.size();
  const std::size_t terms = checked_pow(d, pairs);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(lattice.hilbert_dim()));
  for (std::size_t t = 0; t < terms; ++t) {
    std::size_t idx = 0;
    std::size_t rem = t;
    std::vector<std::size_t> digit(static_cast<std::size_t>(lattice.num_sites), 0);
    for (std::size_t k = pairs; k-- > 0;) {
      const std::size_t s = rem % d;
      rem /= d;
      digit[static_cast<std::size_t>(a.sites()[k])] = s;
      digit[static_cast<std::size_t>(ac.sites()[k])] = s;
    }
    for (int x = 0; x < lattice.num_sites; ++x) idx = idx * d + digit[static_cast<std::size_t>(x)];
    v[static_cast<Eigen::Index>(idx)] = 1.0;
  }
  return PureState::normalized(lattice, std::move(v));
}

/// |a> (x) |b> on the concatenated chain, a's sites first.
inline PureState tensor_product(const PureState& a, const PureState& b) {
  if (a.lattice.local_dim != b.lattice.local_dim) throw StructuralError("tensor_product: local dimensions differ");
  LatticeSpec l{a.lattice.num_sites + b.lattice.num_sites, a.lattice.local_dim, 1, a.lattice.geometry};
  Vector v(a.amplitudes.size() * b.amplitudes.size());
  for (Eigen::Index i = 0; i < a.amplitudes.size(); ++i) v.segment(i * b.amplitudes.size(), b.amplitudes.size()) = a.amplitudes[i] * b.amplitudes;
  return PureState::normalized(l, std::move(v));
}

/// Kronecker product of two matrices (first factor most significant).
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Contracts the sites of `traced` with <factors| and returns the unnormalized
/// vector on the remaining sites: (1 (x) <phi_traced|) |psi>.
inline Vector contract_with_product(const Vector& psi, const LatticeSpec& lattice, const SiteSet& traced,
                                    const std::vector<Vector>& factors) {
  if (factors.size() != traced.size()) throw StructuralError("one factor per traced site required");
  Vector bra = Vector::Ones(1);
  for (const auto& f : factors) {
    Vector next(bra.size() * f.size());
    for (Eigen::Index i = 0; i < bra.size(); ++i) next.segment(i * f.size(), f.size()) = bra[i] * f;
    bra = std::move(next);
  }
  const Matrix m = amplitude_matrix(psi, lattice, traced.complement());
  return m * bra.conjugate();
}

}  // namespace ergolab
