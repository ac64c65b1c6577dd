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

// Diagonal ensemble (infinite-time average), time evolution, temporal
// fluctuations and their Renyi-entropy bounds.

#pragma once

#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ergolab/core.hpp"
#include "ergolab/entropy.hpp"
#include "ergolab/hamiltonian.hpp"
#include "ergolab/state.hpp"

namespace ergolab {

/// Populations p_i = |<e_i|psi>|^2 of an initial state, i.e. the spectrum of
/// the time-averaged state omega in its eigenbasis.
struct DiagonalEnsemble {
  RealVector populations;
  /// c_i = <e_i|psi> in the (block-rotated) eigenbasis.
  Vector coefficients;
  /// True when degenerate levels were found and the eigenbasis was rotated
  /// inside each degenerate block.
  bool degenerate_levels = false;

  double renyi(RenyiOrder order) const { return renyi_entropy(populations, order); }

  /// S_inf of omega with its largest population zeroed; +inf when omega is pure.
  double s_inf_omega_prime() const {
    std::vector<double> p(populations.data(), populations.data() + populations.size());
    std::sort(p.begin(), p.end(), std::greater<>());
    if (p.size() < 2 || p[1] <= kTol.spectrum_cutoff) return std::numeric_limits<double>::infinity();
    return -std::log(p[1]);
  }
};

/// Computes omega's populations. Inside each block of levels degenerate
/// within `degeneracy_tol`, the basis is rotated so the initial state's
/// projection lies on the block's first vector; omega stays diagonal.
inline DiagonalEnsemble diagonal_ensemble(const PureState& psi, const SpectralData& s, double degeneracy_tol = 1e-12) {
  if (!(psi.lattice == s.lattice) || psi.dim() != s.dim()) throw StructuralError("diagonal_ensemble: dimension mismatch");
  DiagonalEnsemble de;
  de.coefficients = s.vectors.adjoint() * psi.amplitudes;
  const auto n = static_cast<Eigen::Index>(s.dim());
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i + 1;
    while (j < n && s.energies[j] - s.energies[j - 1] < degeneracy_tol) ++j;
    if (j - i > 1) {
      de.degenerate_levels = true;
      const double w = de.coefficients.segment(i, j - i).norm();
      de.coefficients.segment(i, j - i).setZero();
      de.coefficients[i] = w;
    }
    i = j;
  }
  de.populations = de.coefficients.cwiseAbs2();
  return de;
}

/// |psi(t)> = sum_i e^{-i E_i t} c_i |e_i>.
inline PureState evolve(const PureState& psi, const SpectralData& s, double t) {
  const Vector c = s.vectors.adjoint() * psi.amplitudes;
  const Vector phased = c.cwiseProduct((-kI * t * s.energies.cast<Complex>()).array().exp().matrix());
  return PureState::normalized(psi.lattice, s.vectors * phased);
}

/// Bounded observable: a Hermitian operator on `support` (the full lattice
/// for dense observables).
struct Observable {
  SiteSet support;
  Matrix op;
  double norm = 0;
  std::string label;

  static Observable local(const SiteSet& support, const Matrix& op, std::string label = "local") {
    if (static_cast<std::size_t>(op.rows()) != support.dim()) throw StructuralError("observable dimension mismatch");
    if (!is_hermitian(op)) throw NumericalError("observable is not Hermitian");
    return Observable{support, op, hermitian_norm(op), std::move(label)};
  }

  static Observable full(const LatticeSpec& lattice, const Matrix& op, std::string label = "dense") {
    return local(SiteSet::all(lattice), op, std::move(label));
  }

  static Observable pauli(const LatticeSpec& lattice, int site, char axis) {
    return local(SiteSet(lattice, {site}), pauli::by_axis(axis), std::string(1, axis) + std::to_string(site));
  }

  /// sigma^a_x sigma^b_y.
  static Observable correlator(const LatticeSpec& lattice, int x, char ax, int y, char ay) {
    const Matrix op = x < y ? kron(pauli::by_axis(ax), pauli::by_axis(ay)) : kron(pauli::by_axis(ay), pauli::by_axis(ax));
    return local(SiteSet(lattice, {x, y}), op,
                 std::string(1, ax) + std::to_string(x) + std::string(1, ay) + std::to_string(y));
  }

  /// Random Hermitian operator on `support` with operator norm 1.
  static Observable random_local(const SiteSet& support, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    const auto k = static_cast<Eigen::Index>(support.dim());
    Matrix m(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j) m(i, j) = Complex(g(rng), g(rng));
    m = 0.5 * (m + m.adjoint()).eval();
    m /= hermitian_norm(m);
    return local(support, m, "random" + support.mask_hex());
  }

  Vector apply(const Vector& psi) const { return apply_local(op, support, psi); }

  double expectation(const Vector& psi) const { return psi.dot(apply(psi)).real(); }
};

/// A in the energy eigenbasis, V^dagger A V.
inline Matrix eigenbasis_matrix(const Observable& a, const SpectralData& s) {
  Matrix av(s.vectors.rows(), s.vectors.cols());
  for (Eigen::Index c = 0; c < s.vectors.cols(); ++c) av.col(c) = a.apply(s.vectors.col(c));
  return s.vectors.adjoint() * av;
}

struct VarianceResult {
  double value = 0;
  /// Set when the non-degenerate-gap premise failed at the given tolerance.
  bool approximate = false;
};

/// Exact infinite-time variance sum_{i != j} p_i p_j |A_ij|^2, valid when the
/// energy gaps are non-degenerate. `gap_tol` controls the degeneracy check.
inline VarianceResult variance_exact(const DiagonalEnsemble& de, const Matrix& a_eig, const RealVector& energies,
                                     std::optional<double> gap_tol = std::nullopt) {
  VarianceResult r;
  const RealVector& p = de.populations;
  const Matrix weighted = p.cast<Complex>().asDiagonal() * a_eig.cwiseAbs2().cast<Complex>() * p.cast<Complex>().asDiagonal();
  double total = weighted.real().sum();
  for (Eigen::Index i = 0; i < p.size(); ++i) total -= p[i] * p[i] * std::norm(a_eig(i, i));
  r.value = std::max(0.0, total);
  if (gap_tol) r.approximate = !gap_report(energies, *gap_tol).clean() || de.degenerate_levels;
  return r;
}

inline VarianceResult variance_exact(const PureState& psi, const SpectralData& s, const Observable& a,
                                     std::optional<double> gap_tol = std::nullopt) {
  return variance_exact(diagonal_ensemble(psi, s), eigenbasis_matrix(a, s), s.energies, gap_tol);
}

struct SampledVariance {
  double estimate = 0;
  double standard_error = 0;
  /// Time-sampled mean of <A(t)> and its standard error.
  double sampled_mean = 0;
  double sampled_mean_se = 0;
  /// tr(omega A).
  double equilibrium_value = 0;
  std::size_t samples = 0;
  double horizon = 0;
};

/// Default horizon T = 1e4 in units where the largest term norm is 1.
inline constexpr double kDefaultHorizon = 1e4;

/// <A(t)> at the given times, evaluated in the eigenbasis.
inline std::vector<double> expectation_trajectory(const DiagonalEnsemble& de, const Matrix& a_eig, const RealVector& energies,
                                                  const std::vector<double>& times) {
  std::vector<double> out(times.size());
  parallel_for(times.size(), [&](std::size_t k) {
    const Vector ct = de.coefficients.cwiseProduct((-kI * times[k] * energies.cast<Complex>()).array().exp().matrix());
    out[k] = ct.dot(a_eig * ct).real();
  });
  return out;
}

inline std::vector<double> uniform_times(double horizon, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, horizon);
  std::vector<double> t(samples);
  for (auto& x : t) x = u(rng);
  return t;
}

/// Monte-Carlo estimate of the time-averaged (<A(t)> - Abar)^2 over uniform
/// random times in [0, horizon].
inline SampledVariance variance_sampled(const DiagonalEnsemble& de, const Matrix& a_eig, const RealVector& energies,
                                        double horizon, std::size_t samples, std::uint64_t seed) {
  if (samples < 10) throw std::invalid_argument("variance_sampled: at least 10 samples required");
  if (!(horizon > 0)) throw std::invalid_argument("variance_sampled: horizon must be positive");
  SampledVariance r;
  r.samples = samples;
  r.horizon = horizon;
  r.equilibrium_value = (de.populations.cast<Complex>().array() * a_eig.diagonal().array()).sum().real();
  const auto values = expectation_trajectory(de, a_eig, energies, uniform_times(horizon, samples, seed));
  const double m = static_cast<double>(samples);
  double sum = 0, sum_sq = 0, mean = 0, mean_sq = 0;
  for (double v : values) {
    const double dev = (v - r.equilibrium_value) * (v - r.equilibrium_value);
    sum += dev;
    sum_sq += dev * dev;
    mean += v;
    mean_sq += v * v;
  }
  r.estimate = sum / m;
  r.standard_error = std::sqrt(std::max(0.0, sum_sq / m - r.estimate * r.estimate) / (m - 1));
  r.sampled_mean = mean / m;
  r.sampled_mean_se = std::sqrt(std::max(0.0, mean_sq / m - r.sampled_mean * r.sampled_mean) / (m - 1));
  return r;
}

inline SampledVariance variance_sampled(const PureState& psi, const SpectralData& s, const Observable& a, double horizon,
                                        std::size_t samples, std::uint64_t seed) {
  return variance_sampled(diagonal_ensemble(psi, s), eigenbasis_matrix(a, s), s.energies, horizon, samples, seed);
}

struct VarianceBoundReport {
  std::string observable;
  double norm_a = 0;
  double var_exact = 0;
  double s2_omega = 0;
  double s_inf_omega_prime = 0;
  double bound_s2 = 0;    // ||A||^2 e^{-S_2(omega)}
  double bound_sinf = 0;  // 3 ||A||^2 e^{-S_inf(omega')}
  double margin_s2 = 0;
  double margin_sinf = 0;
  std::string tighter;
  bool fully_equilibrated = false;
  bool approximate = false;
  bool ok = false;
};

inline VarianceBoundReport check_variance_bounds(const DiagonalEnsemble& de, const Matrix& a_eig, const Observable& a,
                                                 const RealVector& energies, std::optional<double> gap_tol = std::nullopt) {
  VarianceBoundReport r;
  r.observable = a.label;
  r.norm_a = a.norm;
  const auto var = variance_exact(de, a_eig, energies, gap_tol);
  r.var_exact = var.value;
  r.approximate = var.approximate;
  r.s2_omega = de.renyi(2.0);
  r.s_inf_omega_prime = de.s_inf_omega_prime();
  const double a2 = a.norm * a.norm;
  r.bound_s2 = a2 * std::exp(-r.s2_omega);
  r.fully_equilibrated = std::isinf(r.s_inf_omega_prime);
  r.bound_sinf = r.fully_equilibrated ? 0.0 : 3.0 * a2 * std::exp(-r.s_inf_omega_prime);
  // Tolerance covers round-off in the eigenbasis transform.
  const double slack = kTol.structural * std::max(1.0, a2);
  r.margin_s2 = r.bound_s2 - r.var_exact;
  r.margin_sinf = r.bound_sinf - r.var_exact;
  r.tighter = r.bound_sinf < r.bound_s2 ? "S_inf(omega')" : "S_2(omega)";
  r.ok = r.margin_s2 >= -slack && r.margin_sinf >= -slack;
  return r;
}

inline VarianceBoundReport check_variance_bounds(const PureState& psi, const SpectralData& s, const Observable& a,
                                                 std::optional<double> gap_tol = std::nullopt) {
  return check_variance_bounds(diagonal_ensemble(psi, s), eigenbasis_matrix(a, s), a, s.energies, gap_tol);
}

struct SubsystemEquilibrationReport {
  std::size_t subsystem_dim = 0;
  double mean_distance = 0;
  double standard_error = 0;
  double max_distance = 0;
  double s2_omega = 0;
  double bound = 0;  // 2 d_S e^{-S_2(omega)/2}
  double margin = 0;
  bool ok = false;
};

/// Time average of ||tr_{S^c} rho(t) - tr_{S^c} omega||_1 against the bound
/// 2 d_S e^{-S_2(omega)/2}.
inline SubsystemEquilibrationReport subsystem_equilibration(const PureState& psi, const SpectralData& s, const SiteSet& small,
                                                            double horizon, std::size_t samples, std::uint64_t seed) {
  if (samples < 10) throw std::invalid_argument("subsystem_equilibration: at least 10 samples required");
  if (small.size() > 3) throw UnsupportedError("subsystem_equilibration: |S| <= 3 supported");
  const DiagonalEnsemble de = diagonal_ensemble(psi, s);
  // omega restricted to S: sum_i p_i tr_{S^c} |e_i><e_i| in the rotated basis,
  // assembled from the time-independent part of rho(t).
  const Vector& c = de.coefficients;
  const auto dS = static_cast<Eigen::Index>(small.dim());
  Matrix omega_s = Matrix::Zero(dS, dS);
  {
    const Matrix rotated = s.vectors;
    // Degenerate blocks: rebuild the aligned vectors from psi's projection.
    Matrix basis = rotated;
    if (de.degenerate_levels) {
      const Vector raw = s.vectors.adjoint() * psi.amplitudes;
      const auto n = static_cast<Eigen::Index>(s.dim());
      for (Eigen::Index i = 0; i < n;) {
        Eigen::Index j = i + 1;
        while (j < n && s.energies[j] - s.energies[j - 1] < 1e-12) ++j;
        if (j - i > 1) {
          const double w = raw.segment(i, j - i).norm();
          if (w > 0) basis.col(i) = s.vectors.middleCols(i, j - i) * raw.segment(i, j - i) / w;
        }
        i = j;
      }
    }
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      const double p = std::norm(c[i]);
      if (p < 1e-300) continue;
      const Matrix m = amplitude_matrix(basis.col(i), s.lattice, small);
      omega_s += p * m * m.adjoint();
    }
  }
  const DensityMatrix omega_reduced(omega_s / omega_s.trace().real());
  const auto times = uniform_times(horizon, samples, seed);
  std::vector<double> dist(times.size());
  parallel_for(times.size(), [&](std::size_t k) {
    const PureState pt = evolve(psi, s, times[k]);
    dist[k] = trace_distance(partial_trace(pt, small), omega_reduced);
  });
  SubsystemEquilibrationReport r;
  r.subsystem_dim = small.dim();
  const double m = static_cast<double>(samples);
  double sum = 0, sum_sq = 0;
  for (double d : dist) {
    sum += d;
    sum_sq += d * d;
    r.max_distance = std::max(r.max_distance, d);
  }
  r.mean_distance = sum / m;
  r.standard_error = std::sqrt(std::max(0.0, sum_sq / m - r.mean_distance * r.mean_distance) / (m - 1));
  r.s2_omega = de.renyi(2.0);
  r.bound = 2.0 * static_cast<double>(small.dim()) * std::exp(-r.s2_omega / 2.0);
  r.margin = r.bound - r.mean_distance;
  r.ok = r.margin >= 0;
  return r;
}

}  // namespace ergolab
