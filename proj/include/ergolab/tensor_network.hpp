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
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ergolab/constructions.hpp"
#include "ergolab/entropy.hpp"
#include "ergolab/hamiltonian.hpp"
#include "ergolab/state.hpp"

namespace ergolab {

// ---------------------------------------------------------------------------
// Finite-depth circuits

struct Gate {
  SiteSet support;
  Matrix unitary;
};

struct CircuitLayer {
  std::vector<Gate> gates;
  /// Largest lattice distance inside one gate support.
  int range = 1;
  int index = 0;

  void validate() const {
    std::uint64_t used = 0;
    for (const auto& g : gates) {
      if (static_cast<std::size_t>(g.unitary.rows()) != g.support.dim() || g.unitary.rows() != g.unitary.cols())
        throw StructuralError("gate dimension does not match its support");
      const auto n = g.unitary.rows();
      if ((g.unitary * g.unitary.adjoint() - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > kTol.structural)
        throw NumericalError("gate is not unitary");
      if (used & g.support.mask()) throw StructuralError("gates within a layer overlap");
      used |= g.support.mask();
      for (int a : g.support.sites())
        for (int b : g.support.sites())
          if (g.support.lattice().distance(a, b) > range) throw StructuralError("gate support exceeds the layer range");
    }
  }
};

inline PureState apply_circuit(const PureState& psi, const std::vector<CircuitLayer>& layers) {
  Vector v = psi.amplitudes;
  for (const auto& layer : layers) {
    layer.validate();
    for (const auto& g : layer.gates) {
      if (!(g.support.lattice() == psi.lattice)) throw StructuralError("gate support outside the lattice");
      v = apply_local(g.unitary, g.support, v);
    }
  }
  return PureState::normalized(psi.lattice, std::move(v));
}

/// Haar-random unitary of dimension n (QR of a complex Ginibre matrix with
/// the phase of R's diagonal removed).
inline Matrix haar_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
  return q;
}

/// Layers of one repeated two-site gate on bonds (x, x+1). Layer l covers
/// the bonds with x = l (mod stride); periodic chains wrap the last bond.
/// With stride 2 this is the usual brickwork.
inline std::vector<CircuitLayer> brickwork(const LatticeSpec& lattice, int depth, const Matrix& gate, int stride = 2) {
  if (stride < 2) throw std::invalid_argument("brickwork stride must be at least 2");
  if (lattice.geometry == Geometry::ChainPeriodic && lattice.num_sites % stride != 0)
    throw UnsupportedError("periodic brickwork needs N divisible by the stride");
  std::vector<CircuitLayer> layers;
  const int n = lattice.num_sites;
  for (int l = 0; l < depth; ++l) {
    CircuitLayer layer;
    layer.index = l;
    for (int x = l % stride; x < n; x += stride) {
      const int y = x + 1;
      if (y >= n && lattice.geometry == Geometry::ChainOpen) break;
      const int yy = y % n;
      layer.gates.push_back(Gate{SiteSet(lattice, {x, yy}), x < yy ? gate : Matrix(swap_gate(lattice.local_dim) * gate * swap_gate(lattice.local_dim))});
    }
    layer.validate();
    layers.push_back(std::move(layer));
  }
  return layers;
}

inline int circuit_depth(const std::vector<CircuitLayer>& layers) { return static_cast<int>(layers.size()); }

inline int circuit_range(const std::vector<CircuitLayer>& layers) {
  int k = 0;
  for (const auto& l : layers) k = std::max(k, l.range);
  return k;
}

/// <O_x O_y> - <O_x><O_y> for single-site operators.
inline Complex connected_correlator(const PureState& psi, int x, const Matrix& ox, int y, const Matrix& oy) {
  const auto& l = psi.lattice;
  const SiteSet sx(l, {x}), sy(l, {y});
  const Vector ax = apply_local(ox, sx, psi.amplitudes);
  const Vector ay = apply_local(oy, sy, psi.amplitudes);
  const Complex both = psi.amplitudes.dot(apply_local(ox, sx, ay));
  return both - psi.amplitudes.dot(ax) * psi.amplitudes.dot(ay);
}

struct LightConeReport {
  int radius = 0;
  /// Largest |connected correlator| over Pauli pairs at distance > radius.
  double max_outside = 0;
  /// Same, at distance <= radius (for reference).
  double max_inside = 0;
  bool ok = true;
};

/// Scans Pauli two-point functions against the 2kD light cone.
inline LightConeReport light_cone_scan(const PureState& psi, int range, int depth, double tol = 1e-10) {
  if (psi.lattice.local_dim != 2) throw UnsupportedError("light_cone_scan uses Pauli operators");
  LightConeReport r;
  r.radius = 2 * range * depth;
  const auto& l = psi.lattice;
  for (int x = 0; x < l.num_sites; ++x)
    for (int y = x + 1; y < l.num_sites; ++y)
      for (char a : {'X', 'Y', 'Z'})
        for (char b : {'X', 'Y', 'Z'}) {
          const double c = std::abs(connected_correlator(psi, x, pauli::by_axis(a), y, pauli::by_axis(b)));
          if (l.distance(x, y) > r.radius) r.max_outside = std::max(r.max_outside, c);
          else r.max_inside = std::max(r.max_inside, c);
        }
  r.ok = r.max_outside <= tol;
  return r;
}

struct ExtensivityReport {
  SiteSet sublattice;
  int spacing = 0;
  bool below_light_cone = false;
  std::string warning;
  /// Trace distance between rho_sub and the product of its one-site marginals.
  double product_distance = 0;
  double s2_total = 0;
  double s2_single = 0;
  double additivity_error = 0;
  /// Largest trace distance between one-site marginals on the sublattice.
  double single_site_spread = 0;
  /// All one-site S_2 vanish for every sublattice offset.
  bool product_branch = false;
  double product_overlap = 0;
  bool ok = false;
};

/// Checks rho_sub = (x) rho_x and S_2 additivity on the sublattice
/// {offset, offset + spacing, ...}. With the circuit's range and depth the
/// spacing is compared against 2kD + 1.
inline ExtensivityReport circuit_extensivity_check(const PureState& psi, int spacing, int offset = 0,
                                                   std::optional<std::pair<int, int>> range_depth = std::nullopt) {
  const auto& l = psi.lattice;
  ExtensivityReport r;
  r.spacing = spacing;
  if (range_depth && spacing < 2 * range_depth->first * range_depth->second + 1) {
    r.below_light_cone = true;
    r.warning = "spacing below 2kD + 1; the product structure may legitimately fail";
  }
  r.sublattice = SiteSet::sublattice(l, offset, spacing);
  const DensityMatrix rho = partial_trace(psi, r.sublattice);
  std::vector<DensityMatrix> singles;
  for (int x : r.sublattice.sites()) singles.push_back(partial_trace(psi, SiteSet(l, {x})));
  Matrix prod = Matrix::Identity(1, 1);
  for (const auto& s : singles) prod = kron(prod, s.matrix());
  r.product_distance = trace_distance(rho, DensityMatrix(prod));
  r.s2_total = renyi_entropy(rho, 2.0);
  r.s2_single = renyi_entropy(singles.front(), 2.0);
  r.additivity_error = std::abs(r.s2_total - static_cast<double>(singles.size()) * r.s2_single);
  for (const auto& s : singles) r.single_site_spread = std::max(r.single_site_spread, trace_distance(s, singles.front()));

  bool all_pure = true;
  for (int x = 0; x < l.num_sites && all_pure; ++x)
    if (renyi_entropy(partial_trace(psi, SiteSet(l, {x})), 2.0) >= 1e-10) all_pure = false;
  r.product_branch = all_pure;
  if (all_pure) r.product_overlap = max_product_overlap(psi, 2, 20, 0).overlap;

  r.ok = r.product_distance <= 1e-8 && r.additivity_error <= 1e-6 && r.single_site_spread <= 1e-9 &&
         (!r.product_branch || r.product_overlap >= 1 - 1e-8);
  return r;
}

// ---------------------------------------------------------------------------
// Translation-invariant matrix product states

/// |MPS> = sum Tr(A_{i1} ... A_{iN}) |i1 ... iN> with site-independent tensors.
struct MPSSpec {
  int bond_dim = 1;
  std::vector<Matrix> tensors;
  std::string label = "custom";

  int local_dim() const { return static_cast<int>(tensors.size()); }

  void validate() const {
    if (bond_dim < 1) throw StructuralError("bond dimension must be positive");
    if (tensors.empty()) throw StructuralError("an MPS needs at least one tensor");
    for (const auto& a : tensors)
      if (a.rows() != bond_dim || a.cols() != bond_dim) throw StructuralError("tensor shape does not match the bond dimension");
  }
};

/// E = sum_i A_i (x) conj(A_i).
inline Matrix transfer_matrix(const MPSSpec& spec) {
  spec.validate();
  const auto d2 = static_cast<Eigen::Index>(spec.bond_dim) * spec.bond_dim;
  Matrix e = Matrix::Zero(d2, d2);
  for (const auto& a : spec.tensors) e += kron(a, a.conjugate());
  return e;
}

struct InjectivityReport {
  double leading = 0;
  double second = 0;
  double relative_gap = 0;
  bool injective = false;
};

/// Leading transfer-matrix eigenvalue simple, with relative modulus gap at
/// least `min_gap`.
inline InjectivityReport injectivity(const MPSSpec& spec, double min_gap = 1e-6) {
  const Matrix e = transfer_matrix(spec);
  Eigen::ComplexEigenSolver<Matrix> es(e, false);
  std::vector<double> mags;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) mags.push_back(std::abs(es.eigenvalues()[i]));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  InjectivityReport r;
  r.leading = mags[0];
  r.second = mags.size() > 1 ? mags[1] : 0.0;
  r.relative_gap = r.leading > 0 ? (r.leading - r.second) / r.leading : 0.0;
  r.injective = r.leading > 0 && r.relative_gap >= min_gap;
  return r;
}

inline PureState mps_to_dense(const MPSSpec& spec, int n) {
  spec.validate();
  const LatticeSpec l = chain(n, spec.local_dim(), Geometry::ChainPeriodic);
  if (l.hilbert_dim() > kTol.dense_dim_guard) throw ResourceGuardError("mps_to_dense: state exceeds the dense guard");
  // prefix[k] holds A_{i1} ... A_{ik} for every prefix index.
  std::vector<Matrix> prefix{Matrix::Identity(spec.bond_dim, spec.bond_dim)};
  for (int k = 0; k < n; ++k) {
    std::vector<Matrix> next;
    next.reserve(prefix.size() * spec.tensors.size());
    for (const auto& p : prefix)
      for (const auto& a : spec.tensors) next.push_back(p * a);
    prefix = std::move(next);
  }
  Vector v(static_cast<Eigen::Index>(prefix.size()));
  for (std::size_t i = 0; i < prefix.size(); ++i) v[static_cast<Eigen::Index>(i)] = prefix[i].trace();
  if (!(v.norm() > 0)) throw NumericalError("MPS has zero norm at this size");
  return PureState::normalized(l, v);
}

namespace detail {

/// log|Tr(M^n)| and the phase of Tr(M^n), by binary powering with the
/// running product rescaled to unit max-entry.
inline std::pair<double, Complex> log_trace_power(const Matrix& m, int n) {
  const auto dim = m.rows();
  Matrix result = Matrix::Identity(dim, dim);
  double log_result = 0;
  Matrix base = m;
  double log_base = 0;
  auto rescale = [](Matrix& x, double& lg) {
    const double s = x.cwiseAbs().maxCoeff();
    if (s > 0) {
      x /= s;
      lg += std::log(s);
    }
  };
  rescale(base, log_base);
  for (int e = n; e > 0; e >>= 1) {
    if (e & 1) {
      result = result * base;
      log_result += log_base;
      rescale(result, log_result);
    }
    if (e > 1) {
      base = base * base;
      log_base *= 2;
      rescale(base, log_base);
    }
  }
  const Complex t = result.trace();
  if (std::abs(t) == 0) return {-INFINITY, Complex(1.0)};
  return {log_result + std::log(std::abs(t)), t / std::abs(t)};
}

}  // namespace detail

/// log |<phi|^{(x)N} |MPS_N>| (normalized MPS) from Tr(A_phi^N) / sqrt(Tr(E^N)).
inline double log_transfer_overlap(const MPSSpec& spec, const Vector& phi, int n) {
  spec.validate();
  if (phi.size() != spec.local_dim()) throw StructuralError("phi dimension does not match the MPS");
  Matrix a_phi = Matrix::Zero(spec.bond_dim, spec.bond_dim);
  for (int i = 0; i < spec.local_dim(); ++i) a_phi += std::conj(phi[i]) * spec.tensors[static_cast<std::size_t>(i)];
  const double log_num = detail::log_trace_power(a_phi, n).first;
  const double log_z = detail::log_trace_power(transfer_matrix(spec), n).first;
  if (!std::isfinite(log_z)) throw NumericalError("MPS has zero norm at this size");
  return log_num - 0.5 * log_z - n * std::log(phi.norm());
}

inline double transfer_overlap(const MPSSpec& spec, const Vector& phi, int n) {
  return std::exp(log_transfer_overlap(spec, phi, n));
}

/// Blocks m sites into one: tensors A_{i1} ... A_{im} on local dimension d^m.
inline MPSSpec block_spec(const MPSSpec& spec, int m) {
  spec.validate();
  MPSSpec out;
  out.bond_dim = spec.bond_dim;
  out.label = spec.label + "-block" + std::to_string(m);
  out.tensors = {Matrix::Identity(spec.bond_dim, spec.bond_dim)};
  for (int k = 0; k < m; ++k) {
    std::vector<Matrix> next;
    for (const auto& p : out.tensors)
      for (const auto& a : spec.tensors) next.push_back(p * a);
    out.tensors = std::move(next);
  }
  return out;
}

struct SingleSiteOptimizer {
  int theta_points = 64;
  int phi_points = 128;
  /// Random starting vectors for d > 2.
  std::size_t samples = 8192;
  std::uint64_t seed = 0;
  double refine_tol = 1e-10;
};

struct OverlapMaximum {
  int n = 0;
  Vector phi;
  double log_overlap = -INFINITY;
  double overlap = 0;
};

namespace detail {

inline Vector bloch(double theta, double phase) {
  Vector v(2);
  v << std::cos(theta / 2), std::exp(Complex(0, phase)) * std::sin(theta / 2);
  return v;
}

/// Pattern search on a real parameter vector, step halving down to tol.
template <typename F>
std::vector<double> pattern_search(F&& f, std::vector<double> x, double step, double tol) {
  double best = f(x);
  while (step > tol) {
    bool improved = false;
    for (std::size_t k = 0; k < x.size(); ++k)
      for (double s : {step, -step}) {
        std::vector<double> y = x;
        y[k] += s;
        const double v = f(y);
        if (v > best) {
          best = v;
          x = std::move(y);
          improved = true;
        }
      }
    if (!improved) step /= 2;
  }
  return x;
}

inline Vector unpack(const std::vector<double>& x) {
  Vector v(static_cast<Eigen::Index>(x.size() / 2));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = Complex(x[2 * static_cast<std::size_t>(i)], x[2 * static_cast<std::size_t>(i) + 1]);
  const double n = v.norm();
  return n > 0 ? Vector(v / n) : v;
}

}  // namespace detail

/// Maximizes |<phi|^{(x)N}|MPS_N>| over single-site phi. For d = 2 a
/// Bloch-sphere grid seeds a local refinement; otherwise random vectors do.
inline OverlapMaximum maximize_product_overlap(const MPSSpec& spec, int n, const SingleSiteOptimizer& opt = {}) {
  const int d = spec.local_dim();
  OverlapMaximum best;
  best.n = n;
  const auto objective = [&](const Vector& v) { return v.norm() > 0 ? log_transfer_overlap(spec, v, n) : -INFINITY; };
  if (d == 2) {
    const auto rows = static_cast<std::size_t>(opt.theta_points + 1);
    std::vector<std::pair<double, Vector>> row_best(rows, {-INFINITY, Vector()});
    parallel_for(rows, [&](std::size_t i) {
      const double theta = M_PI * static_cast<double>(i) / opt.theta_points;
      for (int j = 0; j < opt.phi_points; ++j) {
        const Vector v = detail::bloch(theta, 2 * M_PI * j / opt.phi_points);
        const double val = objective(v);
        if (val > row_best[i].first) row_best[i] = {val, v};
      }
    });
    Vector seed_vec = row_best[0].second;
    double seed_val = row_best[0].first;
    for (const auto& rb : row_best)
      if (rb.first > seed_val) seed_val = rb.first, seed_vec = rb.second;
    best.phi = seed_vec;
    best.log_overlap = seed_val;
  } else {
    std::mt19937_64 rng(opt.seed);
    for (std::size_t k = 0; k < opt.samples; ++k) {
      const Vector v = random_unit_vector(static_cast<std::size_t>(d), rng);
      const double val = objective(v);
      if (val > best.log_overlap) best.log_overlap = val, best.phi = v;
    }
  }
  std::vector<double> x;
  for (Eigen::Index i = 0; i < best.phi.size(); ++i) {
    x.push_back(best.phi[i].real());
    x.push_back(best.phi[i].imag());
  }
  const double step = d == 2 ? M_PI / opt.theta_points : 0.1;
  x = detail::pattern_search([&](const std::vector<double>& y) { return objective(detail::unpack(y)); }, x, step, opt.refine_tol);
  const Vector refined = detail::unpack(x);
  const double val = objective(refined);
  if (val > best.log_overlap) best.log_overlap = val, best.phi = refined;
  best.overlap = std::exp(best.log_overlap);
  return best;
}

struct OverlapDecayReport {
  InjectivityReport injectivity;
  std::vector<OverlapMaximum> points;
  LinearFit fit;
  double kappa = 0;
  bool product_branch = false;
  bool ok = false;
  std::vector<std::string> notes;
};

/// Fits log max_phi |<phi|^{(x)N}|MPS_N>| against N.
inline OverlapDecayReport mps_overlap_decay(const MPSSpec& spec, const std::vector<int>& n_grid, const SingleSiteOptimizer& opt = {}) {
  if (n_grid.size() < 3) throw InsufficientDataError("the decay fit needs at least three sizes");
  OverlapDecayReport r;
  r.injectivity = injectivity(spec);
  std::vector<double> x, y;
  for (int n : n_grid) {
    r.points.push_back(maximize_product_overlap(spec, n, opt));
    x.push_back(n);
    y.push_back(r.points.back().log_overlap);
  }
  r.product_branch = std::all_of(r.points.begin(), r.points.end(), [](const OverlapMaximum& p) { return p.overlap >= 1 - 1e-9; });
  r.fit = linear_fit(x, y);
  r.kappa = -r.fit.slope;
  if (r.product_branch) {
    r.kappa = 0;
    r.notes.push_back("product branch: unit overlap at every size");
    r.ok = true;
  } else if (!r.injectivity.injective) {
    r.notes.push_back("non-injective transfer matrix: the decay premise does not hold");
    r.ok = false;
  } else {
    r.ok = r.kappa > 0 && r.fit.r_squared >= 0.99;
  }
  return r;
}

// Builders.

inline MPSSpec product_mps(const Vector& a) {
  MPSSpec s;
  s.bond_dim = 1;
  s.label = "product";
  for (Eigen::Index i = 0; i < a.size(); ++i) s.tensors.push_back(Matrix::Constant(1, 1, a[i]));
  return s;
}

inline MPSSpec ghz_mps() {
  MPSSpec s;
  s.bond_dim = 2;
  s.label = "ghz";
  Matrix a0 = Matrix::Zero(2, 2), a1 = Matrix::Zero(2, 2);
  a0(0, 0) = 1;
  a1(1, 1) = 1;
  s.tensors = {a0, a1};
  return s;
}

inline MPSSpec aklt_mps() {
  MPSSpec s;
  s.bond_dim = 2;
  s.label = "aklt";
  Matrix plus = Matrix::Zero(2, 2), zero = Matrix::Zero(2, 2), minus = Matrix::Zero(2, 2);
  plus(0, 1) = std::sqrt(2.0 / 3);
  zero(0, 0) = -std::sqrt(1.0 / 3);
  zero(1, 1) = std::sqrt(1.0 / 3);
  minus(1, 0) = -std::sqrt(2.0 / 3);
  s.tensors = {plus, zero, minus};
  return s;
}

/// Gaussian complex tensors; generic draws are injective.
inline MPSSpec random_mps(int bond_dim, int local_dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  MPSSpec s;
  s.bond_dim = bond_dim;
  s.label = "random";
  for (int i = 0; i < local_dim; ++i) {
    Matrix a(bond_dim, bond_dim);
    for (int r = 0; r < bond_dim; ++r)
      for (int c = 0; c < bond_dim; ++c) a(r, c) = Complex(g(rng), g(rng));
    s.tensors.push_back(a);
  }
  return s;
}

struct SublatticeEntropy {
  int spacing = 0;
  std::size_t sites = 0;
  double s2 = 0;
  double s2_per_site = 0;
};

/// Exploratory only: S_2 of sublattices with spacings 1, 2, 4, ... of a
/// dense MPS. Nothing here is asserted.
inline std::vector<SublatticeEntropy> exploratory_sublattice_entropies(const MPSSpec& spec, int n) {
  const PureState psi = mps_to_dense(spec, n);
  std::vector<SublatticeEntropy> out;
  for (int s = 1; s <= n / 2; s *= 2) {
    SiteSet a = SiteSet::sublattice(psi.lattice, 0, s);
    if (2 * a.size() > static_cast<std::size_t>(n)) a = SiteSet::contiguous(psi.lattice, 0, n / 2);
    const double s2 = marginal_renyi2(psi.amplitudes, psi.lattice, a);
    out.push_back(SublatticeEntropy{s, a.size(), s2, s2 / static_cast<double>(a.size())});
  }
  return out;
}

}  // namespace ergolab
