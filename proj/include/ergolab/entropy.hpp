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

// Renyi entropies of density operators. Natural logarithms throughout.

#pragma once

#include <limits>
#include <string>
#include <vector>

#include "ergolab/core.hpp"
#include "ergolab/state.hpp"

namespace ergolab {

/// Renyi order alpha >= 0, including infinity. alpha == 1 is von Neumann.
class RenyiOrder {
 public:
  constexpr RenyiOrder(double alpha = 2.0) : alpha_(alpha) {  // NOLINT(google-explicit-constructor)
    if (!(alpha >= 0)) throw std::invalid_argument("Renyi order must be non-negative");
  }

  static constexpr RenyiOrder infinity() { return RenyiOrder(std::numeric_limits<double>::infinity()); }
  static constexpr RenyiOrder von_neumann() { return RenyiOrder(1.0); }

  constexpr double alpha() const { return alpha_; }
  constexpr bool is_infinite() const { return alpha_ == std::numeric_limits<double>::infinity(); }
  constexpr bool is_von_neumann() const { return alpha_ == 1.0; }

  std::string label() const { return is_infinite() ? "inf" : std::to_string(alpha_); }

 private:
  double alpha_;
};

/// Renyi entropy of a probability vector. Weights below spectrum_cutoff are
/// excluded for alpha <= 1 (0 log 0 := 0, and no spurious growth for alpha < 1).
inline double renyi_entropy(const RealVector& probs, RenyiOrder order) {
  const double alpha = order.alpha();
  if (order.is_infinite()) {
    const double qmax = probs.maxCoeff();
    if (!(qmax > 0)) throw NumericalError("empty spectrum");
    return std::max(0.0, -std::log(qmax));
  }
  double s = 0;
  if (alpha == 1.0) {
    for (double q : probs)
      if (q > kTol.spectrum_cutoff) s -= q * std::log(q);
    return std::max(0.0, s);
  }
  double sum = 0;
  for (double q : probs) {
    if (alpha < 1.0 && q <= kTol.spectrum_cutoff) continue;
    if (q > 0) sum += std::pow(q, alpha);
  }
  if (!(sum > 0)) throw NumericalError("empty spectrum");
  return std::max(0.0, std::log(sum) / (1.0 - alpha));
}

inline double renyi_entropy(const DensityMatrix& rho, RenyiOrder order) {
  if (order.alpha() == 2.0) return std::max(0.0, -std::log(rho.purity()));
  return renyi_entropy(spectrum(rho), order);
}

/// S_2 of the marginal of a pure state on `keep`.
inline double marginal_renyi2(const Vector& psi, const LatticeSpec& lattice, const SiteSet& keep) {
  return std::max(0.0, -std::log(marginal_purity(psi, lattice, keep)));
}

struct RenyiOrderingReport {
  bool ok = true;
  double beta = 2.0;
  double s_inf = 0;
  double s_beta = 0;
  std::vector<double> alphas;
  std::vector<double> s_alpha;
  /// S_alpha - S_inf for each alpha; must be >= -tol.
  std::vector<double> left_margins;
  /// S_inf - (beta-1)/beta S_beta; must be >= -tol.
  double right_margin = 0;
  /// Spectrum attached when a violation is found.
  std::vector<double> offending_spectrum;
};

/// Checks S_alpha >= S_inf >= ((beta-1)/beta) S_beta for each alpha.
inline RenyiOrderingReport check_renyi_ordering(const RealVector& probs, const std::vector<RenyiOrder>& alphas, double beta,
                                                double tol = kTol.structural) {
  if (!(beta > 1)) throw std::invalid_argument("check_renyi_ordering requires beta > 1");
  RenyiOrderingReport r;
  r.beta = beta;
  r.s_inf = renyi_entropy(probs, RenyiOrder::infinity());
  r.s_beta = renyi_entropy(probs, RenyiOrder(beta));
  r.right_margin = r.s_inf - (beta - 1.0) / beta * r.s_beta;
  if (r.right_margin < -tol) r.ok = false;
  for (const auto& a : alphas) {
    const double s = renyi_entropy(probs, a);
    r.alphas.push_back(a.alpha());
    r.s_alpha.push_back(s);
    r.left_margins.push_back(s - r.s_inf);
    if (s - r.s_inf < -tol) r.ok = false;
  }
  if (!r.ok) r.offending_spectrum.assign(probs.data(), probs.data() + probs.size());
  return r;
}

inline RenyiOrderingReport check_renyi_ordering(const DensityMatrix& rho, const std::vector<RenyiOrder>& alphas, double beta,
                                                double tol = kTol.structural) {
  return check_renyi_ordering(spectrum(rho), alphas, beta, tol);
}

struct MonotonicityReport {
  bool monotone = true;
  std::vector<double> alphas;
  std::vector<double> values;
  /// Largest S_{a_{k+1}} - S_{a_k}; positive values above tol are violations.
  double worst_increase = -std::numeric_limits<double>::infinity();
};

inline MonotonicityReport entropy_monotone_in_alpha(const RealVector& probs, const std::vector<RenyiOrder>& grid,
                                                    double tol = kTol.structural) {
  MonotonicityReport r;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (k > 0 && !(grid[k].alpha() > grid[k - 1].alpha())) throw std::invalid_argument("alpha grid must be ascending");
    r.alphas.push_back(grid[k].alpha());
    r.values.push_back(renyi_entropy(probs, grid[k]));
    if (k > 0) {
      const double inc = r.values[k] - r.values[k - 1];
      r.worst_increase = std::max(r.worst_increase, inc);
      if (inc > tol) r.monotone = false;
    }
  }
  return r;
}

inline MonotonicityReport entropy_monotone_in_alpha(const DensityMatrix& rho, const std::vector<RenyiOrder>& grid,
                                                    double tol = kTol.structural) {
  return entropy_monotone_in_alpha(spectrum(rho), grid, tol);
}

}  // namespace ergolab
