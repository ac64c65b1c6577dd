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
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace ergolab {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr Complex kI{0.0, 1.0};

/// Numerical tolerances shared by every module and test.
struct Tolerances {
  double structural = 1e-10;
  double normalization = 1e-12;
  double hermiticity = 1e-12;
  /// Eigenvalues in [-psd_clamp, 0) are clamped to zero; below is an error.
  double psd_clamp = 1e-10;
  /// Spectral weights below this are dropped from sums with log or alpha < 1.
  double spectrum_cutoff = 1e-14;
  double residual = 1e-8;
  /// Largest dense Hilbert-space dimension any operation will materialize.
  std::size_t dense_dim_guard = std::size_t{1} << 14;
};

inline constexpr Tolerances kTol{};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or dimensions that do not fit together.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Requests outside what an operation supports (e.g. |A| > N - |A|).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Dense memory guard tripped.
class ResourceGuardError : public Error {
 public:
  using Error::Error;
};

/// Inputs that violate a numerical precondition beyond tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Not enough data to carry out a fit.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Worker count, bounded by ERGOLAB_THREADS when set.
inline unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ERGOLAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

/// Runs body(i) for i in [0, n). Each index must write only its own output
/// slot; reductions happen afterwards in index order, so results do not
/// depend on the worker count.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

inline std::size_t checked_pow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t k = 0; k < exp; ++k) {
    if (r > SIZE_MAX / base) throw StructuralError("dimension overflows the index range");
    r *= base;
  }
  return r;
}

inline bool is_hermitian(const Matrix& m, double tol = kTol.hermiticity) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

inline bool is_real(const Matrix& m, double tol = 0.0) {
  return m.imag().cwiseAbs().maxCoeff() <= tol;
}

/// Operator norm of a Hermitian matrix.
inline double hermitian_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Ordinary least squares y = slope * x + intercept.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_stderr = 0.0;
  std::size_t points = 0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw StructuralError("linear_fit: size mismatch");
  if (x.size() < 2) throw InsufficientDataError("linear_fit: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw InsufficientDataError("linear_fit: degenerate abscissae");
  LinearFit f;
  f.points = x.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ssr += r * r;
  }
  f.r_squared = syy > 0 ? 1.0 - ssr / syy : 1.0;
  f.slope_stderr = x.size() > 2 ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
  return f;
}

}  // namespace ergolab
