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

// Dense Hermitian eigensolvers backed by LAPACK divide-and-conquer.

#pragma once

#include <complex>

#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif
#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#include <lapacke.h>

#include "ergolab/core.hpp"

namespace ergolab {

struct RealEigensystem {
  RealVector values;  // ascending
  RealMatrix vectors;  // columns
};

struct ComplexEigensystem {
  RealVector values;  // ascending
  Matrix vectors;  // columns
};

/// Full decomposition of a real symmetric matrix (consumed).
inline RealEigensystem symmetric_eigen(RealMatrix a, bool with_vectors = true) {
  const auto n = static_cast<lapack_int>(a.rows());
  if (a.rows() != a.cols()) throw StructuralError("symmetric_eigen: matrix must be square");
  RealEigensystem out;
  out.values.resize(n);
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, with_vectors ? 'V' : 'N', 'U', n, a.data(), n, out.values.data());
  if (info != 0) throw NumericalError("dsyevd failed with info " + std::to_string(info));
  if (with_vectors) out.vectors = std::move(a);
  return out;
}

/// Full decomposition of a complex Hermitian matrix (consumed).
inline ComplexEigensystem hermitian_eigen(Matrix a, bool with_vectors = true) {
  const auto n = static_cast<lapack_int>(a.rows());
  if (a.rows() != a.cols()) throw StructuralError("hermitian_eigen: matrix must be square");
  ComplexEigensystem out;
  out.values.resize(n);
  const lapack_int info =
      LAPACKE_zheevd(LAPACK_COL_MAJOR, with_vectors ? 'V' : 'N', 'U', n, a.data(), n, out.values.data());
  if (info != 0) throw NumericalError("zheevd failed with info " + std::to_string(info));
  if (with_vectors) out.vectors = std::move(a);
  return out;
}

}  // namespace ergolab
