// SPDX-License-Identifier: Apache-2.0
//
// maxmin-ic: max-min fair transmit covariance design for MIMO interference channels
// Copyright (C) 2026 The maxmin-ic authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "maxmin/common.hpp"

namespace maxmin::linalg {

/// (A + A^H) / 2.
CMatrix hermitize(const CMatrix& a);

bool is_hermitian(const CMatrix& a, double tol);

/// Smallest eigenvalue of the Hermitian part of `a`; +inf for an empty matrix.
double min_eigenvalue(const CMatrix& a);

/// log det of a Hermitian positive definite matrix via its Cholesky factor, in nats.
/// Throws SolverError when the factorization fails.
double logdet_pd(const CMatrix& a);

/// Solves A X = B for Hermitian positive definite A.
CMatrix solve_pd(const CMatrix& a, const CMatrix& b);

/// Column-major stacking of a matrix into a vector.
CVector vec(const CMatrix& a);

/// Inverse of vec for a matrix with `rows` rows.
CMatrix unvec(const CVector& x, Eigen::Index rows);

} // namespace maxmin::linalg
