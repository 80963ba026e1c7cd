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

#include <vector>

namespace maxmin {

/// Hermitian PSD quadratic form with Kronecker structure I_reps (x) K, acting on
/// x = vec(X) where X is K.rows() x reps (column-major stacking).
struct KronQuadratic {
    CMatrix factor; ///< K, Hermitian PSD
    int reps = 1;

    Eigen::Index size() const { return factor.rows() * reps; }

    /// (I (x) K) x, computed blockwise without forming the Kronecker product.
    CVector apply(const CVector& x) const;

    /// x^H (I (x) K) x.
    double value(const CVector& x) const;

    CMatrix dense() const;
};

/// Data of one MM subproblem:
///
///   maximize t  s.t.  C_i + 2 Re{b_i^H x_i} + sum_j x_j^H G_ji x_j <= -t,  ||x_i||^2 <= p_i.
///
/// `G[j][i]` is the block acting on x_j inside constraint i. For a fixed j all blocks
/// share the same factor size and repetition count.
struct MinorizerCoefficients {
    std::vector<double> C;
    std::vector<CVector> b;
    PairGrid<KronQuadratic> G;
    std::vector<double> p;

    int users() const { return static_cast<int>(C.size()); }
};

/// Per-user minorizer values g_i(x) = -C_i - 2 Re{b_i^H x_i} - sum_j x_j^H G_ji x_j.
std::vector<double> minorizer_value(const MinorizerCoefficients& coeffs, const std::vector<CVector>& x);

/// Throws InputError on inconsistent sizes, non-finite data or a G block with an
/// eigenvalue below -1e-9.
void audit_convexity(const MinorizerCoefficients& coeffs);

// ----- real embedding -----------------------------------------------------------

/// The same program over xi = [Re x; Im x].
struct RealQcqp {
    std::vector<double> C;
    std::vector<RVector> beta;
    PairGrid<RMatrix> G;
    std::vector<double> p;
};

RVector embed_vector(const CVector& x);
CVector unembed_vector(const RVector& xi);

/// [[Re A, -Im A], [Im A, Re A]].
RMatrix embed_matrix(const CMatrix& a);

RealQcqp embed_real(const MinorizerCoefficients& coeffs);

// ----- solver -------------------------------------------------------------------

struct QcqpMultipliers {
    std::vector<double> lambda; ///< minorizer constraints
    std::vector<double> nu;     ///< power constraints
};

struct QcqpSolution {
    std::vector<CVector> x;
    double t = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0; ///< Newton steps taken
    bool converged = false;
    QcqpMultipliers multipliers;
};

struct SolverOptions {
    double tol = 1e-7;          ///< target on the KKT residual
    int max_newton_steps = 200;
    double mu0 = 1.0;           ///< initial complementarity lambda_k * (-f_k)
    double mu_factor = 10.0;    ///< centering parameter: tau = mu_factor * m / gap
    double armijo = 1e-4;       ///< sufficient decrease of the residual norm
};

/// Interior-point method on the real embedding: damped Newton steps along the
/// log-barrier central path, then primal-dual Newton steps once the duality gap is small.
///
/// Starts from x = 0 with t centered below min_i g_i(0); users with p_i = 0 are pinned
/// at x_i = 0. The Newton system is solved
/// through the block-diagonal plus low-rank structure of the reduced Hessian, so the
/// cost per step is linear in the number of users apart from an (N+1)-sized solve.
/// `converged` reports whether the returned point meets the KKT tolerance.
QcqpSolution solve(const MinorizerCoefficients& coeffs, const SolverOptions& options = {});

/// Warm-started variant. `start` is pulled strictly inside the power balls; the
/// returned t is never below min_i g_i(start) when `start` is feasible.
QcqpSolution solve(const MinorizerCoefficients& coeffs, const std::vector<CVector>& start,
                   const SolverOptions& options = {});

/// Max of stationarity, complementary slackness, primal and dual infeasibility for
/// the program `minimize -t` in standard form. Users with p_j = 0 have their
/// variables fixed at zero and are excluded from the stationarity term.
double kkt_residual(const MinorizerCoefficients& coeffs, const std::vector<CVector>& x, double t,
                    const QcqpMultipliers& multipliers);

} // namespace maxmin
