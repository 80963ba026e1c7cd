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
#include "maxmin/subproblem.hpp"
#include "maxmin/system_model.hpp"

#include <vector>

// Slow reference solvers for tests. Nothing here calls into the design code; only
// the shared data structures are reused.

namespace maxmin::oracles {

struct WaterfillingResult {
    CMatrix Q;
    double capacity = 0.0;    ///< in the requested log base
    double water_level = 0.0; ///< 1 / nu
    RVector gains;            ///< eigenvalues of H^H Gamma^{-1} H, descending
    RVector powers;           ///< power per eigenmode
};

/// Single-user MIMO capacity by water-filling over the eigenmodes of the whitened channel.
WaterfillingResult waterfilling_single_user(const CMatrix& h, const CMatrix& gamma, double p,
                                            LogBase base = LogBase::base2);

/// Robust terms for the scalar grid: noise_i = gamma_i + zeta_i + sum_j error[j][i] q_j.
struct ScalarRobustTerms {
    PairGrid<double> error;
    std::vector<double> zeta;
};

struct GridSearchResult {
    std::vector<double> q;
    double minrate = 0.0; ///< in the instance's log base
};

/// Exhaustive max-min search over q_i in {0, s, 2s, ..., p_i} for instances with
/// M_i = L_i = 1 and N <= 3. A non-positive step selects p_i / 200 per user.
GridSearchResult grid_search_scalar_maxmin(const SystemInstance& instance, double grid_step = 0.0,
                                           const ScalarRobustTerms* robust = nullptr);

/// Scalar max-min objective at a given power vector (same conventions as the grid).
double scalar_minrate(const SystemInstance& instance, const std::vector<double>& q,
                      const ScalarRobustTerms* robust = nullptr);

struct QcqpOracleResult {
    std::vector<CVector> x;
    double t = 0.0;          ///< min_i g_i(x), a primal value
    double dual_bound = 0.0; ///< dual value at lambda; equals the optimum at the dual minimizer
    std::vector<double> lambda;
};

/// Solves max_x min_i g_i(x) over the power balls through its Lagrange dual over the
/// simplex. For each lambda the inner problem splits into per-user trust-region
/// problems solved by eigendecomposition and bisection on the ball multiplier. The
/// dual is minimized by bisection on the subgradient sign for N = 2, by nested
/// golden-section searches over the simplex for N = 3 and by projected subgradient
/// steps for N >= 4, with `iters` bounding the outer iterations.
QcqpOracleResult projected_subgradient_qcqp(const MinorizerCoefficients& coeffs, int iters);

/// Rate of user i by the textbook formula log det(I + H_ii Q_i H_ii^H C_i^{-1}), in nats.
double naive_rate_nats(const PairGrid<CMatrix>& h, const std::vector<CMatrix>& gamma,
                       const std::vector<CMatrix>& q, int i);

} // namespace maxmin::oracles
