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

#include <cstdint>
#include <optional>
#include <vector>

namespace maxmin {

/// Lifted block matrix
///
///   B_i = [ I_k          X_i^H H_ii^H                        ]
///         [ H_ii X_i     N_i + sum_j H_ji X_j X_j^H H_ji^H   ]
///
/// with U = [I_k; 0]. Here X_j is a square root of Q_j (covariance design, k = M_i)
/// or the precoder itself (fixed stream design, k = d_i), and N_i is the noise block.
/// The rate of user i equals log det(U^H B_i^{-1} U).
struct LiftedBlock {
    CMatrix B;
    Eigen::Index k_rows = 0;

    Eigen::Index k() const { return k_rows; }
    Eigen::Index l() const { return B.rows() - k_rows; }
    CMatrix U() const;
};

/// Hermitian PSD square root by eigendecomposition; negative eigenvalues are clamped
/// to zero. Throws InputError for a non-Hermitian argument.
CMatrix hermitian_sqrt(const CMatrix& q);

/// B_i for the given factors X_j (each M_j x k_j). Throws SolverError if B_i is not
/// positive definite, which cannot happen for a valid instance.
LiftedBlock build_B(const SystemInstance& instance, const std::vector<CMatrix>& factors, int i);

/// F = B^{-1} U (U^H B^{-1} U)^{-1} U^H B^{-1}, the negated gradient of
/// X -> log det(U^H X^{-1} U) at X = B.
CMatrix build_F(const LiftedBlock& block);

/// Linearization coefficients of every user's rate at the expansion point that
/// produced `blocks`:
///   b_i  = vec(H_ii^H (F_i)_12^H)
///   G_ji = I_{k_j} (x) H_ji^H (F_i)_22 H_ji
///   C_i  = -log det(U^H B_i^{-1} U) - tr(F_i B_i) + tr((F_i)_11) + tr((F_i)_22 Gamma_i)
/// so that g_i(x) = -C_i - 2 Re{b_i^H x_i} - sum_j x_j^H G_ji x_j <= R_i(x), with
/// equality at the expansion point.
MinorizerCoefficients minorizer_coefficients(const SystemInstance& instance,
                                             const std::vector<LiftedBlock>& blocks,
                                             const std::vector<CMatrix>& f);

/// Convenience overload that builds the blocks and F matrices from the factors.
MinorizerCoefficients minorizer_coefficients(const SystemInstance& instance,
                                             const std::vector<CMatrix>& factors);

struct StationarityOptions {
    int directions_per_user = 64;
    std::uint64_t seed = 0x5eed;
    double rank_threshold = 1e-4; ///< eigenvalues below this fraction of the largest span the null space
    double active_tol = 1e-4;     ///< users within this of the minimum rate count as active
};

struct MmOptions {
    double epsilon = 1e-3; ///< stop when |t(k) - t(k-1)| <= epsilon (reported units)
    int max_iters = 500;
    std::uint64_t init_seed = 1;
    SolverOptions solver;
    double monotone_slack = 1e-6;
    bool compute_stationarity = true;
    StationarityOptions stationarity;
    /// Optional starting factors X_j (M_j x k_j); scaled into the power ball if needed.
    std::optional<std::vector<CMatrix>> initial_factors;

    static MmOptions from_config(const SystemConfig& config);
};

struct MmTrace {
    std::vector<double> t_history;       ///< subproblem objective per iteration
    std::vector<double> minrate_history; ///< true min-rate after each iteration
    std::vector<std::vector<double>> rate_history;
    double initial_minrate = 0.0;
    int iterations = 0;
    bool converged = false;
    double stationarity_residual = 0.0;
    int subproblem_nonconverged = 0;
    double runtime_s = 0.0;
};

struct CovarianceDesign {
    CovarianceSet Q;
    std::vector<CMatrix> factors; ///< final X_j with X_j X_j^H = Q_j
    MmTrace trace;
};

struct PrecoderDesign {
    PrecoderSet V;
    MmTrace trace;
};

/// Max-min covariance design: the MM loop over square-root factors X_j of size M_j x M_j.
CovarianceDesign mm_design_covariance(const SystemInstance& instance, const MmOptions& options);

/// Max-min precoder design with given stream lengths d_j (X_j is M_j x d_j).
PrecoderDesign mm_design_precoder_fixed_d(const SystemInstance& instance, const std::vector<int>& d,
                                          const MmOptions& options);

/// Precoders from covariances by eigenvalue thresholding: keep eigenpairs with
/// lambda >= rel_threshold * lambda_max and set V = E sqrt(Lambda).
PrecoderSet extract_precoders(const CovarianceSet& q, double rel_threshold = 1e-8);

/// First-order stationarity diagnostic of the max-min program at Q.
///
/// Samples feasible directions (tangent to the PSD cone, trace non-increasing for
/// users at full power, unit joint Frobenius norm), adds the projected rate gradients
/// of the active users, and returns the largest positive directional derivative of
/// the minimum active rate. Zero certifies that no sampled direction ascends.
double stationarity_residual(const SystemInstance& instance, const CovarianceSet& q,
                             const StationarityOptions& options = {});

namespace detail {

/// Everything the MM machinery needs about the channel: channels, a fixed noise
/// block per receiver and optional power-dependent noise terms
///   N_i(X) = noise_i + sum_j error[j][i] ||X_j||_F^2 I.
/// The nominal problem has no error terms.
struct LiftedProblem {
    PairGrid<CMatrix> H;
    std::vector<CMatrix> noise;
    PairGrid<double> error; ///< empty for the nominal problem
    std::vector<double> p;
    LogBase base = LogBase::base2;

    int users() const { return static_cast<int>(p.size()); }
    double error_coeff(int j, int i) const { return error.empty() ? 0.0 : error[j][i]; }
};

LiftedProblem nominal_problem(const SystemInstance& instance);

LiftedBlock build_block(const LiftedProblem& problem, const std::vector<CMatrix>& factors, int i);

MinorizerCoefficients coefficients(const LiftedProblem& problem, const std::vector<LiftedBlock>& blocks,
                                   const std::vector<CMatrix>& f);

/// Objective rates in nats evaluated in covariance form with Q_j = X_j X_j^H.
std::vector<double> objective_rates_nats(const LiftedProblem& problem, const std::vector<CMatrix>& factors);

/// Rates in nats through the lifted blocks, log det(U^H B_i^{-1} U).
std::vector<double> lifted_rates_nats(const LiftedProblem& problem, const std::vector<CMatrix>& factors);

struct MmRun {
    std::vector<CMatrix> factors;
    MmTrace trace;
};

MmRun run_mm(const LiftedProblem& problem, const std::vector<int>& k, const MmOptions& options);

/// Gradient of R_i (nats) with respect to Q_j, as a Hermitian matrix G with
/// dR_i = Re tr(G dQ_j).
CMatrix rate_gradient(const LiftedProblem& problem, const CovarianceSet& q, int i, int j);

double stationarity_residual(const LiftedProblem& problem, const CovarianceSet& q,
                             const StationarityOptions& options);

std::vector<CMatrix> unstack(const std::vector<CVector>& x, const std::vector<int>& rows);
std::vector<CVector> stack(const std::vector<CMatrix>& factors);

} // namespace detail

} // namespace maxmin
