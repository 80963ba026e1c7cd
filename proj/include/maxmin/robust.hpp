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
#include "maxmin/mm_core.hpp"
#include "maxmin/rates.hpp"
#include "maxmin/rng.hpp"
#include "maxmin/system_model.hpp"

#include <optional>
#include <vector>

namespace maxmin {

/// Imperfect channel and noise knowledge.
///
/// The true channel is H_ji = Hhat_ji + Z_ji with Hhat_ji and Z_ji independent and
/// entrywise CSCG with variances rho_ji^2 sigma2_ji and (1 - rho_ji^2) sigma2_ji. The
/// noise covariance lies in the spectral-norm ball ||Gamma_i - Gamma_hat_i||_2 <= zeta_i.
struct UncertaintyModel {
    PairGrid<double> rho;    ///< [j][i], in [0, 1]
    PairGrid<double> sigma2; ///< [j][i], > 0
    std::vector<double> zeta;
    std::vector<CMatrix> Gamma_hat;

    int users() const { return static_cast<int>(zeta.size()); }

    /// (1 - rho_ji^2) sigma2_ji.
    double error_variance(int j, int i) const;

    /// rho = 1, sigma2 = 1, zeta = 0 around the instance's noise covariances.
    static UncertaintyModel nominal(const SystemInstance& instance);

    /// The same rho, sigma2 and zeta for every pair, centred on the instance's noise.
    static UncertaintyModel uniform(const SystemInstance& instance, double rho, double sigma2, double zeta);

    /// Throws InputError on out-of-range values or sizes that disagree with `instance`.
    void validate(const SystemInstance& instance) const;
};

struct EstimatedChannels {
    PairGrid<CMatrix> H_hat;
    PairGrid<CMatrix> Z;
};

/// Draws (Hhat, Z) with the shapes of `instance.H`. For every pair the unit-variance
/// draw behind Hhat is taken before the one behind Z, so Hhat is a fixed multiple of
/// the same draw across different rho for a given generator state.
EstimatedChannels draw_estimated_channels(const SystemInstance& instance, const UncertaintyModel& model,
                                          Rng& rng);

/// Gamma_hat + zeta I, the Loewner-largest member of the noise uncertainty ball.
CMatrix worst_case_noise(const CMatrix& gamma_hat, double zeta);

/// Random Gamma with ||Gamma - Gamma_hat||_2 <= zeta and Gamma PSD: Gamma_hat + c zeta S
/// for a random Hermitian S with ||S||_2 <= 1 and the largest c in [0, 1] that keeps
/// Gamma PSD.
CMatrix sample_noise_in_ball(const CMatrix& gamma_hat, double zeta, Rng& rng);

/// Gamma_i' + sum_j (1 - rho_ji^2) sigma2_ji tr(Q_j') I with Gamma_i' = Gamma_hat_i + zeta_i I.
CMatrix effective_noise_cov(const UncertaintyModel& model, const SystemInstance& instance_hat,
                            const CovarianceSet& qprime, int i);

/// Monte-Carlo average of Z V V^H Z^H over `samples` draws of an L x M matrix Z with
/// i.i.d. CSCG entries of variance (1 - rho^2) sigma2.
CMatrix error_expectation_check(double rho, double sigma2, const CMatrix& vprime, Eigen::Index rows,
                                int samples, Rng& rng);

/// Worst-case rate R'_i: the rate of user i on the estimated channels with the
/// effective noise covariance, in the instance's log base.
double robust_rate(const UncertaintyModel& model, const SystemInstance& instance_hat,
                   const CovarianceSet& qprime, int i);

/// Lower-bound rate with a specific noise covariance Gamma_i in place of Gamma_i'.
double robust_rate_with_noise(const UncertaintyModel& model, const SystemInstance& instance_hat,
                              const CovarianceSet& qprime, int i, const CMatrix& gamma);

RateVector robust_rates(const UncertaintyModel& model, const SystemInstance& instance_hat,
                        const CovarianceSet& qprime);

double robust_min_rate(const UncertaintyModel& model, const SystemInstance& instance_hat,
                       const CovarianceSet& qprime);

/// Lifted block of the worst-case problem: Gamma_i' and the error terms
/// sum_j (1 - rho_ji^2) sigma2_ji ||X_j||_F^2 I enter the lower-right block.
LiftedBlock robust_build_B(const UncertaintyModel& model, const SystemInstance& instance_hat,
                           const std::vector<CMatrix>& factors, int i);

/// Nominal coefficients with Gamma_i' in C_i and
///   G'_ji = G_ji + (1 - rho_ji^2) sigma2_ji tr((F_i)_22) I.
MinorizerCoefficients robust_minorizer_coefficients(const UncertaintyModel& model,
                                                    const SystemInstance& instance_hat,
                                                    const std::vector<LiftedBlock>& blocks,
                                                    const std::vector<CMatrix>& f);

/// MM design maximizing min_i R'_i over covariances.
CovarianceDesign mm_design_robust(const UncertaintyModel& model, const SystemInstance& instance_hat,
                                  const MmOptions& options);

/// 1 - r_nr / r_r, or nullopt when r_r is zero.
std::optional<double> loss_parameter(double minrate_nonrobust_worstcase, double minrate_robust);

namespace detail {

LiftedProblem robust_problem(const UncertaintyModel& model, const SystemInstance& instance_hat);

} // namespace detail

} // namespace maxmin
