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

#include "maxmin/robust.hpp"

#include "maxmin/linalg.hpp"
#include "maxmin/rates.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace maxmin {

namespace {

void check_user(const UncertaintyModel& model, int i) {
    if (i < 0 || i >= model.users()) {
        throw InputError("user index " + std::to_string(i) + " out of range");
    }
}

double report(const SystemInstance& instance, double nats) {
    return from_nats(std::max(0.0, nats), instance.config.log_base);
}

/// Gamma' with an arbitrary noise matrix in place of Gamma_hat + zeta I.
CMatrix noise_with_errors(const UncertaintyModel& model, const CovarianceSet& q, int i, CMatrix base) {
    for (int j = 0; j < model.users(); ++j) {
        const double e = model.error_variance(j, i);
        if (e != 0.0) {
            base.diagonal().array() += e * q.Q[j].trace().real();
        }
    }
    return linalg::hermitize(base);
}

} // namespace

double UncertaintyModel::error_variance(int j, int i) const {
    const double r = rho[j][i];
    return (1.0 - r * r) * sigma2[j][i];
}

UncertaintyModel UncertaintyModel::nominal(const SystemInstance& instance) {
    return uniform(instance, 1.0, 1.0, 0.0);
}

UncertaintyModel UncertaintyModel::uniform(const SystemInstance& instance, double rho, double sigma2,
                                           double zeta) {
    const int n = instance.users();
    UncertaintyModel m;
    m.rho.assign(n, std::vector<double>(n, rho));
    m.sigma2.assign(n, std::vector<double>(n, sigma2));
    m.zeta.assign(n, zeta);
    m.Gamma_hat = instance.Gamma;
    return m;
}

void UncertaintyModel::validate(const SystemInstance& instance) const {
    const int n = instance.users();
    if (users() != n || static_cast<int>(rho.size()) != n || static_cast<int>(sigma2.size()) != n ||
        static_cast<int>(Gamma_hat.size()) != n) {
        throw DimensionError("uncertainty model: user count disagrees with the instance");
    }
    for (int j = 0; j < n; ++j) {
        if (static_cast<int>(rho[j].size()) != n || static_cast<int>(sigma2[j].size()) != n) {
            throw DimensionError("uncertainty model: rho and sigma2 must be N x N grids");
        }
        for (int i = 0; i < n; ++i) {
            if (!(rho[j][i] >= 0.0 && rho[j][i] <= 1.0)) {
                throw InputError("uncertainty model: rho must lie in [0, 1]");
            }
            if (!(sigma2[j][i] > 0.0) || !std::isfinite(sigma2[j][i])) {
                throw InputError("uncertainty model: sigma2 must be finite and > 0");
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        const std::string tag = std::to_string(i + 1);
        if (!(zeta[i] >= 0.0) || !std::isfinite(zeta[i])) {
            throw InputError("uncertainty model: zeta_" + tag + " must be finite and >= 0");
        }
        const CMatrix& g = Gamma_hat[i];
        if (g.rows() != instance.rx_antennas(i) || g.cols() != g.rows()) {
            throw DimensionError("uncertainty model: Gamma_hat_" + tag + " must be L_i x L_i");
        }
        if (!linalg::is_hermitian(g, 1e-10 * std::max(1.0, g.cwiseAbs().maxCoeff())) ||
            !(linalg::min_eigenvalue(g) > 0.0)) {
            throw InputError("uncertainty model: Gamma_hat_" + tag + " is not Hermitian positive definite");
        }
    }
}

EstimatedChannels draw_estimated_channels(const SystemInstance& instance, const UncertaintyModel& model,
                                          Rng& rng) {
    model.validate(instance);
    const int n = instance.users();
    EstimatedChannels out;
    out.H_hat.assign(n, std::vector<CMatrix>(n));
    out.Z.assign(n, std::vector<CMatrix>(n));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const Eigen::Index l = instance.H[j][i].rows();
            const Eigen::Index m = instance.H[j][i].cols();
            const double r = model.rho[j][i];
            const double s = std::sqrt(model.sigma2[j][i]);
            const CMatrix g_hat = rng.cscg_matrix(l, m);
            const CMatrix g_err = rng.cscg_matrix(l, m);
            out.H_hat[j][i] = (r * s) * g_hat;
            out.Z[j][i] = (std::sqrt(1.0 - r * r) * s) * g_err;
        }
    }
    return out;
}

CMatrix worst_case_noise(const CMatrix& gamma_hat, double zeta) {
    if (!(zeta >= 0.0)) {
        throw InputError("worst_case_noise: zeta must be >= 0");
    }
    CMatrix out = gamma_hat;
    out.diagonal().array() += zeta;
    return out;
}

CMatrix sample_noise_in_ball(const CMatrix& gamma_hat, double zeta, Rng& rng) {
    const Eigen::Index l = gamma_hat.rows();
    if (zeta == 0.0 || l == 0) {
        return gamma_hat;
    }
    CMatrix s = linalg::hermitize(rng.cscg_matrix(l, l));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(s, Eigen::EigenvaluesOnly);
    const double norm = es.eigenvalues().cwiseAbs().maxCoeff();
    if (norm > 0.0) {
        s *= rng.uniform() / norm;
    }
    auto candidate = [&](double c) { return linalg::hermitize(gamma_hat + (c * zeta) * s); };
    if (linalg::min_eigenvalue(candidate(1.0)) >= 0.0) {
        return candidate(1.0);
    }
    double lo = 0.0;
    double hi = 1.0;
    for (int k = 0; k < 60; ++k) {
        const double mid = 0.5 * (lo + hi);
        (linalg::min_eigenvalue(candidate(mid)) >= 0.0 ? lo : hi) = mid;
    }
    return candidate(lo);
}

CMatrix effective_noise_cov(const UncertaintyModel& model, const SystemInstance& instance_hat,
                            const CovarianceSet& qprime, int i) {
    check_user(model, i);
    detail::check_covariances(instance_hat, qprime);
    return noise_with_errors(model, qprime, i, worst_case_noise(model.Gamma_hat[i], model.zeta[i]));
}

CMatrix error_expectation_check(double rho, double sigma2, const CMatrix& vprime, Eigen::Index rows,
                                int samples, Rng& rng) {
    if (samples < 1) {
        throw InputError("error_expectation_check: samples must be >= 1");
    }
    const double variance = (1.0 - rho * rho) * sigma2;
    CMatrix acc = CMatrix::Zero(rows, rows);
    if (variance == 0.0 || vprime.size() == 0) {
        return acc;
    }
    const CMatrix vv = vprime * vprime.adjoint();
    for (int s = 0; s < samples; ++s) {
        const CMatrix z = rng.cscg_matrix(rows, vprime.rows(), variance);
        acc.noalias() += z * vv * z.adjoint();
    }
    return linalg::hermitize(acc / static_cast<double>(samples));
}

double robust_rate(const UncertaintyModel& model, const SystemInstance& instance_hat,
                   const CovarianceSet& qprime, int i) {
    const CMatrix noise = effective_noise_cov(model, instance_hat, qprime, i);
    return report(instance_hat, detail::cov_rate_nats(instance_hat.H, noise, qprime, i));
}

double robust_rate_with_noise(const UncertaintyModel& model, const SystemInstance& instance_hat,
                              const CovarianceSet& qprime, int i, const CMatrix& gamma) {
    check_user(model, i);
    detail::check_covariances(instance_hat, qprime);
    if (gamma.rows() != instance_hat.rx_antennas(i) || gamma.cols() != gamma.rows()) {
        throw DimensionError("robust_rate_with_noise: Gamma must be L_i x L_i");
    }
    const CMatrix noise = noise_with_errors(model, qprime, i, gamma);
    return report(instance_hat, detail::cov_rate_nats(instance_hat.H, noise, qprime, i));
}

RateVector robust_rates(const UncertaintyModel& model, const SystemInstance& instance_hat,
                        const CovarianceSet& qprime) {
    RateVector out;
    for (int i = 0; i < instance_hat.users(); ++i) {
        out.R.push_back(robust_rate(model, instance_hat, qprime, i));
    }
    return out;
}

double robust_min_rate(const UncertaintyModel& model, const SystemInstance& instance_hat,
                       const CovarianceSet& qprime) {
    return robust_rates(model, instance_hat, qprime).min();
}

LiftedBlock robust_build_B(const UncertaintyModel& model, const SystemInstance& instance_hat,
                           const std::vector<CMatrix>& factors, int i) {
    return detail::build_block(detail::robust_problem(model, instance_hat), factors, i);
}

MinorizerCoefficients robust_minorizer_coefficients(const UncertaintyModel& model,
                                                    const SystemInstance& instance_hat,
                                                    const std::vector<LiftedBlock>& blocks,
                                                    const std::vector<CMatrix>& f) {
    return detail::coefficients(detail::robust_problem(model, instance_hat), blocks, f);
}

CovarianceDesign mm_design_robust(const UncertaintyModel& model, const SystemInstance& instance_hat,
                                  const MmOptions& options) {
    const auto problem = detail::robust_problem(model, instance_hat);
    std::vector<int> k(instance_hat.users());
    for (int j = 0; j < instance_hat.users(); ++j) {
        k[j] = instance_hat.tx_antennas(j);
    }
    auto run = detail::run_mm(problem, k, options);
    CovarianceDesign out;
    for (const auto& x : run.factors) {
        out.Q.Q.push_back(linalg::hermitize(x * x.adjoint()));
    }
    out.factors = std::move(run.factors);
    out.trace = std::move(run.trace);
    return out;
}

std::optional<double> loss_parameter(double minrate_nonrobust_worstcase, double minrate_robust) {
    if (minrate_robust == 0.0) {
        return std::nullopt;
    }
    return 1.0 - minrate_nonrobust_worstcase / minrate_robust;
}

namespace detail {

LiftedProblem robust_problem(const UncertaintyModel& model, const SystemInstance& instance_hat) {
    model.validate(instance_hat);
    LiftedProblem p = nominal_problem(instance_hat);
    const int n = instance_hat.users();
    bool any_error = false;
    for (int i = 0; i < n; ++i) {
        p.noise[i] = model.zeta[i] == 0.0 ? model.Gamma_hat[i] : worst_case_noise(model.Gamma_hat[i], model.zeta[i]);
        for (int j = 0; j < n; ++j) {
            any_error = any_error || model.error_variance(j, i) != 0.0;
        }
    }
    if (any_error) {
        p.error.assign(n, std::vector<double>(n, 0.0));
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                p.error[j][i] = model.error_variance(j, i);
            }
        }
    }
    return p;
}

} // namespace detail

} // namespace maxmin
