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
#include "maxmin/rng.hpp"
#include "maxmin/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace maxmin::testing {

inline bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

/// Random Hermitian positive definite matrix with eigenvalues in [lo, hi].
inline CMatrix random_pd(Rng& rng, Eigen::Index n, double lo = 0.5, double hi = 2.0) {
    Eigen::HouseholderQR<CMatrix> qr(rng.cscg_matrix(n, n));
    const CMatrix u = qr.householderQ();
    RVector eig(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        eig(k) = lo + (hi - lo) * rng.uniform();
    }
    CMatrix a = u * eig.cast<cdouble>().asDiagonal() * u.adjoint();
    return (a + a.adjoint()) / 2.0;
}

/// Random PSD matrix of the given rank scaled to trace `trace`.
inline CMatrix random_psd(Rng& rng, Eigen::Index n, Eigen::Index rank, double trace) {
    const CMatrix g = rng.cscg_matrix(n, rank);
    CMatrix q = g * g.adjoint();
    const double tr = q.trace().real();
    if (tr > 0.0) {
        q *= trace / tr;
    }
    return (q + q.adjoint()) / 2.0;
}

/// Instance with random sizes in [1, max_dim], random CSCG channels and random
/// positive definite noise covariances.
inline SystemInstance random_instance(Rng& rng, int users, int max_dim, double snr_db = 10.0) {
    SystemConfig config;
    config.N = users;
    config.M.assign(users, 1);
    config.L.assign(users, 1);
    for (int i = 0; i < users; ++i) {
        config.M[i] = 1 + static_cast<int>(rng.uniform() * max_dim) % max_dim;
        config.L[i] = 1 + static_cast<int>(rng.uniform() * max_dim) % max_dim;
    }
    config.snr_db = snr_db;
    config.log_base = rng.uniform() < 0.5 ? LogBase::base2 : LogBase::natural;
    SystemInstance inst;
    inst.config = config;
    inst.H.assign(users, std::vector<CMatrix>(users));
    for (int j = 0; j < users; ++j) {
        for (int i = 0; i < users; ++i) {
            inst.H[j][i] = rng.cscg_matrix(config.L[i], config.M[j]);
        }
    }
    for (int i = 0; i < users; ++i) {
        inst.Gamma.push_back(random_pd(rng, config.L[i]));
        inst.p.push_back(power_from_snr(snr_db, inst.Gamma.back()));
    }
    return inst;
}

/// Scalar instance (all M_i = L_i = 1) with the given channel gains h[j][i] and unit noise.
inline SystemInstance scalar_instance(const std::vector<std::vector<double>>& h, const std::vector<double>& p,
                                      LogBase base = LogBase::natural) {
    const int n = static_cast<int>(p.size());
    SystemInstance inst;
    inst.config = SystemConfig::uniform(n, 1, 1, 0.0);
    inst.config.log_base = base;
    inst.H.assign(n, std::vector<CMatrix>(n));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            inst.H[j][i] = CMatrix::Constant(1, 1, cdouble(h[j][i], 0.0));
        }
    }
    for (int i = 0; i < n; ++i) {
        inst.Gamma.push_back(CMatrix::Identity(1, 1));
        inst.p.push_back(p[i]);
    }
    return inst;
}

/// Random covariances with tr(Q_i) uniform in [0, p_i] and random rank.
inline CovarianceSet random_covariances(Rng& rng, const SystemInstance& inst) {
    CovarianceSet q;
    for (int i = 0; i < inst.users(); ++i) {
        const int m = inst.tx_antennas(i);
        const int rank = 1 + static_cast<int>(rng.uniform() * m) % m;
        q.Q.push_back(random_psd(rng, m, rank, inst.p[i] * rng.uniform()));
    }
    return q;
}

/// Random full-column-rank precoders V_i (M_i x d_i) with ||V_i||^2 = p_i. With
/// `decodable` the stream count also stays within L_i, so every W_i C W_i^H is invertible.
inline PrecoderSet random_precoders(Rng& rng, const SystemInstance& inst, bool decodable = true) {
    std::vector<CMatrix> v;
    for (int i = 0; i < inst.users(); ++i) {
        const int m = inst.tx_antennas(i);
        const int cap = decodable ? std::min(m, inst.rx_antennas(i)) : m;
        const int d = 1 + static_cast<int>(rng.uniform() * cap) % cap;
        CMatrix x = rng.cscg_matrix(m, d);
        x *= std::sqrt(inst.p[i]) / x.norm();
        v.push_back(x);
    }
    return PrecoderSet::from_matrices(std::move(v));
}

/// Random factors X_j with ||X_j||^2 <= p_j.
inline std::vector<CMatrix> random_factors(Rng& rng, const SystemInstance& inst, const std::vector<int>& k) {
    std::vector<CMatrix> x;
    for (int j = 0; j < inst.users(); ++j) {
        CMatrix f = rng.cscg_matrix(inst.tx_antennas(j), k[j]);
        f *= std::sqrt(inst.p[j] * rng.uniform()) / f.norm();
        x.push_back(f);
    }
    return x;
}

} // namespace maxmin::testing
