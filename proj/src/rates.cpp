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

#include "maxmin/rates.hpp"

#include "maxmin/linalg.hpp"
#include "maxmin/mm_core.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace maxmin {

namespace {

void check_user(const SystemInstance& instance, int i) {
    if (i < 0 || i >= instance.users()) {
        throw DimensionError("user index " + std::to_string(i) + " out of range");
    }
}

double report(const SystemInstance& instance, double nats) {
    return from_nats(std::max(0.0, nats), instance.config.log_base);
}

} // namespace

namespace detail {

void check_precoders(const SystemInstance& instance, const PrecoderSet& v) {
    const int n = instance.users();
    if (static_cast<int>(v.V.size()) != n) {
        throw DimensionError("precoder set has " + std::to_string(v.V.size()) + " users, expected " +
                             std::to_string(n));
    }
    for (int j = 0; j < n; ++j) {
        if (v.V[j].rows() != instance.tx_antennas(j)) {
            throw DimensionError("V_" + std::to_string(j + 1) + " must have M_j rows");
        }
    }
}

void check_covariances(const SystemInstance& instance, const CovarianceSet& q) {
    const int n = instance.users();
    if (static_cast<int>(q.Q.size()) != n) {
        throw DimensionError("covariance set has wrong user count");
    }
    for (int j = 0; j < n; ++j) {
        const Eigen::Index m = instance.tx_antennas(j);
        if (q.Q[j].rows() != m || q.Q[j].cols() != m) {
            throw DimensionError("Q_" + std::to_string(j + 1) + " must be M_j x M_j");
        }
    }
}

double cov_rate_nats(const PairGrid<CMatrix>& h, const CMatrix& noise, const CovarianceSet& q, int i) {
    const int n = static_cast<int>(q.Q.size());
    CMatrix c = noise;
    for (int j = 0; j < n; ++j) {
        if (j != i) {
            c.noalias() += h[j][i] * q.Q[j] * h[j][i].adjoint();
        }
    }
    c = linalg::hermitize(c);
    CMatrix total = linalg::hermitize(c + h[i][i] * q.Q[i] * h[i][i].adjoint());
    return linalg::logdet_pd(total) - linalg::logdet_pd(c);
}

} // namespace detail

double RateVector::min() const {
    if (R.empty()) {
        return 0.0;
    }
    return *std::min_element(R.begin(), R.end());
}

CMatrix interference_noise_cov(const SystemInstance& instance, const PrecoderSet& v, int i) {
    check_user(instance, i);
    detail::check_precoders(instance, v);
    CMatrix c = instance.Gamma[i];
    for (int j = 0; j < instance.users(); ++j) {
        if (j == i || v.V[j].cols() == 0) {
            continue;
        }
        const CMatrix hv = instance.H[j][i] * v.V[j];
        c.noalias() += hv * hv.adjoint();
    }
    return linalg::hermitize(c);
}

CMatrix interference_noise_cov(const SystemInstance& instance, const CovarianceSet& q, int i) {
    check_user(instance, i);
    detail::check_covariances(instance, q);
    CMatrix c = instance.Gamma[i];
    for (int j = 0; j < instance.users(); ++j) {
        if (j != i) {
            c.noalias() += instance.H[j][i] * q.Q[j] * instance.H[j][i].adjoint();
        }
    }
    return linalg::hermitize(c);
}

CMatrix lmmse_decoder(const SystemInstance& instance, const PrecoderSet& v, int i) {
    const CMatrix c = interference_noise_cov(instance, v, i);
    const Eigen::Index d = v.V[i].cols();
    if (d == 0) {
        return CMatrix::Zero(0, instance.rx_antennas(i));
    }
    const CMatrix hv = instance.H[i][i] * v.V[i];
    const CMatrix total = linalg::hermitize(c + hv * hv.adjoint());
    // W = (T^{-1} H V)^H since T is Hermitian.
    return linalg::solve_pd(total, hv).adjoint();
}

DecoderSet lmmse_decoders(const SystemInstance& instance, const PrecoderSet& v) {
    DecoderSet out;
    for (int i = 0; i < instance.users(); ++i) {
        out.W.push_back(lmmse_decoder(instance, v, i));
    }
    return out;
}

double rate_with_decoder(const SystemInstance& instance, const PrecoderSet& v, const CMatrix& w, int i) {
    const CMatrix c = interference_noise_cov(instance, v, i);
    const Eigen::Index d = v.V[i].cols();
    if (d == 0) {
        return 0.0;
    }
    if (w.rows() != d || w.cols() != instance.rx_antennas(i)) {
        throw DimensionError("decoder W_" + std::to_string(i + 1) + " must be d_i x L_i");
    }
    const CMatrix a = w * instance.H[i][i] * v.V[i];
    const CMatrix wcw = linalg::hermitize(w * c * w.adjoint());
    Eigen::LLT<CMatrix> llt(wcw);
    if (llt.info() != Eigen::Success || linalg::min_eigenvalue(wcw) <= 0.0) {
        throw DegenerateDecoderError("W_" + std::to_string(i + 1) + " C W^H is singular");
    }
    const CMatrix total = linalg::hermitize(wcw + a * a.adjoint());
    return report(instance, linalg::logdet_pd(total) - linalg::logdet_pd(wcw));
}

double rate_lmmse(const SystemInstance& instance, const PrecoderSet& v, int i) {
    const CMatrix c = interference_noise_cov(instance, v, i);
    const Eigen::Index d = v.V[i].cols();
    if (d == 0) {
        return 0.0;
    }
    const CMatrix hv = instance.H[i][i] * v.V[i];
    const CMatrix gram = CMatrix::Identity(d, d) + hv.adjoint() * linalg::solve_pd(c, hv);
    return report(instance, linalg::logdet_pd(linalg::hermitize(gram)));
}

double rate_from_cov(const SystemInstance& instance, const CovarianceSet& q, int i) {
    check_user(instance, i);
    detail::check_covariances(instance, q);
    return report(instance, detail::cov_rate_nats(instance.H, instance.Gamma[i], q, i));
}

double rate_schur(const SystemInstance& instance, const std::vector<CMatrix>& vtilde, int i) {
    check_user(instance, i);
    const LiftedBlock block = build_B(instance, vtilde, i);
    const Eigen::Index k = block.k();
    const CMatrix y = linalg::solve_pd(block.B, block.U());
    const CMatrix s = linalg::hermitize(y.topRows(k));
    return report(instance, linalg::logdet_pd(s));
}

RateVector rates_from_cov(const SystemInstance& instance, const CovarianceSet& q) {
    detail::check_covariances(instance, q);
    RateVector out;
    out.R.reserve(instance.users());
    for (int i = 0; i < instance.users(); ++i) {
        out.R.push_back(report(instance, detail::cov_rate_nats(instance.H, instance.Gamma[i], q, i)));
    }
    return out;
}

double min_rate(const SystemInstance& instance, const CovarianceSet& q) {
    return rates_from_cov(instance, q).min();
}

} // namespace maxmin
