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
#include "maxmin/system_model.hpp"

#include <vector>

namespace maxmin {

struct DecoderSet {
    std::vector<CMatrix> W; ///< W_i is d_i x L_i
};

struct RateVector {
    std::vector<double> R;

    double min() const;
};

// All rates are reported in instance.config.log_base.

/// Gamma_i + sum_{j != i} H_ji V_j V_j^H H_ji^H.
CMatrix interference_noise_cov(const SystemInstance& instance, const PrecoderSet& v, int i);
CMatrix interference_noise_cov(const SystemInstance& instance, const CovarianceSet& q, int i);

/// W_i = V_i^H H_ii^H (sum_j H_ji V_j V_j^H H_ji^H + Gamma_i)^{-1}.
CMatrix lmmse_decoder(const SystemInstance& instance, const PrecoderSet& v, int i);
DecoderSet lmmse_decoders(const SystemInstance& instance, const PrecoderSet& v);

/// Rate of user i under an arbitrary linear decoder W_i (d_i x L_i).
/// Throws DegenerateDecoderError when W_i C W_i^H is singular.
double rate_with_decoder(const SystemInstance& instance, const PrecoderSet& v, const CMatrix& w, int i);

/// log det(I + V_i^H H_ii^H C_i^{-1} H_ii V_i).
double rate_lmmse(const SystemInstance& instance, const PrecoderSet& v, int i);

/// log det(I + H_ii Q_i H_ii^H C_i^{-1}) with C_i built from the other covariances.
double rate_from_cov(const SystemInstance& instance, const CovarianceSet& q, int i);

/// log det(U^H B_i^{-1} U) with B_i the lifted block built from the factors Vtilde_j
/// (any Vtilde_j with Vtilde_j Vtilde_j^H = Q_j works).
double rate_schur(const SystemInstance& instance, const std::vector<CMatrix>& vtilde, int i);

RateVector rates_from_cov(const SystemInstance& instance, const CovarianceSet& q);

double min_rate(const SystemInstance& instance, const CovarianceSet& q);

namespace detail {

/// Covariance-form rate in nats against an explicit noise matrix (used by the robust module).
double cov_rate_nats(const PairGrid<CMatrix>& h, const CMatrix& noise, const CovarianceSet& q, int i);

void check_precoders(const SystemInstance& instance, const PrecoderSet& v);
void check_covariances(const SystemInstance& instance, const CovarianceSet& q);

} // namespace detail

} // namespace maxmin
