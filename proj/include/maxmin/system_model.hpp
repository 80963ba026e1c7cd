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

#include <cstdint>
#include <string>
#include <vector>

namespace maxmin {

struct SystemConfig {
    int N = 3;                ///< transmit-receive pairs
    std::vector<int> M{4, 4, 4}; ///< transmit antennas per user
    std::vector<int> L{4, 4, 4}; ///< receive antennas per user
    double snr_db = 15.0;     ///< SNR = L_i p_i / tr(Gamma_i)
    std::uint64_t seed = 1;
    double epsilon = 1e-3;    ///< stop tolerance on |t(k) - t(k-1)|, in reported rate units
    int max_iters = 500;
    LogBase log_base = LogBase::base2;

    /// Same antenna counts for every user.
    static SystemConfig uniform(int users, int tx_antennas, int rx_antennas, double snr_db,
                                std::uint64_t seed = 1);

    /// Throws InputError describing the first violated invariant.
    void validate() const;
};

/// One realization of the N-user MIMO interference channel.
///
/// `H[j][i]` is the L_i x M_j channel from transmitter j to receiver i.
struct SystemInstance {
    SystemConfig config;
    PairGrid<CMatrix> H;
    std::vector<CMatrix> Gamma;
    std::vector<double> p;

    int users() const { return static_cast<int>(p.size()); }
    int tx_antennas(int j) const { return static_cast<int>(H[j][j].cols()); }
    int rx_antennas(int i) const { return static_cast<int>(Gamma[i].rows()); }
};

struct CovarianceSet {
    std::vector<CMatrix> Q;
};

struct PrecoderSet {
    std::vector<CMatrix> V;
    std::vector<int> d;

    static PrecoderSet from_matrices(std::vector<CMatrix> v);
    CovarianceSet covariances() const;
};

/// p = 10^(snr_db/10) tr(Gamma) / L.
double power_from_snr(double snr_db, const CMatrix& gamma);

/// Draws i.i.d. unit-variance CSCG channels with white unit noise and powers from the SNR.
/// Receiver i draws its incoming channels from the substream `rng.split(i)`.
SystemInstance generate_channels(const SystemConfig& config, Rng& rng);

/// Same as above with `Rng(config.seed)`.
SystemInstance generate_channels(const SystemConfig& config);

/// Human-readable list of invariant violations; empty when the instance is well formed.
std::vector<std::string> validate(const SystemInstance& instance);

std::vector<std::string> validate(const SystemInstance& instance, const CovarianceSet& q);

std::vector<std::string> validate(const SystemInstance& instance, const PrecoderSet& v);

} // namespace maxmin
