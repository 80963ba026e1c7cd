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

#include "maxmin/system_model.hpp"

#include "maxmin/linalg.hpp"

#include <cmath>
#include <sstream>

namespace maxmin {

namespace {

std::string user_item(const char* what, int i) {
    std::ostringstream os;
    os << what << "_" << (i + 1);
    return os.str();
}

bool all_finite(const CMatrix& m) {
    return m.array().isFinite().all();
}

} // namespace

SystemConfig SystemConfig::uniform(int users, int tx_antennas, int rx_antennas, double snr_db,
                                   std::uint64_t seed) {
    SystemConfig c;
    c.N = users;
    c.M.assign(users, tx_antennas);
    c.L.assign(users, rx_antennas);
    c.snr_db = snr_db;
    c.seed = seed;
    return c;
}

void SystemConfig::validate() const {
    if (N < 1) {
        throw InputError("config: N must be >= 1");
    }
    if (static_cast<int>(M.size()) != N || static_cast<int>(L.size()) != N) {
        throw InputError("config: M and L must each list N antenna counts");
    }
    for (int i = 0; i < N; ++i) {
        if (M[i] < 1 || L[i] < 1) {
            throw InputError("config: antenna counts must be >= 1 (" + user_item("user", i) + ")");
        }
    }
    if (!(epsilon > 0.0)) {
        throw InputError("config: epsilon must be > 0");
    }
    if (max_iters < 1) {
        throw InputError("config: max_iters must be >= 1");
    }
    if (!std::isfinite(snr_db)) {
        throw InputError("config: snr_db must be finite");
    }
}

PrecoderSet PrecoderSet::from_matrices(std::vector<CMatrix> v) {
    PrecoderSet out;
    out.d.reserve(v.size());
    for (const auto& m : v) {
        out.d.push_back(static_cast<int>(m.cols()));
    }
    out.V = std::move(v);
    return out;
}

CovarianceSet PrecoderSet::covariances() const {
    CovarianceSet q;
    q.Q.reserve(V.size());
    for (const auto& v : V) {
        q.Q.push_back(linalg::hermitize(v * v.adjoint()));
    }
    return q;
}

double power_from_snr(double snr_db, const CMatrix& gamma) {
    return std::pow(10.0, snr_db / 10.0) * gamma.trace().real() / static_cast<double>(gamma.rows());
}

SystemInstance generate_channels(const SystemConfig& config, Rng& rng) {
    config.validate();
    const int n = config.N;
    SystemInstance inst;
    inst.config = config;
    inst.H.assign(n, std::vector<CMatrix>(n));
    inst.Gamma.resize(n);
    inst.p.resize(n);
    for (int i = 0; i < n; ++i) {
        Rng user_rng = rng.split(static_cast<std::uint64_t>(i));
        for (int j = 0; j < n; ++j) {
            inst.H[j][i] = user_rng.cscg_matrix(config.L[i], config.M[j]);
        }
        inst.Gamma[i] = CMatrix::Identity(config.L[i], config.L[i]);
        inst.p[i] = power_from_snr(config.snr_db, inst.Gamma[i]);
    }
    return inst;
}

SystemInstance generate_channels(const SystemConfig& config) {
    Rng rng(config.seed);
    return generate_channels(config, rng);
}

std::vector<std::string> validate(const SystemInstance& instance) {
    std::vector<std::string> out;
    const int n = static_cast<int>(instance.p.size());
    if (n < 1) {
        out.emplace_back("instance has no users");
        return out;
    }
    if (static_cast<int>(instance.Gamma.size()) != n || static_cast<int>(instance.H.size()) != n) {
        out.emplace_back("H, Gamma and p disagree on the user count");
        return out;
    }
    for (int i = 0; i < n; ++i) {
        const CMatrix& g = instance.Gamma[i];
        const std::string name = user_item("Gamma", i);
        if (g.rows() != g.cols() || g.rows() < 1) {
            out.push_back(name + " is not a nonempty square matrix");
            continue;
        }
        if (!all_finite(g)) {
            out.push_back(name + " has non-finite entries");
            continue;
        }
        if (!linalg::is_hermitian(g, 1e-12)) {
            out.push_back(name + " is not Hermitian");
        } else if (!(linalg::min_eigenvalue(g) > 0.0)) {
            out.push_back(name + " is not positive definite");
        }
        if (!std::isfinite(instance.p[i]) || instance.p[i] < 0.0) {
            out.push_back(user_item("p", i) + " must be finite and >= 0");
        }
    }
    for (int j = 0; j < n; ++j) {
        if (static_cast<int>(instance.H[j].size()) != n) {
            out.push_back("H row " + std::to_string(j + 1) + " has wrong length");
            continue;
        }
    }
    if (!out.empty()) {
        return out;
    }
    for (int j = 0; j < n; ++j) {
        const Eigen::Index mj = instance.H[j][j].cols();
        for (int i = 0; i < n; ++i) {
            const CMatrix& h = instance.H[j][i];
            std::ostringstream name;
            name << "H_" << (j + 1) << (i + 1);
            if (h.rows() != instance.Gamma[i].rows() || h.cols() != mj || mj < 1) {
                out.push_back(name.str() + " has shape inconsistent with L_i x M_j");
            } else if (!all_finite(h)) {
                out.push_back(name.str() + " has non-finite entries");
            }
        }
    }
    return out;
}

std::vector<std::string> validate(const SystemInstance& instance, const CovarianceSet& q) {
    std::vector<std::string> out;
    const int n = instance.users();
    if (static_cast<int>(q.Q.size()) != n) {
        out.emplace_back("covariance set has wrong user count");
        return out;
    }
    for (int i = 0; i < n; ++i) {
        const CMatrix& m = q.Q[i];
        const std::string name = user_item("Q", i);
        if (m.rows() != instance.tx_antennas(i) || m.cols() != m.rows()) {
            out.push_back(name + " must be M_i x M_i");
            continue;
        }
        if (!all_finite(m)) {
            out.push_back(name + " has non-finite entries");
            continue;
        }
        if (!linalg::is_hermitian(m, 1e-10)) {
            out.push_back(name + " is not Hermitian");
        } else if (linalg::min_eigenvalue(m) < -1e-10) {
            out.push_back(name + " is not positive semidefinite");
        }
        if (m.trace().real() > instance.p[i] + 1e-8) {
            out.push_back(name + " exceeds the power budget");
        }
    }
    return out;
}

std::vector<std::string> validate(const SystemInstance& instance, const PrecoderSet& v) {
    std::vector<std::string> out;
    const int n = instance.users();
    if (static_cast<int>(v.V.size()) != n || static_cast<int>(v.d.size()) != n) {
        out.emplace_back("precoder set has wrong user count");
        return out;
    }
    for (int i = 0; i < n; ++i) {
        const std::string name = user_item("V", i);
        if (v.V[i].rows() != instance.tx_antennas(i) || v.V[i].cols() != v.d[i]) {
            out.push_back(name + " must be M_i x d_i");
            continue;
        }
        if (v.d[i] > instance.tx_antennas(i) || v.d[i] < 0) {
            out.push_back(user_item("d", i) + " must lie in [0, M_i]");
        }
        if (v.V[i].squaredNorm() > instance.p[i] + 1e-8) {
            out.push_back(name + " exceeds the power budget");
        }
    }
    return out;
}

} // namespace maxmin
