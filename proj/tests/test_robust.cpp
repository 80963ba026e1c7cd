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

#include "maxmin/mm_core.hpp"
#include "maxmin/oracles.hpp"
#include "maxmin/rates.hpp"
#include "maxmin/robust.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace maxmin;
using maxmin::testing::close_rel;

namespace {

double spectral_norm(const CMatrix& a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es((a + a.adjoint()) / 2.0);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double min_eig(const CMatrix& a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es((a + a.adjoint()) / 2.0);
    return es.eigenvalues().minCoeff();
}

/// Random model with per-pair rho and sigma2 and per-receiver zeta around random noise.
UncertaintyModel random_model(Rng& rng, const SystemInstance& inst) {
    UncertaintyModel m = UncertaintyModel::nominal(inst);
    for (int j = 0; j < inst.users(); ++j) {
        for (int i = 0; i < inst.users(); ++i) {
            m.rho[j][i] = 0.5 + 0.5 * rng.uniform();
            m.sigma2[j][i] = 0.5 + rng.uniform();
        }
    }
    for (int i = 0; i < inst.users(); ++i) {
        m.zeta[i] = 0.4 * rng.uniform();
    }
    return m;
}

MmOptions quick(double eps, int iters, std::uint64_t seed = 1) {
    MmOptions o;
    o.epsilon = eps;
    o.max_iters = iters;
    o.init_seed = seed;
    o.compute_stationarity = false;
    return o;
}

std::vector<double> robust_rates_nats(const UncertaintyModel& m, SystemInstance inst, const std::vector<CMatrix>& x) {
    inst.config.log_base = LogBase::natural;
    CovarianceSet q;
    for (const auto& f : x) {
        q.Q.push_back(f * f.adjoint());
    }
    return robust_rates(m, inst, q).R;
}

} // namespace

TEST_CASE("worst-case noise") {
    Rng rng(51);
    const CMatrix g = maxmin::testing::random_pd(rng, 3);
    CHECK(worst_case_noise(g, 0.0) == g);
    CHECK((worst_case_noise(CMatrix::Identity(2, 2), 0.25) - 1.25 * CMatrix::Identity(2, 2)).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<CMatrix> a(g);
    Eigen::SelfAdjointEigenSolver<CMatrix> b(worst_case_noise(g, 0.7));
    CHECK((b.eigenvalues() - a.eigenvalues() - RVector::Constant(3, 0.7)).norm() <= 1e-12);
}

TEST_CASE("effective noise covariance") {
    SystemInstance scalar = maxmin::testing::scalar_instance({{1.0}}, {2.0});
    UncertaintyModel perfect = UncertaintyModel::nominal(scalar);
    const CovarianceSet q2{{CMatrix::Constant(1, 1, 2.0)}};
    CHECK(effective_noise_cov(perfect, scalar, q2, 0) == scalar.Gamma[0]);

    const UncertaintyModel m = UncertaintyModel::uniform(scalar, 0.8, 1.0, 0.25);
    CHECK(m.error_variance(0, 0) == doctest::Approx(0.36));
    CHECK(effective_noise_cov(m, scalar, q2, 0)(0, 0).real() == doctest::Approx(1.97).epsilon(1e-14));

    Rng rng(52);
    for (int trial = 0; trial < 10; ++trial) {
        const SystemInstance inst = maxmin::testing::random_instance(rng, 3, 3);
        const UncertaintyModel rm = random_model(rng, inst);
        const CovarianceSet q = maxmin::testing::random_covariances(rng, inst);
        for (int i = 0; i < 3; ++i) {
            const Eigen::Index l = inst.Gamma[i].rows();
            CMatrix naive = rm.Gamma_hat[i] + rm.zeta[i] * CMatrix::Identity(l, l);
            for (int j = 0; j < 3; ++j) {
                const double e = (1.0 - rm.rho[j][i] * rm.rho[j][i]) * rm.sigma2[j][i];
                naive += e * q.Q[j].trace().real() * CMatrix::Identity(l, l);
            }
            CHECK((effective_noise_cov(rm, inst, q, i) - naive).norm() <= 1e-12 * naive.norm());
        }
    }
}

TEST_CASE("estimation-error expectation") {
    Rng rng(53);
    const CMatrix v = rng.cscg_matrix(2, 2);
    CHECK(error_expectation_check(0.6, 1.0, CMatrix::Zero(2, 2), 2, 100, rng).norm() == 0.0);
    CHECK(error_expectation_check(1.0, 1.0, v, 2, 100, rng).norm() == 0.0);

    const CMatrix empirical = error_expectation_check(0.6, 1.0, v, 2, 100000, rng);
    const CMatrix analytic = 0.64 * (v * v.adjoint()).trace().real() * CMatrix::Identity(2, 2);
    CHECK((empirical - analytic).norm() / analytic.norm() <= 0.05);
}

TEST_CASE("estimated channel statistics") {
    SystemInstance inst = generate_channels(SystemConfig::uniform(1, 200, 200, 0.0, 3));
    const UncertaintyModel m = UncertaintyModel::uniform(inst, 0.6, 2.0, 0.0);
    Rng rng(54);
    const EstimatedChannels ec = draw_estimated_channels(inst, m, rng);
    const double n = static_cast<double>(ec.H_hat[0][0].size());
    CHECK(ec.H_hat[0][0].squaredNorm() / n == doctest::Approx(0.36 * 2.0).epsilon(0.02));
    CHECK(ec.Z[0][0].squaredNorm() / n == doctest::Approx(0.64 * 2.0).epsilon(0.02));
    CHECK(std::abs(ec.H_hat[0][0].cwiseProduct(ec.Z[0][0].conjugate()).sum()) / n <= 0.02);

    // The draw behind Hhat does not depend on rho.
    Rng r1(55);
    Rng r2(55);
    const auto a = draw_estimated_channels(inst, UncertaintyModel::uniform(inst, 0.7, 1.0, 0.0), r1);
    const auto b = draw_estimated_channels(inst, UncertaintyModel::uniform(inst, 0.9, 1.0, 0.0), r2);
    CHECK((a.H_hat[0][0] / 0.7 - b.H_hat[0][0] / 0.9).norm() <= 1e-12 * a.H_hat[0][0].norm());
}

TEST_CASE("noise samples stay in the uncertainty ball") {
    Rng rng(56);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index l = 1 + trial % 4;
        const CMatrix g = maxmin::testing::random_pd(rng, l, 0.1, 2.0);
        const double zeta = 0.5 * rng.uniform();
        const CMatrix s = sample_noise_in_ball(g, zeta, rng);
        CHECK(spectral_norm(s - g) <= zeta + 1e-12);
        CHECK(min_eig(s) >= -1e-12);
        CHECK(min_eig(worst_case_noise(g, zeta) - s) >= -1e-12);
    }
}

TEST_CASE("robust rate") {
    Rng rng(57);
    for (int trial = 0; trial < 20; ++trial) {
        const SystemInstance inst = maxmin::testing::random_instance(rng, 1 + trial % 3, 3);
        const CovarianceSet q = maxmin::testing::random_covariances(rng, inst);
        const UncertaintyModel nominal = UncertaintyModel::nominal(inst);
        for (int i = 0; i < inst.users(); ++i) {
            CHECK(robust_rate(nominal, inst, q, i) == rate_from_cov(inst, q, i));
        }

        UncertaintyModel m = random_model(rng, inst);
        std::fill(m.zeta.begin(), m.zeta.end(), 0.0);
        double prev = robust_min_rate(m, inst, q);
        for (double z : {0.1, 0.3, 0.9}) {
            std::fill(m.zeta.begin(), m.zeta.end(), z);
            const double now = robust_min_rate(m, inst, q);
            CHECK(now <= prev + 1e-12);
            prev = now;
        }
        m = random_model(rng, inst);

        // Any noise covariance in the ball yields at least the worst-case rate.
        for (int i = 0; i < inst.users(); ++i) {
            const double worst = robust_rate(m, inst, q, i);
            CHECK(worst <= rate_from_cov(inst, q, i) + 1e-12);
            for (int s = 0; s < 100; ++s) {
                const CMatrix g = sample_noise_in_ball(m.Gamma_hat[i], m.zeta[i], rng);
                CHECK(robust_rate_with_noise(m, inst, q, i, g) >= worst - 1e-12);
            }
        }
    }
}

TEST_CASE("perfect knowledge reduces to the nominal problem") {
    Rng rng(58);
    const SystemInstance inst = maxmin::testing::random_instance(rng, 3, 3, 12.0);
    const UncertaintyModel m = UncertaintyModel::nominal(inst);
    std::vector<int> k;
    for (int j = 0; j < 3; ++j) {
        k.push_back(inst.tx_antennas(j));
    }
    const std::vector<CMatrix> x = maxmin::testing::random_factors(rng, inst, k);
    std::vector<LiftedBlock> blocks;
    std::vector<CMatrix> f;
    for (int i = 0; i < 3; ++i) {
        const LiftedBlock nb = build_B(inst, x, i);
        blocks.push_back(robust_build_B(m, inst, x, i));
        CHECK((blocks.back().B - nb.B).norm() <= 1e-12);
        f.push_back(build_F(blocks.back()));
    }
    const MinorizerCoefficients a = minorizer_coefficients(inst, blocks, f);
    const MinorizerCoefficients b = robust_minorizer_coefficients(m, inst, blocks, f);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(a.C[i] - b.C[i]) <= 1e-12);
        CHECK((a.b[i] - b.b[i]).norm() <= 1e-12);
        for (int j = 0; j < 3; ++j) {
            CHECK((a.G[j][i].factor - b.G[j][i].factor).norm() <= 1e-12);
        }
    }

    const MmOptions o = quick(1e-3, 300, 4);
    const CovarianceDesign nom = mm_design_covariance(inst, o);
    const CovarianceDesign rob = mm_design_robust(m, inst, o);
    REQUIRE(nom.trace.minrate_history.size() == rob.trace.minrate_history.size());
    for (std::size_t s = 0; s < nom.trace.minrate_history.size(); ++s) {
        CHECK(std::abs(nom.trace.minrate_history[s] - rob.trace.minrate_history[s]) <= 1e-12);
    }
    for (int j = 0; j < 3; ++j) {
        CHECK((nom.Q.Q[j] - rob.Q.Q[j]).norm() <= 1e-12);
    }
}

TEST_CASE("robust quadratic terms") {
    const SystemInstance scalar = maxmin::testing::scalar_instance({{1.0}}, {1.0});
    const UncertaintyModel m = UncertaintyModel::uniform(scalar, 0.8, 1.0, 0.0);
    const std::vector<CMatrix> x{CMatrix::Constant(1, 1, 0.7)};
    const LiftedBlock blk = robust_build_B(m, scalar, x, 0);
    const CMatrix f = build_F(blk);
    const double f22 = f(1, 1).real();
    const MinorizerCoefficients a = minorizer_coefficients(scalar, {blk}, {f});
    const MinorizerCoefficients b = robust_minorizer_coefficients(m, scalar, {blk}, {f});
    CHECK(b.G[0][0].factor(0, 0).real() == doctest::Approx(a.G[0][0].factor(0, 0).real() + 0.36 * f22));
    CHECK(b.C[0] == doctest::Approx(a.C[0]));
}

TEST_CASE("robust minorizer is tangent to and below the worst-case rate") {
    Rng rng(59);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 1 + trial % 3;
        const SystemInstance inst = maxmin::testing::random_instance(rng, n, 3, 15.0);
        const UncertaintyModel m = random_model(rng, inst);
        std::vector<int> k;
        for (int j = 0; j < n; ++j) {
            k.push_back(inst.tx_antennas(j));
        }
        const std::vector<CMatrix> bar = maxmin::testing::random_factors(rng, inst, k);
        std::vector<LiftedBlock> blocks;
        std::vector<CMatrix> f;
        for (int i = 0; i < n; ++i) {
            blocks.push_back(robust_build_B(m, inst, bar, i));
            f.push_back(build_F(blocks.back()));
        }
        const MinorizerCoefficients c = robust_minorizer_coefficients(m, inst, blocks, f);
        const auto g_bar = minorizer_value(c, detail::stack(bar));
        const auto r_bar = robust_rates_nats(m, inst, bar);
        for (int i = 0; i < n; ++i) {
            CHECK(close_rel(g_bar[i], r_bar[i], 1e-9));
        }
        for (int s = 0; s < 100; ++s) {
            const std::vector<CMatrix> x = maxmin::testing::random_factors(rng, inst, k);
            const auto g = minorizer_value(c, detail::stack(x));
            const auto r = robust_rates_nats(m, inst, x);
            for (int i = 0; i < n; ++i) {
                CHECK(g[i] <= r[i] + 1e-9);
            }
        }
    }
}

TEST_CASE("scalar robust design matches the grid oracle") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const SystemInstance inst = generate_channels(SystemConfig::uniform(2, 1, 1, 10.0, 200 + seed));
        const UncertaintyModel m = UncertaintyModel::uniform(inst, 0.8, 1.0, 0.25);
        oracles::ScalarRobustTerms terms;
        terms.error.assign(2, std::vector<double>(2, 0.36));
        terms.zeta = {0.25, 0.25};
        const auto grid = oracles::grid_search_scalar_maxmin(inst, 0.0, &terms);
        const CovarianceDesign d = mm_design_robust(m, inst, quick(1e-3, 500));
        CHECK(std::abs(robust_min_rate(m, inst, d.Q) - grid.minrate) <= 1e-2);
    }
}

TEST_CASE("robust design at the default size") {
    const SystemInstance inst = generate_channels(SystemConfig::uniform(3, 4, 4, 15.0, 21));
    const UncertaintyModel m = UncertaintyModel::uniform(inst, 0.9, 1.0, 0.25);
    const MmOptions o = quick(1e-3, 500, 2);
    const CovarianceDesign rob = mm_design_robust(m, inst, o);
    const CovarianceDesign nom = mm_design_covariance(inst, o);
    CHECK(rob.trace.converged);
    double prev = rob.trace.initial_minrate;
    for (double r : rob.trace.minrate_history) {
        CHECK(r >= prev - 1e-6);
        prev = r;
    }
    CHECK(close_rel(robust_min_rate(m, inst, rob.Q), rob.trace.minrate_history.back(), 1e-9));
    CHECK(robust_min_rate(m, inst, rob.Q) <= min_rate(inst, rob.Q) + 1e-12);
    CHECK(robust_min_rate(m, inst, rob.Q) <= min_rate(inst, nom.Q) + 1e-6);
    CHECK(robust_min_rate(m, inst, nom.Q) <= robust_min_rate(m, inst, rob.Q) + 1e-6);
}

TEST_CASE("loss parameter") {
    CHECK(*loss_parameter(0.7, 0.7) == 0.0);
    CHECK(*loss_parameter(0.5, 1.0) == doctest::Approx(0.5));
    CHECK_FALSE(loss_parameter(0.5, 0.0).has_value());
}

TEST_CASE("uncertainty model validation") {
    const SystemInstance inst = generate_channels(SystemConfig::uniform(2, 2, 2, 0.0, 1));
    CHECK_NOTHROW(UncertaintyModel::uniform(inst, 0.5, 1.0, 0.1).validate(inst));
    CHECK_THROWS_AS(UncertaintyModel::uniform(inst, 1.5, 1.0, 0.1).validate(inst), InputError);
    CHECK_THROWS_AS(UncertaintyModel::uniform(inst, 0.5, 0.0, 0.1).validate(inst), InputError);
    CHECK_THROWS_AS(UncertaintyModel::uniform(inst, 0.5, 1.0, -0.1).validate(inst), InputError);
    UncertaintyModel short_model = UncertaintyModel::nominal(inst);
    short_model.zeta.pop_back();
    CHECK_THROWS_AS(short_model.validate(inst), InputError);
}
