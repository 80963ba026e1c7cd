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

#include "maxmin/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace maxmin::oracles {

namespace {

double in_base(double nats, LogBase base) {
    return base == LogBase::base2 ? nats / std::log(2.0) : nats;
}

CMatrix inverse_sqrt(const CMatrix& a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (a + a.adjoint()));
    const RVector inv = es.eigenvalues().cwiseSqrt().cwiseInverse();
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

/// min x^H A x + 2 Re(c^H x) over ||x||^2 <= p.
CVector trust_region(const CMatrix& a, const CVector& c, double p) {
    const Eigen::Index n = c.size();
    if (n == 0 || p <= 0.0 || c.norm() == 0.0) {
        return CVector::Zero(n);
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (a + a.adjoint()));
    const RVector lam = es.eigenvalues();
    const CVector ch = es.eigenvectors().adjoint() * c;
    const double tiny = 1e-13 * std::max(1.0, lam.cwiseAbs().maxCoeff());
    const double ctiny = 1e-13 * c.norm();

    auto norm2 = [&](double nu) {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            const double den = lam(k) + nu;
            if (den <= tiny) {
                if (std::abs(ch(k)) > ctiny) {
                    return std::numeric_limits<double>::infinity();
                }
                continue;
            }
            acc += std::norm(ch(k)) / (den * den);
        }
        return acc;
    };

    double nu = 0.0;
    if (!(norm2(0.0) <= p)) {
        double lo = 0.0;
        double hi = c.norm() / std::sqrt(p);
        while (norm2(hi) > p) {
            hi *= 2.0;
        }
        for (int it = 0; it < 300 && hi - lo > 1e-16 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (norm2(mid) > p ? lo : hi) = mid;
        }
        nu = hi;
    }
    CVector xh(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double den = lam(k) + nu;
        xh(k) = den <= tiny ? std::complex<double>(0.0) : -ch(k) / den;
    }
    CVector x = es.eigenvectors() * xh;
    const double nx = x.squaredNorm();
    if (nx > p) {
        x *= std::sqrt(p / nx);
    }
    return x;
}

CMatrix kron_dense(const KronQuadratic& q) {
    const Eigen::Index m = q.factor.rows();
    CMatrix out = CMatrix::Zero(m * q.reps, m * q.reps);
    for (int r = 0; r < q.reps; ++r) {
        out.block(r * m, r * m, m, m) = q.factor;
    }
    return out;
}

std::vector<double> surrogate_values(const MinorizerCoefficients& k, const std::vector<CVector>& x) {
    const int n = static_cast<int>(k.C.size());
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) {
        double acc = -k.C[i] - 2.0 * k.b[i].dot(x[i]).real();
        for (int j = 0; j < n; ++j) {
            acc -= x[j].dot(kron_dense(k.G[j][i]) * x[j]).real();
        }
        g[i] = acc;
    }
    return g;
}

double min_of(const std::vector<double>& v) {
    return *std::min_element(v.begin(), v.end());
}

/// Maximizer of sum_i lambda_i g_i(x) over the power balls.
std::vector<CVector> inner_maximizer(const MinorizerCoefficients& k, const std::vector<double>& lambda) {
    const int n = static_cast<int>(k.C.size());
    std::vector<CVector> x(n);
    for (int j = 0; j < n; ++j) {
        const Eigen::Index sz = k.b[j].size();
        CMatrix a = CMatrix::Zero(sz, sz);
        for (int i = 0; i < n; ++i) {
            a += lambda[i] * kron_dense(k.G[j][i]);
        }
        x[j] = trust_region(a, lambda[j] * k.b[j], k.p[j]);
    }
    return x;
}

double dual_value(const std::vector<double>& lambda, const std::vector<double>& g) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        acc += lambda[i] * g[i];
    }
    return acc;
}

std::vector<double> project_simplex(std::vector<double> v) {
    std::vector<double> s = v;
    std::sort(s.begin(), s.end(), std::greater<>());
    double cum = 0.0;
    double theta = 0.0;
    for (std::size_t r = 0; r < s.size(); ++r) {
        cum += s[r];
        const double cand = (cum - 1.0) / static_cast<double>(r + 1);
        if (s[r] - cand > 0.0) {
            theta = cand;
        }
    }
    for (auto& x : v) {
        x = std::max(0.0, x - theta);
    }
    return v;
}

std::vector<CVector> mix(const std::vector<CVector>& a, const std::vector<CVector>& b, double theta) {
    std::vector<CVector> out(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        out[j] = theta * a[j] + (1.0 - theta) * b[j];
    }
    return out;
}

} // namespace

WaterfillingResult waterfilling_single_user(const CMatrix& h, const CMatrix& gamma, double p, LogBase base) {
    const Eigen::Index m = h.cols();
    WaterfillingResult out;
    out.Q = CMatrix::Zero(m, m);
    const CMatrix hw = inverse_sqrt(gamma) * h;
    const CMatrix a = hw.adjoint() * hw;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (a + a.adjoint()));
    // Descending order.
    const RVector lam_asc = es.eigenvalues();
    const CMatrix u_asc = es.eigenvectors();
    RVector lam(m);
    CMatrix u(m, m);
    for (Eigen::Index k = 0; k < m; ++k) {
        lam(k) = lam_asc(m - 1 - k);
        u.col(k) = u_asc.col(m - 1 - k);
    }
    out.gains = lam;
    out.powers = RVector::Zero(m);
    const double floor = 1e-12 * std::max(1.0, lam.size() > 0 ? lam(0) : 0.0);
    Eigen::Index positive = 0;
    while (positive < m && lam(positive) > floor) {
        ++positive;
    }
    if (positive == 0 || p <= 0.0) {
        return out;
    }
    double level = 0.0;
    Eigen::Index active = positive;
    for (Eigen::Index r = positive; r >= 1; --r) {
        double inv_sum = 0.0;
        for (Eigen::Index k = 0; k < r; ++k) {
            inv_sum += 1.0 / lam(k);
        }
        const double mu = (p + inv_sum) / static_cast<double>(r);
        if (mu > 1.0 / lam(r - 1)) {
            level = mu;
            active = r;
            break;
        }
    }
    double cap = 0.0;
    for (Eigen::Index k = 0; k < active; ++k) {
        out.powers(k) = level - 1.0 / lam(k);
        cap += std::log1p(lam(k) * out.powers(k));
    }
    out.water_level = level;
    out.Q = u * out.powers.cast<std::complex<double>>().asDiagonal() * u.adjoint();
    out.capacity = in_base(cap, base);
    return out;
}

double scalar_minrate(const SystemInstance& instance, const std::vector<double>& q,
                      const ScalarRobustTerms* robust) {
    const int n = static_cast<int>(instance.p.size());
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        double noise = instance.Gamma[i](0, 0).real();
        if (robust) {
            noise += robust->zeta[i];
        }
        for (int j = 0; j < n; ++j) {
            if (robust) {
                noise += robust->error[j][i] * q[j];
            }
            if (j != i) {
                noise += std::norm(instance.H[j][i](0, 0)) * q[j];
            }
        }
        const double r = std::log1p(std::norm(instance.H[i][i](0, 0)) * q[i] / noise);
        worst = std::min(worst, r);
    }
    return in_base(worst, instance.config.log_base);
}

GridSearchResult grid_search_scalar_maxmin(const SystemInstance& instance, double grid_step,
                                           const ScalarRobustTerms* robust) {
    const int n = static_cast<int>(instance.p.size());
    if (n < 1 || n > 3) {
        throw InputError("grid search supports 1 to 3 users");
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (instance.H[j][i].rows() != 1 || instance.H[j][i].cols() != 1) {
                throw DimensionError("grid search requires scalar channels");
            }
        }
    }
    std::vector<std::vector<double>> grids(n);
    for (int j = 0; j < n; ++j) {
        const double p = instance.p[j];
        const double step = grid_step > 0.0 ? grid_step : p / 200.0;
        if (p <= 0.0) {
            grids[j] = {0.0};
            continue;
        }
        for (int k = 0; k * step < p - 1e-12 * p; ++k) {
            grids[j].push_back(k * step);
        }
        grids[j].push_back(p);
    }
    GridSearchResult best;
    best.minrate = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> q(n);
    for (;;) {
        for (int j = 0; j < n; ++j) {
            q[j] = grids[j][idx[j]];
        }
        const double r = scalar_minrate(instance, q, robust);
        if (r > best.minrate) {
            best.minrate = r;
            best.q = q;
        }
        int pos = 0;
        while (pos < n && ++idx[pos] == grids[pos].size()) {
            idx[pos] = 0;
            ++pos;
        }
        if (pos == n) {
            break;
        }
    }
    return best;
}

QcqpOracleResult projected_subgradient_qcqp(const MinorizerCoefficients& coeffs, int iters) {
    const int n = static_cast<int>(coeffs.C.size());
    if (n < 1 || iters < 1) {
        throw InputError("qcqp oracle: need at least one user and one iteration");
    }
    QcqpOracleResult out;
    if (n == 1) {
        out.lambda = {1.0};
        out.x = inner_maximizer(coeffs, out.lambda);
        out.t = surrogate_values(coeffs, out.x)[0];
        out.dual_bound = out.t;
        return out;
    }
    if (n == 2) {
        auto at = [&](double s) { return std::vector<double>{s, 1.0 - s}; };
        auto slope = [&](const std::vector<CVector>& x) {
            const auto g = surrogate_values(coeffs, x);
            return g[0] - g[1];
        };
        double lo = 0.0;
        double hi = 1.0;
        std::vector<CVector> x_lo = inner_maximizer(coeffs, at(lo));
        std::vector<CVector> x_hi = inner_maximizer(coeffs, at(hi));
        if (slope(x_lo) >= 0.0) {
            hi = lo;
            x_hi = x_lo;
        } else if (slope(x_hi) <= 0.0) {
            lo = hi;
            x_lo = x_hi;
        } else {
            for (int it = 0; it < iters && hi - lo > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                auto x_mid = inner_maximizer(coeffs, at(mid));
                if (slope(x_mid) < 0.0) {
                    lo = mid;
                    x_lo = std::move(x_mid);
                } else {
                    hi = mid;
                    x_hi = std::move(x_mid);
                }
            }
        }
        // min_i g_i is concave along the segment between the two maximizers.
        auto objective = [&](double theta) { return min_of(surrogate_values(coeffs, mix(x_lo, x_hi, theta))); };
        double a = 0.0;
        double b = 1.0;
        for (int it = 0; it < 200; ++it) {
            const double m1 = a + (b - a) / 3.0;
            const double m2 = b - (b - a) / 3.0;
            if (objective(m1) < objective(m2)) {
                a = m1;
            } else {
                b = m2;
            }
        }
        const double theta = 0.5 * (a + b);
        out.x = mix(x_lo, x_hi, theta);
        out.t = objective(theta);
        for (const double cand : {0.0, 1.0}) {
            if (objective(cand) > out.t) {
                out.x = mix(x_lo, x_hi, cand);
                out.t = objective(cand);
            }
        }
        out.lambda = at(0.5 * (lo + hi));
        out.dual_bound = dual_value(out.lambda, surrogate_values(coeffs, inner_maximizer(coeffs, out.lambda)));
        return out;
    }

    if (n == 3) {
        // lambda = (a, b, 1 - a - b); the partial minimum over b is convex in a.
        auto phi = [&](double a, double b) {
            const std::vector<double> l{a, b, std::max(0.0, 1.0 - a - b)};
            return dual_value(l, surrogate_values(coeffs, inner_maximizer(coeffs, l)));
        };
        auto golden = [](double lo, double hi, int steps, const auto& f) {
            const double r = 0.5 * (std::sqrt(5.0) - 1.0);
            double x1 = hi - r * (hi - lo);
            double x2 = lo + r * (hi - lo);
            double f1 = f(x1);
            double f2 = f(x2);
            for (int it = 0; it < steps && hi - lo > 1e-13; ++it) {
                if (f1 <= f2) {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - r * (hi - lo);
                    f1 = f(x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + r * (hi - lo);
                    f2 = f(x2);
                }
            }
            return 0.5 * (lo + hi);
        };
        const int steps = std::max(1, std::min(iters, 90));
        auto best_b = [&](double a) { return golden(0.0, 1.0 - a, steps, [&](double b) { return phi(a, b); }); };
        const double a = golden(0.0, 1.0, steps, [&](double a) { return phi(a, best_b(a)); });
        const double b = best_b(a);
        out.lambda = {a, b, std::max(0.0, 1.0 - a - b)};
        out.x = inner_maximizer(coeffs, out.lambda);
        const auto g = surrogate_values(coeffs, out.x);
        out.t = min_of(g);
        out.dual_bound = dual_value(out.lambda, g);
        return out;
    }

    std::vector<double> lambda(n, 1.0 / n);
    std::vector<CVector> avg;
    double weight = 0.0;
    out.t = -std::numeric_limits<double>::infinity();
    out.dual_bound = std::numeric_limits<double>::infinity();
    for (int it = 0; it < iters; ++it) {
        const auto x = inner_maximizer(coeffs, lambda);
        const auto g = surrogate_values(coeffs, x);
        const double dual = dual_value(lambda, g);
        if (dual < out.dual_bound) {
            out.dual_bound = dual;
            out.lambda = lambda;
        }
        if (min_of(g) > out.t) {
            out.t = min_of(g);
            out.x = x;
        }
        const double mean = std::accumulate(g.begin(), g.end(), 0.0) / n;
        double spread = 0.0;
        for (double gi : g) {
            spread = std::max(spread, std::abs(gi - mean));
        }
        const double alpha = 0.1 / (std::sqrt(static_cast<double>(it + 1)) * std::max(1.0, spread));
        if (avg.empty()) {
            avg = x;
            for (auto& v : avg) {
                v *= alpha;
            }
        } else {
            for (int j = 0; j < n; ++j) {
                avg[j] += alpha * x[j];
            }
        }
        weight += alpha;
        std::vector<CVector> mean_x = avg;
        for (auto& v : mean_x) {
            v /= weight;
        }
        const double ergodic = min_of(surrogate_values(coeffs, mean_x));
        if (ergodic > out.t) {
            out.t = ergodic;
            out.x = mean_x;
        }
        for (int i = 0; i < n; ++i) {
            lambda[i] -= alpha * g[i];
        }
        lambda = project_simplex(lambda);
    }
    return out;
}

double naive_rate_nats(const PairGrid<CMatrix>& h, const std::vector<CMatrix>& gamma,
                       const std::vector<CMatrix>& q, int i) {
    const int n = static_cast<int>(q.size());
    CMatrix c = gamma[i];
    for (int j = 0; j < n; ++j) {
        if (j != i) {
            c += h[j][i] * q[j] * h[j][i].adjoint();
        }
    }
    const Eigen::Index l = c.rows();
    const CMatrix m = CMatrix::Identity(l, l) + h[i][i] * q[i] * h[i][i].adjoint() * c.inverse();
    return std::log(std::abs(m.determinant()));
}

} // namespace maxmin::oracles
