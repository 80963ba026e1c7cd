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

#include "maxmin/subproblem.hpp"

#include "maxmin/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace maxmin {

namespace {

/// Real inner product <a, b> = Re(a^H b) of two vectors in their real embedding.
double rdot(const CVector& a, const CVector& b) {
    return a.dot(b).real();
}

constexpr int kMaxHalvings = 80;
constexpr double kCenteringTol = 1e-8;
constexpr double kSwitchGap = 1e-2;
constexpr double kInteriorShrink = 0.999;
constexpr double kFloorStep = 1e-6;

bool finite_vector(const CVector& v) {
    return v.array().isFinite().all();
}

/// Iterate of the primal-dual method: primal (x, t), multipliers (lambda, nu) and the
/// constraint values c_i <= 0 (minorizer rows) and d_j <= 0 (power rows).
struct Iterate {
    std::vector<CVector> x;
    double t = 0.0;
    std::vector<double> lambda;
    std::vector<double> nu;
    std::vector<double> c;
    std::vector<double> d;
};

struct Direction {
    std::vector<CVector> dx;
    double dt = 0.0;
    std::vector<double> dlambda;
    std::vector<double> dnu;
};

class PrimalDual {
  public:
    explicit PrimalDual(const MinorizerCoefficients& coeffs) : k_(coeffs), n_(coeffs.users()) {
        free_.resize(n_);
        for (int j = 0; j < n_; ++j) {
            free_[j] = k_.p[j] > 0.0 && k_.b[j].size() > 0;
        }
    }

    int constraint_count() const {
        return n_ + static_cast<int>(std::count(free_.begin(), free_.end(), true));
    }

    bool is_free(int j) const { return free_[j]; }

    /// Strictly feasible start: x0 pulled inside the power balls and t centered for
    /// the barrier weight tau, i.e. sum_i 1 / (g_i(x0) - t) = tau.
    Iterate start(const std::vector<CVector>& x0, double tau) const {
        Iterate it;
        it.x.resize(n_);
        for (int j = 0; j < n_; ++j) {
            if (!free_[j]) {
                it.x[j] = CVector::Zero(k_.b[j].size());
                continue;
            }
            it.x[j] = x0[j];
            const double norm2 = it.x[j].squaredNorm();
            const double cap = kInteriorShrink * k_.p[j];
            if (norm2 > cap) {
                it.x[j] *= std::sqrt(cap / norm2);
            }
        }
        it.t = 0.0;
        evaluate(it);
        // c_i = t - g_i(x0) at t = 0.
        double top = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n_; ++i) {
            top = std::min(top, -it.c[i]);
        }
        // Centering equation in the slack s = top - t: increasing t shrinks every slack.
        auto excess = [&](double slack) {
            double acc = 0.0;
            for (int i = 0; i < n_; ++i) {
                acc += 1.0 / (-it.c[i] - (top - slack));
            }
            return acc - tau;
        };
        double lo = 1e-12;
        double hi = std::max(1.0, static_cast<double>(n_) / tau);
        while (excess(hi) > 0.0) {
            hi *= 2.0;
        }
        for (int k = 0; k < 200 && hi - lo > 1e-14 * hi; ++k) {
            const double mid = 0.5 * (lo + hi);
            (excess(mid) > 0.0 ? lo : hi) = mid;
        }
        it.t = top - hi;
        evaluate(it);
        it.lambda.resize(n_);
        it.nu.assign(n_, 0.0);
        center_multipliers(it, tau);
        return it;
    }

    void evaluate(Iterate& it) const {
        it.c.resize(n_);
        it.d.resize(n_);
        for (int i = 0; i < n_; ++i) {
            double acc = k_.C[i] + 2.0 * rdot(k_.b[i], it.x[i]) + it.t;
            for (int j = 0; j < n_; ++j) {
                if (it.x[j].size() > 0) {
                    acc += k_.G[j][i].value(it.x[j]);
                }
            }
            it.c[i] = acc;
        }
        for (int j = 0; j < n_; ++j) {
            it.d[j] = free_[j] ? it.x[j].squaredNorm() - k_.p[j] : -1.0;
        }
    }

    bool strictly_feasible(const Iterate& it) const {
        for (int i = 0; i < n_; ++i) {
            if (!(it.c[i] < 0.0) || (free_[i] && !(it.d[i] < 0.0))) {
                return false;
            }
        }
        return true;
    }

    /// Surrogate duality gap -f^T lambda.
    double gap(const Iterate& it) const {
        double g = 0.0;
        for (int i = 0; i < n_; ++i) {
            g -= it.c[i] * it.lambda[i];
            if (free_[i]) {
                g -= it.d[i] * it.nu[i];
            }
        }
        return g;
    }

    /// Constraint gradients u[i][j] = d c_i / d x_j (complex form of the real gradient).
    std::vector<std::vector<CVector>> gradients(const Iterate& it) const {
        std::vector<std::vector<CVector>> u(n_, std::vector<CVector>(n_));
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < n_; ++j) {
                if (!free_[j]) {
                    continue;
                }
                u[i][j] = 2.0 * k_.G[j][i].apply(it.x[j]);
                if (i == j) {
                    u[i][j] += 2.0 * k_.b[i];
                }
            }
        }
        return u;
    }

    /// Dual residual: gradient of the Lagrangian of `minimize -t`.
    void dual_residual(const Iterate& it, const std::vector<std::vector<CVector>>& u, std::vector<CVector>& rx,
                       double& rt) const {
        rx.assign(n_, CVector());
        rt = -1.0;
        for (int i = 0; i < n_; ++i) {
            rt += it.lambda[i];
        }
        for (int j = 0; j < n_; ++j) {
            if (!free_[j]) {
                continue;
            }
            rx[j] = 2.0 * it.nu[j] * it.x[j];
            for (int i = 0; i < n_; ++i) {
                rx[j] += it.lambda[i] * u[i][j];
            }
        }
    }

    /// Squared norm of the full residual (dual and centrality) at barrier parameter tau.
    double residual_norm2(const Iterate& it, double tau) const {
        const auto u = gradients(it);
        std::vector<CVector> rx;
        double rt = 0.0;
        dual_residual(it, u, rx, rt);
        double acc = rt * rt;
        for (int j = 0; j < n_; ++j) {
            if (free_[j]) {
                acc += rx[j].squaredNorm();
                const double rc = -it.nu[j] * it.d[j] - 1.0 / tau;
                acc += rc * rc;
            }
        }
        for (int i = 0; i < n_; ++i) {
            const double rc = -it.lambda[i] * it.c[i] - 1.0 / tau;
            acc += rc * rc;
        }
        return acc;
    }

    double dual_residual_norm(const Iterate& it) const {
        const auto u = gradients(it);
        std::vector<CVector> rx;
        double rt = 0.0;
        dual_residual(it, u, rx, rt);
        double acc = rt * rt;
        for (int j = 0; j < n_; ++j) {
            if (free_[j]) {
                acc += rx[j].squaredNorm();
            }
        }
        return std::sqrt(acc);
    }

    /// Primal-dual Newton direction at barrier parameter tau.
    ///
    /// The reduced system is blockdiag(D_j, 0) + sum_i w_i a_i a_i^T with a_i = (u_i; 1),
    /// w_i = lambda_i / -c_i and D_j = embed(I (x) A_j) + beta_j xi_j xi_j^T, where
    /// A_j = sum_i 2 lambda_i K_ji + 2 nu_j I and beta_j = 4 nu_j / -d_j. Each D_j is
    /// inverted blockwise with a rank-one update; the low-rank part leaves an
    /// (N+1)-sized bordered system.
    Direction direction(const Iterate& it, double tau) const {
        const auto u = gradients(it);

        // Right-hand side: minus the gradient of the barrier at tau.
        std::vector<CVector> rhs(n_);
        double rhs_t = 1.0;
        for (int i = 0; i < n_; ++i) {
            rhs_t -= 1.0 / (tau * -it.c[i]);
        }
        for (int j = 0; j < n_; ++j) {
            if (!free_[j]) {
                continue;
            }
            rhs[j] = -2.0 * it.x[j] / (tau * -it.d[j]);
            for (int i = 0; i < n_; ++i) {
                rhs[j] -= u[i][j] / (tau * -it.c[i]);
            }
        }

        std::vector<Eigen::LLT<CMatrix>> factor(n_);
        std::vector<CVector> px(n_);
        std::vector<double> beta(n_, 0.0);
        std::vector<double> denom(n_, 1.0);
        for (int j = 0; j < n_; ++j) {
            if (!free_[j]) {
                continue;
            }
            const Eigen::Index m = k_.G[j][0].factor.rows();
            CMatrix a = CMatrix::Identity(m, m) * (2.0 * it.nu[j]);
            for (int i = 0; i < n_; ++i) {
                a += k_.G[j][i].factor * (2.0 * it.lambda[i]);
            }
            a = linalg::hermitize(a);
            factor[j].compute(a);
            double jitter = 1e-14 * std::max(1.0, a.diagonal().real().cwiseAbs().maxCoeff());
            while (factor[j].info() != Eigen::Success) {
                if (jitter > 1e-6) {
                    throw SolverError("interior-point Hessian block lost positive definiteness");
                }
                a.diagonal().array() += jitter;
                factor[j].compute(a);
                jitter *= 100.0;
            }
            beta[j] = 4.0 * it.nu[j] / -it.d[j];
            px[j] = apply_block_inverse(factor[j], j, it.x[j]);
            denom[j] = 1.0 + beta[j] * rdot(it.x[j], px[j]);
        }
        auto d_inverse = [&](int j, const CVector& r) {
            CVector pr = apply_block_inverse(factor[j], j, r);
            pr -= px[j] * (beta[j] * rdot(it.x[j], pr) / denom[j]);
            return pr;
        };

        std::vector<std::vector<CVector>> du(n_, std::vector<CVector>(n_));
        std::vector<CVector> dr(n_);
        for (int j = 0; j < n_; ++j) {
            if (!free_[j]) {
                continue;
            }
            dr[j] = d_inverse(j, rhs[j]);
            for (int i = 0; i < n_; ++i) {
                du[i][j] = d_inverse(j, u[i][j]);
            }
        }
        RMatrix s = RMatrix::Zero(n_, n_);
        RVector q = RVector::Zero(n_);
        for (int i = 0; i < n_; ++i) {
            s(i, i) = -it.c[i] / it.lambda[i];
            for (int j = 0; j < n_; ++j) {
                if (!free_[j]) {
                    continue;
                }
                q(i) += rdot(u[i][j], dr[j]);
                for (int l = 0; l <= i; ++l) {
                    s(i, l) += rdot(u[i][j], du[l][j]);
                }
            }
        }
        s = RMatrix(s.selfadjointView<Eigen::Lower>());
        Eigen::LDLT<RMatrix> s_fact(s);
        if (s_fact.info() != Eigen::Success) {
            throw SolverError("interior-point Schur system is singular");
        }
        const RVector sq = s_fact.solve(q);
        const RVector s1 = s_fact.solve(RVector::Ones(n_));
        Direction dir;
        dir.dt = (rhs_t - sq.sum()) / s1.sum();
        const RVector v = sq + s1 * dir.dt;

        dir.dx.resize(n_);
        for (int j = 0; j < n_; ++j) {
            if (!free_[j]) {
                dir.dx[j] = CVector::Zero(it.x[j].size());
                continue;
            }
            dir.dx[j] = dr[j];
            for (int i = 0; i < n_; ++i) {
                dir.dx[j] -= du[i][j] * v(i);
            }
        }

        // Multiplier steps from the linearized centrality condition.
        dir.dlambda.resize(n_);
        dir.dnu.assign(n_, 0.0);
        for (int i = 0; i < n_; ++i) {
            double df = dir.dt;
            for (int j = 0; j < n_; ++j) {
                if (free_[j]) {
                    df += rdot(u[i][j], dir.dx[j]);
                }
            }
            dir.dlambda[i] = (-it.lambda[i] * it.c[i] - 1.0 / tau - it.lambda[i] * df) / it.c[i];
            if (free_[i]) {
                const double dd = 2.0 * rdot(it.x[i], dir.dx[i]);
                dir.dnu[i] = (-it.nu[i] * it.d[i] - 1.0 / tau - it.nu[i] * dd) / it.d[i];
            }
        }
        if (!std::isfinite(dir.dt)) {
            throw SolverError("non-finite interior-point direction");
        }
        return dir;
    }

    /// Sets the multipliers to their central-path values at tau.
    void center_multipliers(Iterate& it, double tau) const {
        for (int i = 0; i < n_; ++i) {
            it.lambda[i] = 1.0 / (tau * -it.c[i]);
            it.nu[i] = free_[i] ? 1.0 / (tau * -it.d[i]) : 0.0;
        }
    }

    /// Log-barrier merit -tau t - sum log(-f_k).
    double barrier_value(const Iterate& it, double tau) const {
        double phi = -tau * it.t;
        for (int i = 0; i < n_; ++i) {
            phi -= std::log(-it.c[i]);
            if (free_[i]) {
                phi -= std::log(-it.d[i]);
            }
        }
        return phi;
    }

    /// Directional derivative of the barrier merit along dir.
    double barrier_slope(const Iterate& it, const Direction& dir, double tau) const {
        const auto u = gradients(it);
        double slope = -tau * dir.dt;
        for (int i = 0; i < n_; ++i) {
            slope += dir.dt / -it.c[i];
        }
        for (int j = 0; j < n_; ++j) {
            if (!free_[j]) {
                continue;
            }
            CVector g = 2.0 * it.x[j] / -it.d[j];
            for (int i = 0; i < n_; ++i) {
                g += u[i][j] / -it.c[i];
            }
            slope += rdot(g, dir.dx[j]);
        }
        return slope;
    }

    Iterate advance(const Iterate& it, const Direction& dir, double step) const {
        Iterate next;
        next.x.resize(n_);
        for (int j = 0; j < n_; ++j) {
            next.x[j] = it.x[j] + step * dir.dx[j];
        }
        next.t = it.t + step * dir.dt;
        next.lambda.resize(n_);
        next.nu.resize(n_);
        for (int i = 0; i < n_; ++i) {
            next.lambda[i] = it.lambda[i] + step * dir.dlambda[i];
            next.nu[i] = it.nu[i] + step * dir.dnu[i];
        }
        evaluate(next);
        return next;
    }

  private:
    CVector apply_block_inverse(const Eigen::LLT<CMatrix>& llt, int j, const CVector& r) const {
        const Eigen::Index m = k_.G[j][0].factor.rows();
        const Eigen::Index reps = r.size() / m;
        const CMatrix y = llt.solve(Eigen::Map<const CMatrix>(r.data(), m, reps));
        return Eigen::Map<const CVector>(y.data(), y.size());
    }

    const MinorizerCoefficients& k_;
    int n_;
    std::vector<bool> free_;
};
} // namespace

CVector KronQuadratic::apply(const CVector& x) const {
    const Eigen::Index m = factor.rows();
    const CMatrix y = factor * Eigen::Map<const CMatrix>(x.data(), m, reps);
    return Eigen::Map<const CVector>(y.data(), y.size());
}

double KronQuadratic::value(const CVector& x) const {
    return x.dot(apply(x)).real();
}

CMatrix KronQuadratic::dense() const {
    const Eigen::Index m = factor.rows();
    CMatrix out = CMatrix::Zero(m * reps, m * reps);
    for (int r = 0; r < reps; ++r) {
        out.block(r * m, r * m, m, m) = factor;
    }
    return out;
}

std::vector<double> minorizer_value(const MinorizerCoefficients& coeffs, const std::vector<CVector>& x) {
    const int n = coeffs.users();
    if (static_cast<int>(x.size()) != n) {
        throw DimensionError("minorizer_value: wrong number of blocks");
    }
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) {
        double acc = -coeffs.C[i] - 2.0 * coeffs.b[i].dot(x[i]).real();
        for (int j = 0; j < n; ++j) {
            acc -= coeffs.G[j][i].value(x[j]);
        }
        g[i] = acc;
    }
    return g;
}

void audit_convexity(const MinorizerCoefficients& coeffs) {
    const int n = coeffs.users();
    if (n < 1) {
        throw InputError("subproblem: no users");
    }
    if (static_cast<int>(coeffs.b.size()) != n || static_cast<int>(coeffs.p.size()) != n ||
        static_cast<int>(coeffs.G.size()) != n) {
        throw DimensionError("subproblem: C, b, G and p disagree on the user count");
    }
    for (int j = 0; j < n; ++j) {
        const std::string tag = std::to_string(j + 1);
        if (!std::isfinite(coeffs.C[j]) || !finite_vector(coeffs.b[j])) {
            throw InputError("subproblem: non-finite C or b for user " + tag);
        }
        if (!std::isfinite(coeffs.p[j]) || coeffs.p[j] < 0.0) {
            throw InputError("subproblem: power budget of user " + tag + " must be finite and >= 0");
        }
        if (static_cast<int>(coeffs.G[j].size()) != n) {
            throw DimensionError("subproblem: G row " + tag + " has wrong length");
        }
        const KronQuadratic& first = coeffs.G[j][0];
        for (int i = 0; i < n; ++i) {
            const KronQuadratic& g = coeffs.G[j][i];
            if (g.factor.rows() != first.factor.rows() || g.reps != first.reps ||
                g.factor.rows() != g.factor.cols() || g.size() != coeffs.b[j].size()) {
                throw DimensionError("subproblem: G block (" + tag + "," + std::to_string(i + 1) +
                                     ") does not match the size of x_" + tag);
            }
            if (!g.factor.array().isFinite().all()) {
                throw InputError("subproblem: non-finite G block");
            }
            if (!linalg::is_hermitian(g.factor, 1e-10)) {
                throw InputError("subproblem: G block is not Hermitian");
            }
            if (linalg::min_eigenvalue(g.factor) < -1e-9) {
                throw InputError("subproblem: G block (" + tag + "," + std::to_string(i + 1) +
                                 ") is not positive semidefinite");
            }
        }
    }
}

RVector embed_vector(const CVector& x) {
    RVector xi(2 * x.size());
    xi.head(x.size()) = x.real();
    xi.tail(x.size()) = x.imag();
    return xi;
}

CVector unembed_vector(const RVector& xi) {
    const Eigen::Index n = xi.size() / 2;
    CVector x(n);
    x.real() = xi.head(n);
    x.imag() = xi.tail(n);
    return x;
}

RMatrix embed_matrix(const CMatrix& a) {
    const Eigen::Index r = a.rows();
    const Eigen::Index c = a.cols();
    RMatrix out(2 * r, 2 * c);
    out.topLeftCorner(r, c) = a.real();
    out.topRightCorner(r, c) = -a.imag();
    out.bottomLeftCorner(r, c) = a.imag();
    out.bottomRightCorner(r, c) = a.real();
    return out;
}

RealQcqp embed_real(const MinorizerCoefficients& coeffs) {
    const int n = coeffs.users();
    RealQcqp out;
    out.C = coeffs.C;
    out.p = coeffs.p;
    for (const auto& b : coeffs.b) {
        out.beta.push_back(embed_vector(b));
    }
    out.G.assign(n, std::vector<RMatrix>(n));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            out.G[j][i] = embed_matrix(coeffs.G[j][i].dense());
        }
    }
    return out;
}

QcqpSolution solve(const MinorizerCoefficients& coeffs, const SolverOptions& options) {
    std::vector<CVector> zero;
    for (const auto& b : coeffs.b) {
        zero.push_back(CVector::Zero(b.size()));
    }
    return solve(coeffs, zero, options);
}

QcqpSolution solve(const MinorizerCoefficients& coeffs, const std::vector<CVector>& start,
                   const SolverOptions& options) {
    audit_convexity(coeffs);
    const int n = coeffs.users();
    if (static_cast<int>(start.size()) != n) {
        throw DimensionError("subproblem: start point has the wrong number of blocks");
    }
    for (int j = 0; j < n; ++j) {
        if (start[j].size() != coeffs.b[j].size() || !finite_vector(start[j])) {
            throw DimensionError("subproblem: start block " + std::to_string(j + 1) + " is malformed");
        }
    }

    const PrimalDual pd(coeffs);
    const double m = static_cast<double>(pd.constraint_count());
    const double inner_tol = 0.1 * options.tol;
    int steps = 0;

    // Barrier phase: follow the central path with damped Newton steps on the barrier
    // merit until the duality gap is moderate.
    double tau = 1.0 / options.mu0;
    Iterate it = pd.start(start, tau);
    while (steps < options.max_newton_steps && m / tau > kSwitchGap) {
        for (;;) {
            if (steps >= options.max_newton_steps) {
                break;
            }
            pd.center_multipliers(it, tau);
            const Direction dir = pd.direction(it, tau);
            const double slope = pd.barrier_slope(it, dir, tau);
            if (-slope / 2.0 <= kCenteringTol) {
                break;
            }
            ++steps;
            const double phi0 = pd.barrier_value(it, tau);
            bool accepted = false;
            double step = 1.0;
            for (int h = 0; h < kMaxHalvings; ++h, step *= 0.5) {
                Iterate next = pd.advance(it, dir, step);
                if (pd.strictly_feasible(next) &&
                    pd.barrier_value(next, tau) <= phi0 + options.armijo * step * slope) {
                    it = std::move(next);
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                break;
            }
        }
        tau *= options.mu_factor;
    }
    pd.center_multipliers(it, tau / options.mu_factor);

    // Primal-dual phase: superlinear convergence from the neighbourhood of the path.
    for (; steps < options.max_newton_steps; ++steps) {
        const double eta = pd.gap(it);
        if (eta <= inner_tol && pd.dual_residual_norm(it) <= inner_tol) {
            break;
        }
        const double tau_pd = options.mu_factor * m / eta;
        const Direction dir = pd.direction(it, tau_pd);

        double step = 1.0;
        for (int i = 0; i < n; ++i) {
            if (dir.dlambda[i] < 0.0) {
                step = std::min(step, -it.lambda[i] / dir.dlambda[i]);
            }
            if (pd.is_free(i) && dir.dnu[i] < 0.0) {
                step = std::min(step, -it.nu[i] / dir.dnu[i]);
            }
        }
        step *= 0.99;
        const double r0 = std::sqrt(pd.residual_norm2(it, tau_pd));
        bool accepted = false;
        for (int h = 0; h < kMaxHalvings; ++h, step *= 0.5) {
            Iterate next = pd.advance(it, dir, step);
            if (pd.strictly_feasible(next) &&
                std::sqrt(pd.residual_norm2(next, tau_pd)) <= (1.0 - options.armijo * step) * r0) {
                it = std::move(next);
                accepted = true;
                break;
            }
        }
        if (!accepted || step < kFloorStep) {
            // Numerical floor reached.
            break;
        }
    }

    QcqpSolution sol;
    sol.iterations = steps;
    sol.multipliers.lambda = it.lambda;
    sol.multipliers.nu.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
        if (pd.is_free(j)) {
            sol.multipliers.nu[j] = it.nu[j];
        }
    }
    sol.x = it.x;
    // Tighten t onto the binding constraint; never return less than the start point.
    const auto g = minorizer_value(coeffs, sol.x);
    sol.t = *std::min_element(g.begin(), g.end());
    std::vector<CVector> fallback = start;
    for (int j = 0; j < n; ++j) {
        if (coeffs.p[j] <= 0.0 || start[j].squaredNorm() > coeffs.p[j]) {
            fallback[j].setZero();
        }
    }
    const auto g0 = minorizer_value(coeffs, fallback);
    const double t0 = *std::min_element(g0.begin(), g0.end());
    if (t0 > sol.t) {
        sol.x = std::move(fallback);
        sol.t = t0;
    }
    sol.kkt_residual = kkt_residual(coeffs, sol.x, sol.t, sol.multipliers);
    sol.converged = sol.kkt_residual <= options.tol;
    return sol;
}

double kkt_residual(const MinorizerCoefficients& coeffs, const std::vector<CVector>& x, double t,
                    const QcqpMultipliers& multipliers) {
    const int n = coeffs.users();
    if (static_cast<int>(multipliers.lambda.size()) != n || static_cast<int>(multipliers.nu.size()) != n ||
        static_cast<int>(x.size()) != n) {
        throw DimensionError("kkt_residual: multiplier or block count mismatch");
    }
    const auto& lambda = multipliers.lambda;
    const auto& nu = multipliers.nu;
    const auto g = minorizer_value(coeffs, x);
    double res = 0.0;
    double lambda_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double c = -g[i] + t;
        const double d = x[i].squaredNorm() - coeffs.p[i];
        res = std::max({res, c, d, -lambda[i], -nu[i], std::abs(lambda[i] * c), std::abs(nu[i] * d)});
        lambda_sum += lambda[i];
    }
    res = std::max(res, std::abs(1.0 - lambda_sum));
    for (int j = 0; j < n; ++j) {
        if (coeffs.p[j] <= 0.0 || x[j].size() == 0) {
            continue;
        }
        CVector r = 2.0 * nu[j] * x[j] + 2.0 * lambda[j] * coeffs.b[j];
        for (int i = 0; i < n; ++i) {
            r += 2.0 * lambda[i] * coeffs.G[j][i].apply(x[j]);
        }
        res = std::max({res, r.real().cwiseAbs().maxCoeff(), r.imag().cwiseAbs().maxCoeff()});
    }
    return res;
}

} // namespace maxmin
