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

#include "maxmin/linalg.hpp"
#include "maxmin/rates.hpp"
#include "maxmin/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace maxmin {

namespace {

struct LiftedTerms {
    CMatrix y;     ///< B^{-1} U
    CMatrix s;     ///< U^H B^{-1} U
    double logdet_s = 0.0;
};

LiftedTerms lifted_terms(const LiftedBlock& block) {
    LiftedTerms out;
    out.y = linalg::solve_pd(block.B, block.U());
    out.s = linalg::hermitize(out.y.topRows(block.k()));
    out.logdet_s = linalg::logdet_pd(out.s);
    return out;
}

CMatrix f_from_terms(const LiftedTerms& terms) {
    if (terms.s.size() == 0) {
        return CMatrix::Zero(terms.y.rows(), terms.y.rows());
    }
    return linalg::hermitize(terms.y * linalg::solve_pd(terms.s, terms.y.adjoint()));
}

double frob2(const CMatrix& x) {
    return x.squaredNorm();
}

std::vector<CMatrix> covariance_factors(const std::vector<CMatrix>& factors) {
    std::vector<CMatrix> q;
    q.reserve(factors.size());
    for (const auto& x : factors) {
        q.push_back(linalg::hermitize(x * x.adjoint()));
    }
    return q;
}

} // namespace

CMatrix LiftedBlock::U() const {
    CMatrix u = CMatrix::Zero(B.rows(), k_rows);
    u.topRows(k_rows).setIdentity();
    return u;
}

CMatrix hermitian_sqrt(const CMatrix& q) {
    if (q.rows() != q.cols()) {
        throw InputError("hermitian_sqrt: matrix is not square");
    }
    if (q.size() == 0) {
        return q;
    }
    const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
    if (!linalg::is_hermitian(q, 1e-10 * scale)) {
        throw InputError("hermitian_sqrt: matrix is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(linalg::hermitize(q));
    const RVector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return linalg::hermitize(es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint());
}

LiftedBlock build_B(const SystemInstance& instance, const std::vector<CMatrix>& factors, int i) {
    return detail::build_block(detail::nominal_problem(instance), factors, i);
}

CMatrix build_F(const LiftedBlock& block) {
    return f_from_terms(lifted_terms(block));
}

MinorizerCoefficients minorizer_coefficients(const SystemInstance& instance,
                                             const std::vector<LiftedBlock>& blocks,
                                             const std::vector<CMatrix>& f) {
    return detail::coefficients(detail::nominal_problem(instance), blocks, f);
}

MinorizerCoefficients minorizer_coefficients(const SystemInstance& instance,
                                             const std::vector<CMatrix>& factors) {
    const auto problem = detail::nominal_problem(instance);
    std::vector<LiftedBlock> blocks;
    std::vector<CMatrix> f;
    for (int i = 0; i < problem.users(); ++i) {
        blocks.push_back(detail::build_block(problem, factors, i));
        f.push_back(build_F(blocks.back()));
    }
    return detail::coefficients(problem, blocks, f);
}

MmOptions MmOptions::from_config(const SystemConfig& config) {
    MmOptions o;
    o.epsilon = config.epsilon;
    o.max_iters = config.max_iters;
    o.init_seed = config.seed;
    return o;
}

CovarianceDesign mm_design_covariance(const SystemInstance& instance, const MmOptions& options) {
    const auto problem = detail::nominal_problem(instance);
    std::vector<int> k(instance.users());
    for (int j = 0; j < instance.users(); ++j) {
        k[j] = instance.tx_antennas(j);
    }
    auto run = detail::run_mm(problem, k, options);
    CovarianceDesign out;
    out.Q.Q = covariance_factors(run.factors);
    out.factors = std::move(run.factors);
    out.trace = std::move(run.trace);
    return out;
}

PrecoderDesign mm_design_precoder_fixed_d(const SystemInstance& instance, const std::vector<int>& d,
                                          const MmOptions& options) {
    if (static_cast<int>(d.size()) != instance.users()) {
        throw DimensionError("fixed-d design: one stream length per user required");
    }
    for (int j = 0; j < instance.users(); ++j) {
        if (d[j] < 0 || d[j] > instance.tx_antennas(j)) {
            throw InputError("fixed-d design: d_" + std::to_string(j + 1) + " must lie in [0, M_j]");
        }
    }
    auto run = detail::run_mm(detail::nominal_problem(instance), d, options);
    PrecoderDesign out;
    out.V = PrecoderSet::from_matrices(std::move(run.factors));
    out.trace = std::move(run.trace);
    return out;
}

PrecoderSet extract_precoders(const CovarianceSet& q, double rel_threshold) {
    PrecoderSet out;
    for (const auto& qi : q.Q) {
        const Eigen::Index m = qi.rows();
        if (m == 0) {
            out.V.emplace_back(0, 0);
            out.d.push_back(0);
            continue;
        }
        Eigen::SelfAdjointEigenSolver<CMatrix> es(linalg::hermitize(qi));
        const RVector& lam = es.eigenvalues(); // ascending
        const double lmax = lam(m - 1);
        std::vector<Eigen::Index> keep;
        for (Eigen::Index k = m - 1; k >= 0; --k) {
            if (lam(k) > 0.0 && lam(k) >= rel_threshold * lmax) {
                keep.push_back(k);
            }
        }
        CMatrix v(m, static_cast<Eigen::Index>(keep.size()));
        for (std::size_t c = 0; c < keep.size(); ++c) {
            v.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]) * std::sqrt(lam(keep[c]));
        }
        out.d.push_back(static_cast<int>(keep.size()));
        out.V.push_back(std::move(v));
    }
    return out;
}

double stationarity_residual(const SystemInstance& instance, const CovarianceSet& q,
                             const StationarityOptions& options) {
    detail::check_covariances(instance, q);
    return detail::stationarity_residual(detail::nominal_problem(instance), q, options);
}

namespace detail {

LiftedProblem nominal_problem(const SystemInstance& instance) {
    LiftedProblem p;
    p.H = instance.H;
    p.noise = instance.Gamma;
    p.p = instance.p;
    p.base = instance.config.log_base;
    return p;
}

LiftedBlock build_block(const LiftedProblem& problem, const std::vector<CMatrix>& factors, int i) {
    const int n = problem.users();
    if (static_cast<int>(factors.size()) != n) {
        throw DimensionError("build_B: one factor per user required");
    }
    const CMatrix& hii = problem.H[i][i];
    const CMatrix& xi = factors[i];
    if (xi.rows() != hii.cols()) {
        throw DimensionError("build_B: factor rows must equal M_i");
    }
    const Eigen::Index k = xi.cols();
    const Eigen::Index l = problem.noise[i].rows();
    CMatrix lower = problem.noise[i];
    for (int j = 0; j < n; ++j) {
        const double e = problem.error_coeff(j, i);
        if (e != 0.0) {
            lower.diagonal().array() += e * frob2(factors[j]);
        }
        if (factors[j].cols() > 0) {
            const CMatrix hx = problem.H[j][i] * factors[j];
            lower.noalias() += hx * hx.adjoint();
        }
    }
    LiftedBlock block;
    block.k_rows = k;
    block.B.resize(k + l, k + l);
    block.B.topLeftCorner(k, k).setIdentity();
    const CMatrix hx = hii * xi;
    block.B.bottomLeftCorner(l, k) = hx;
    block.B.topRightCorner(k, l) = hx.adjoint();
    block.B.bottomRightCorner(l, l) = linalg::hermitize(lower);
    Eigen::LLT<CMatrix> llt(block.B);
    if (llt.info() != Eigen::Success) {
        throw SolverError("build_B: lifted block of user " + std::to_string(i + 1) +
                          " is not positive definite");
    }
    return block;
}

MinorizerCoefficients coefficients(const LiftedProblem& problem, const std::vector<LiftedBlock>& blocks,
                                   const std::vector<CMatrix>& f) {
    const int n = problem.users();
    if (static_cast<int>(blocks.size()) != n || static_cast<int>(f.size()) != n) {
        throw DimensionError("minorizer_coefficients: one block and one F per user required");
    }
    MinorizerCoefficients out;
    out.C.resize(n);
    out.b.resize(n);
    out.G.assign(n, std::vector<KronQuadratic>(n));
    out.p = problem.p;
    for (int i = 0; i < n; ++i) {
        const LiftedBlock& blk = blocks[i];
        const Eigen::Index k = blk.k();
        const Eigen::Index l = blk.l();
        const CMatrix& fi = f[i];
        const CMatrix f11 = fi.topLeftCorner(k, k);
        const CMatrix f12 = fi.topRightCorner(k, l);
        const CMatrix f22 = fi.bottomRightCorner(l, l);
        const double tr_f22 = f22.trace().real();

        out.b[i] = linalg::vec(problem.H[i][i].adjoint() * f12.adjoint());

        const LiftedTerms terms = lifted_terms(blk);
        out.C[i] = -terms.logdet_s - (fi * blk.B).trace().real() + f11.trace().real() +
                   (f22 * problem.noise[i]).trace().real();

        for (int j = 0; j < n; ++j) {
            const CMatrix& hji = problem.H[j][i];
            KronQuadratic g;
            g.factor = linalg::hermitize(hji.adjoint() * f22 * hji);
            const double e = problem.error_coeff(j, i);
            if (e != 0.0) {
                g.factor.diagonal().array() += e * tr_f22;
            }
            g.reps = static_cast<int>(blocks[j].k());
            out.G[j][i] = std::move(g);
        }
    }
    return out;
}

std::vector<double> objective_rates_nats(const LiftedProblem& problem, const std::vector<CMatrix>& factors) {
    const int n = problem.users();
    CovarianceSet q;
    q.Q = covariance_factors(factors);
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        CMatrix noise = problem.noise[i];
        for (int j = 0; j < n; ++j) {
            const double e = problem.error_coeff(j, i);
            if (e != 0.0) {
                noise.diagonal().array() += e * q.Q[j].trace().real();
            }
        }
        out[i] = std::max(0.0, cov_rate_nats(problem.H, noise, q, i));
    }
    return out;
}

std::vector<double> lifted_rates_nats(const LiftedProblem& problem, const std::vector<CMatrix>& factors) {
    std::vector<double> out(problem.users());
    for (int i = 0; i < problem.users(); ++i) {
        out[i] = lifted_terms(build_block(problem, factors, i)).logdet_s;
    }
    return out;
}

std::vector<CMatrix> unstack(const std::vector<CVector>& x, const std::vector<int>& rows) {
    std::vector<CMatrix> out;
    out.reserve(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        const Eigen::Index m = rows[j];
        const Eigen::Index cols = m == 0 ? 0 : x[j].size() / m;
        out.emplace_back(Eigen::Map<const CMatrix>(x[j].data(), m, cols));
    }
    return out;
}

std::vector<CVector> stack(const std::vector<CMatrix>& factors) {
    std::vector<CVector> out;
    out.reserve(factors.size());
    for (const auto& x : factors) {
        out.push_back(linalg::vec(x));
    }
    return out;
}

MmRun run_mm(const LiftedProblem& problem, const std::vector<int>& k, const MmOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const int n = problem.users();
    if (static_cast<int>(k.size()) != n) {
        throw DimensionError("MM: one column count per user required");
    }
    if (!(options.epsilon > 0.0) || options.max_iters < 1) {
        throw InputError("MM: epsilon must be > 0 and max_iters >= 1");
    }
    std::vector<int> rows(n);
    for (int j = 0; j < n; ++j) {
        rows[j] = static_cast<int>(problem.H[j][j].cols());
    }

    std::vector<CMatrix> x(n);
    if (options.initial_factors) {
        x = *options.initial_factors;
        if (static_cast<int>(x.size()) != n) {
            throw DimensionError("MM: initial factors have wrong user count");
        }
        for (int j = 0; j < n; ++j) {
            if (x[j].rows() != rows[j] || x[j].cols() != k[j]) {
                throw DimensionError("MM: initial factor of user " + std::to_string(j + 1) + " has wrong shape");
            }
            const double norm2 = frob2(x[j]);
            if (norm2 > problem.p[j]) {
                x[j] *= std::sqrt(problem.p[j] / norm2);
            }
        }
    } else {
        const Rng base(options.init_seed);
        for (int j = 0; j < n; ++j) {
            Rng user = base.split(static_cast<std::uint64_t>(j));
            x[j] = user.cscg_matrix(rows[j], k[j]);
            const double norm2 = frob2(x[j]);
            if (norm2 > 0.0 && problem.p[j] > 0.0) {
                x[j] *= std::sqrt(problem.p[j] / norm2);
            } else {
                x[j].setZero();
            }
        }
    }

    auto report = [&](double nats) { return from_nats(nats, problem.base); };
    MmRun run;
    MmTrace& trace = run.trace;
    auto rates = objective_rates_nats(problem, x);
    double prev_min = report(*std::min_element(rates.begin(), rates.end()));
    trace.initial_minrate = prev_min;
    double prev_t = prev_min;

    for (int it = 1; it <= options.max_iters; ++it) {
        QcqpSolution sol;
        try {
            std::vector<LiftedBlock> blocks;
            std::vector<CMatrix> f;
            blocks.reserve(n);
            f.reserve(n);
            for (int i = 0; i < n; ++i) {
                blocks.push_back(build_block(problem, x, i));
                f.push_back(build_F(blocks.back()));
            }
            sol = solve(coefficients(problem, blocks, f), stack(x), options.solver);
        } catch (const SolverError& e) {
            throw SolverError("MM iteration " + std::to_string(it) + ": " + e.what());
        }
        if (!sol.converged) {
            ++trace.subproblem_nonconverged;
        }
        auto next = unstack(sol.x, rows);
        auto next_rates = objective_rates_nats(problem, next);
        const double next_min = report(*std::min_element(next_rates.begin(), next_rates.end()));
        if (next_min < prev_min - options.monotone_slack) {
            std::ostringstream os;
            os << "MM iteration " << it << ": min-rate decreased from " << prev_min << " to " << next_min
               << " (subproblem kkt residual " << sol.kkt_residual << ")";
            throw MonotonicityError(os.str());
        }
        x = std::move(next);
        const double t = report(sol.t);
        trace.t_history.push_back(t);
        trace.minrate_history.push_back(next_min);
        std::vector<double> reported(n);
        for (int i = 0; i < n; ++i) {
            reported[i] = report(next_rates[i]);
        }
        trace.rate_history.push_back(std::move(reported));
        trace.iterations = it;
        prev_min = next_min;
        if (std::abs(t - prev_t) <= options.epsilon) {
            trace.converged = true;
            break;
        }
        prev_t = t;
    }

    if (options.compute_stationarity) {
        CovarianceSet q;
        q.Q = covariance_factors(x);
        trace.stationarity_residual = stationarity_residual(problem, q, options.stationarity);
    }
    run.factors = std::move(x);
    trace.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return run;
}

CMatrix rate_gradient(const LiftedProblem& problem, const CovarianceSet& q, int i, int j) {
    const int n = problem.users();
    CMatrix c = problem.noise[i];
    for (int l = 0; l < n; ++l) {
        const double e = problem.error_coeff(l, i);
        if (e != 0.0) {
            c.diagonal().array() += e * q.Q[l].trace().real();
        }
        if (l != i) {
            c.noalias() += problem.H[l][i] * q.Q[l] * problem.H[l][i].adjoint();
        }
    }
    c = linalg::hermitize(c);
    const CMatrix t = linalg::hermitize(c + problem.H[i][i] * q.Q[i] * problem.H[i][i].adjoint());
    const Eigen::Index l_i = c.rows();
    const CMatrix t_inv = linalg::solve_pd(t, CMatrix::Identity(l_i, l_i));
    const CMatrix c_inv = linalg::solve_pd(c, CMatrix::Identity(l_i, l_i));
    const CMatrix& h = problem.H[j][i];
    CMatrix g = h.adjoint() * t_inv * h;
    if (j != i) {
        g -= h.adjoint() * c_inv * h;
    }
    const double e = problem.error_coeff(j, i);
    if (e != 0.0) {
        g.diagonal().array() += e * (t_inv - c_inv).trace().real();
    }
    return linalg::hermitize(g);
}

double stationarity_residual(const LiftedProblem& problem, const CovarianceSet& q,
                             const StationarityOptions& options) {
    const int n = problem.users();
    std::vector<double> rates(n);
    {
        std::vector<CMatrix> factors;
        for (const auto& qi : q.Q) {
            factors.push_back(hermitian_sqrt(qi));
        }
        rates = objective_rates_nats(problem, factors);
    }
    const double rmin = *std::min_element(rates.begin(), rates.end());
    const double active_tol = to_nats(options.active_tol, problem.base);
    std::vector<int> active;
    for (int i = 0; i < n; ++i) {
        if (rates[i] <= rmin + active_tol) {
            active.push_back(i);
        }
    }

    // Tangent-cone geometry of each user's feasible set at Q_j.
    struct Geometry {
        CMatrix range; ///< orthonormal basis of the retained eigenspace
        CMatrix null;
        bool full_power = false;
    };
    std::vector<Geometry> geo(n);
    for (int j = 0; j < n; ++j) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(linalg::hermitize(q.Q[j]));
        const Eigen::Index m = q.Q[j].rows();
        const double lmax = m > 0 ? std::max(0.0, es.eigenvalues()(m - 1)) : 0.0;
        std::vector<Eigen::Index> r, z;
        for (Eigen::Index k = 0; k < m; ++k) {
            const double lam = es.eigenvalues()(k);
            (lmax > 0.0 && lam > options.rank_threshold * lmax ? r : z).push_back(k);
        }
        geo[j].range.resize(m, static_cast<Eigen::Index>(r.size()));
        geo[j].null.resize(m, static_cast<Eigen::Index>(z.size()));
        for (std::size_t c = 0; c < r.size(); ++c) {
            geo[j].range.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(r[c]);
        }
        for (std::size_t c = 0; c < z.size(); ++c) {
            geo[j].null.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(z[c]);
        }
        geo[j].full_power = q.Q[j].trace().real() >= problem.p[j] - 1e-6 * std::max(1.0, problem.p[j]);
    }

    // Map an arbitrary Hermitian direction into the tangent cone.
    auto make_feasible = [&](std::vector<CMatrix> dir) {
        double norm2 = 0.0;
        for (int j = 0; j < n; ++j) {
            const Geometry& g = geo[j];
            CMatrix d = linalg::hermitize(dir[j]);
            if (g.null.cols() > 0) {
                const CMatrix nn = g.null.adjoint() * d * g.null;
                Eigen::SelfAdjointEigenSolver<CMatrix> es(linalg::hermitize(nn));
                const CMatrix psd = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() *
                                    es.eigenvectors().adjoint();
                d += g.null * (psd - nn) * g.null.adjoint();
            }
            if (g.full_power) {
                const double tr = d.trace().real();
                if (tr > 0.0) {
                    if (g.range.cols() > 0) {
                        d -= (tr / static_cast<double>(g.range.cols())) * g.range * g.range.adjoint();
                    } else {
                        d.setZero();
                    }
                }
            }
            dir[j] = linalg::hermitize(d);
            norm2 += dir[j].squaredNorm();
        }
        if (norm2 > 0.0) {
            const double s = 1.0 / std::sqrt(norm2);
            for (auto& d : dir) {
                d *= s;
            }
        }
        return dir;
    };

    PairGrid<CMatrix> grad(n, std::vector<CMatrix>(n));
    for (int i : active) {
        for (int j = 0; j < n; ++j) {
            grad[i][j] = rate_gradient(problem, q, i, j);
        }
    }
    auto derivative = [&](const std::vector<CMatrix>& dir) {
        double worst = std::numeric_limits<double>::infinity();
        for (int i : active) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) {
                acc += (grad[i][j] * dir[j]).trace().real();
            }
            worst = std::min(worst, acc);
        }
        return worst;
    };

    double best = 0.0;
    // Structured candidates: each active user's gradient and their sum.
    std::vector<CMatrix> sum(n);
    for (int j = 0; j < n; ++j) {
        sum[j] = CMatrix::Zero(q.Q[j].rows(), q.Q[j].cols());
    }
    for (int i : active) {
        std::vector<CMatrix> dir(n);
        for (int j = 0; j < n; ++j) {
            dir[j] = grad[i][j];
            sum[j] += grad[i][j];
        }
        best = std::max(best, derivative(make_feasible(dir)));
    }
    best = std::max(best, derivative(make_feasible(sum)));

    Rng rng(options.seed);
    const int count = options.directions_per_user * n;
    for (int s = 0; s < count; ++s) {
        std::vector<CMatrix> dir(n);
        for (int j = 0; j < n; ++j) {
            const Eigen::Index m = q.Q[j].rows();
            dir[j] = linalg::hermitize(rng.cscg_matrix(m, m));
        }
        best = std::max(best, derivative(make_feasible(dir)));
    }
    return from_nats(best, problem.base);
}

} // namespace detail

} // namespace maxmin
