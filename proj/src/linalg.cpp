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

#include "maxmin/linalg.hpp"

#include <cmath>
#include <limits>

namespace maxmin::linalg {

CMatrix hermitize(const CMatrix& a) {
    return (a + a.adjoint()) * 0.5;
}

bool is_hermitian(const CMatrix& a, double tol) {
    if (a.rows() != a.cols()) {
        return false;
    }
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol || a.size() == 0;
}

double min_eigenvalue(const CMatrix& a) {
    if (a.size() == 0) {
        return std::numeric_limits<double>::infinity();
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitize(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double logdet_pd(const CMatrix& a) {
    if (a.size() == 0) {
        return 0.0;
    }
    Eigen::LLT<CMatrix> llt(a);
    if (llt.info() != Eigen::Success) {
        throw SolverError("logdet_pd: matrix is not positive definite");
    }
    const auto& l = llt.matrixLLT();
    double acc = 0.0;
    for (Eigen::Index k = 0; k < l.rows(); ++k) {
        acc += std::log(l(k, k).real());
    }
    return 2.0 * acc;
}

CMatrix solve_pd(const CMatrix& a, const CMatrix& b) {
    if (a.size() == 0) {
        return CMatrix::Zero(0, b.cols());
    }
    Eigen::LLT<CMatrix> llt(a);
    if (llt.info() != Eigen::Success) {
        throw SolverError("solve_pd: matrix is not positive definite");
    }
    return llt.solve(b);
}

CVector vec(const CMatrix& a) {
    return Eigen::Map<const CVector>(a.data(), a.size());
}

CMatrix unvec(const CVector& x, Eigen::Index rows) {
    if (rows == 0) {
        return CMatrix::Zero(0, 0);
    }
    const Eigen::Index cols = x.size() / rows;
    return Eigen::Map<const CMatrix>(x.data(), rows, cols);
}

} // namespace maxmin::linalg
