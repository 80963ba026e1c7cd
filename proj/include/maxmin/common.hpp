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

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace maxmin {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Square grid indexed as grid[j][i]: quantity attached to the pair (transmitter j, receiver i).
template <typename T>
using PairGrid = std::vector<std::vector<T>>;

// ----- error hierarchy --------------------------------------------------------

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed configuration or instance data (bad sizes, NaN, out-of-range values).
class InputError : public Error {
  public:
    using Error::Error;
};

class DimensionError : public InputError {
  public:
    using InputError::InputError;
};

/// W C W^H is not positive definite for the decoder handed to rate_with_decoder.
class DegenerateDecoderError : public Error {
  public:
    using Error::Error;
};

/// Numerical failure inside a solver (loss of positive definiteness, non-finite iterates).
class SolverError : public Error {
  public:
    using Error::Error;
};

/// The MM objective decreased by more than the allowed slack between iterations.
class MonotonicityError : public SolverError {
  public:
    using SolverError::SolverError;
};

enum class LogBase { natural, base2 };

/// Converts a value measured in nats into the requested base.
inline double from_nats(double nats, LogBase base) {
    constexpr double kLn2 = 0.69314718055994530942;
    return base == LogBase::base2 ? nats / kLn2 : nats;
}

inline double to_nats(double value, LogBase base) {
    constexpr double kLn2 = 0.69314718055994530942;
    return base == LogBase::base2 ? value * kLn2 : value;
}

} // namespace maxmin
