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

#include <cstdint>
#include <random>

namespace maxmin {

/// Seedable 64-bit generator with deterministic substreams.
///
/// Substreams are derived from the parent seed with a SplitMix64 mix, so
/// `Rng(s).split(a)` is the same stream no matter how much the parent has been
/// consumed. Trials and users each take their own substream, which keeps
/// parallel experiment runs reproducible.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    static std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

    Rng split(std::uint64_t a, std::uint64_t b = 0) const;

    std::uint64_t seed() const { return seed_; }

    double normal();
    double uniform();

    /// Circularly symmetric complex Gaussian sample with the given variance
    /// (real and imaginary parts each carry half of it).
    cdouble cscg(double variance = 1.0);

    CMatrix cscg_matrix(Eigen::Index rows, Eigen::Index cols, double variance = 1.0);

    std::mt19937_64& engine() { return engine_; }

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

} // namespace maxmin
