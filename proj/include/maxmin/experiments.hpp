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
#include "maxmin/io.hpp"
#include "maxmin/mm_core.hpp"
#include "maxmin/robust.hpp"
#include "maxmin/system_model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace maxmin {

enum class ExperimentKind { trace, snr_sweep, fairness, cov_vs_fixed_d, init_histogram, robust_loss, design };

enum class DesignMode { covariance, fixed_d };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

/// Robust parameters as given in a config file; expanded against an instance later.
struct RobustSpec {
    io::Json rho = 1.0;
    io::Json sigma2 = 1.0;
    io::Json zeta = 0.25;
};

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::design;
    SystemConfig config;
    int trials = 10;
    int inits = 50;
    std::vector<double> snr_grid; ///< empty selects the experiment's default grid
    std::optional<std::vector<int>> d;
    std::optional<RobustSpec> robust;
    std::string output_path;
    DesignMode mode = DesignMode::covariance;
    double eig_threshold = 1e-8;
    std::vector<double> rho_grid{0.7, 0.8, 0.9, 1.0};
    std::vector<int> m_grid{4, 6};
    std::vector<int> d_grid{2, 3, 4};
    std::optional<SystemInstance> instance; ///< fixed instance for single-channel experiments
    int threads = 0;                        ///< 0: MAXMIN_IC_THREADS or the hardware count

    std::uint64_t seed() const { return config.seed; }

    /// Desk-scale spec for `kind` with the experiment's default sizes.
    static ExperimentSpec defaults(ExperimentKind kind);

    /// Restores the full trial and initialization counts.
    void apply_paper_scale();

    /// Throws InputError on an inconsistent spec.
    void validate() const;
};

/// Reads experiment keys (trials, inits, snr_grid, d, robust, rho_grid, M_grid,
/// d_grid, mode, eig_threshold) and system keys, either at the top level or under
/// "config", on top of `ExperimentSpec::defaults(kind)`.
ExperimentSpec spec_from_json(ExperimentKind kind, const io::Json& j);

struct ExperimentResult {
    std::vector<io::CsvTable> tables;
    std::optional<io::Json> json;
    int nonconverged = 0; ///< designs that hit max_iters or had an inexact subproblem
};

/// Q_i = (p_i / M_i) I.
CovarianceSet isotropic_baseline(const SystemInstance& instance);

ExperimentResult run_trace(const ExperimentSpec& spec);
ExperimentResult run_snr_sweep(const ExperimentSpec& spec);
ExperimentResult run_fairness(const ExperimentSpec& spec);
ExperimentResult run_cov_vs_fixed_d(const ExperimentSpec& spec);
ExperimentResult run_init_histogram(const ExperimentSpec& spec);
ExperimentResult run_robust_loss(const ExperimentSpec& spec);
ExperimentResult design(const ExperimentSpec& spec);

ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Writes every table (and the JSON result) next to `spec.output_path`. A single
/// table goes to the path itself; several go to `<stem>_<name><ext>`. Returns the
/// paths written.
std::vector<std::string> write_result(const ExperimentSpec& spec, const ExperimentResult& result);

/// Parsed form of a design result file.
struct DesignResult {
    DesignMode mode = DesignMode::covariance;
    CovarianceSet Q;
    PrecoderSet V;
    double minrate = 0.0;
    std::vector<double> rates;
    std::vector<double> minrate_history;
    std::vector<double> t_history;
    double stationarity_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

io::Json design_result_to_json(const DesignResult& result);
DesignResult design_result_from_json(const io::Json& j);

/// Number of worker threads: MAXMIN_IC_THREADS when set and positive, else the
/// hardware count, and never more than `requested` when that is positive.
int worker_count(int requested);

/// Runs body(k) for k in [0, count) on up to `threads` workers. Exceptions are
/// rethrown for the smallest failing index.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

} // namespace maxmin
