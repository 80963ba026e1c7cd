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

#include "maxmin/experiments.hpp"
#include "maxmin/io.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kNonConvergence = 2, kIoError = 3 };

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool paper_scale = false;
    std::string dump_instance;
    std::string load_instance;
    std::string mode;
    std::optional<int> d;
    std::optional<double> eig_threshold;
    bool allow_nonconverged = false;
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config, "experiment/system config JSON file");
    sub->add_option("--seed", o.seed, "master seed (overrides the config)");
    sub->add_option("--out", o.out, "output path");
    sub->add_flag("--paper-scale", o.paper_scale, "30 trials and 200 initializations");
    sub->add_option("--dump-instance", o.dump_instance, "write the base instance as JSON");
    sub->add_option("--load-instance", o.load_instance, "read the base instance from JSON");
    sub->add_option("--mode", o.mode, "design mode")->check(CLI::IsMember({"cov", "fixed-d"}));
    sub->add_option("--d", o.d, "stream length for every user in fixed-d mode")->check(CLI::PositiveNumber);
    sub->add_option("--eig-threshold", o.eig_threshold, "relative eigenvalue threshold for precoder extraction");
    sub->add_flag("--allow-nonconverged", o.allow_nonconverged, "exit 0 even if a design did not converge");
}

int run(maxmin::ExperimentKind kind, const Options& o) {
    using namespace maxmin;
    ExperimentSpec spec = o.config.empty() ? ExperimentSpec::defaults(kind)
                                           : spec_from_json(kind, io::read_json_file(o.config));
    if (!o.load_instance.empty()) {
        if (kind != ExperimentKind::design && kind != ExperimentKind::trace &&
            kind != ExperimentKind::init_histogram) {
            throw InputError("--load-instance applies to design, trace and init_histogram only");
        }
        SystemInstance inst = io::instance_from_json(io::read_json_file(o.load_instance));
        if (!o.config.empty()) {
            // The config file keeps control of the solver settings.
            inst.config.epsilon = spec.config.epsilon;
            inst.config.max_iters = spec.config.max_iters;
            inst.config.log_base = spec.config.log_base;
        }
        spec.config = inst.config;
        spec.instance = std::move(inst);
    }
    if (o.seed) {
        spec.config.seed = *o.seed;
        if (spec.instance) {
            spec.instance->config.seed = *o.seed;
        }
    }
    if (o.paper_scale) {
        spec.apply_paper_scale();
    }
    if (!o.out.empty()) {
        spec.output_path = o.out;
    }
    if (!o.mode.empty()) {
        spec.mode = o.mode == "cov" ? DesignMode::covariance : DesignMode::fixed_d;
    }
    if (o.d) {
        spec.d = std::vector<int>{*o.d};
    }
    if (o.eig_threshold) {
        spec.eig_threshold = *o.eig_threshold;
    }
    spec.validate();

    if (!o.dump_instance.empty()) {
        const SystemInstance inst = spec.instance ? *spec.instance : generate_channels(spec.config);
        io::write_text_file(o.dump_instance, io::instance_to_json(inst).dump(2) + "\n");
    }

    const ExperimentResult result = run_experiment(spec);
    for (const auto& path : write_result(spec, result)) {
        std::cout << path << "\n";
    }
    if (result.nonconverged > 0) {
        std::cerr << "warning: " << result.nonconverged << " design(s) did not converge\n";
        if (!o.allow_nonconverged) {
            return kNonConvergence;
        }
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Max-min fair transmit covariance design for MIMO interference channels", "maxmin-ic"};
    app.require_subcommand(1);
    Options options;
    std::optional<maxmin::ExperimentKind> chosen;
    const std::pair<maxmin::ExperimentKind, const char*> commands[] = {
        {maxmin::ExperimentKind::trace, "min-rate per MM iteration, one CSV per SNR"},
        {maxmin::ExperimentKind::snr_sweep, "mean min-rate versus SNR for MM and isotropic transmission"},
        {maxmin::ExperimentKind::fairness, "per-user rates of MM and isotropic transmission"},
        {maxmin::ExperimentKind::cov_vs_fixed_d, "covariance design against fixed stream lengths"},
        {maxmin::ExperimentKind::init_histogram, "final min-rate over random initializations"},
        {maxmin::ExperimentKind::robust_loss, "loss of the nominal design under channel and noise uncertainty"},
        {maxmin::ExperimentKind::design, "single design, JSON result"},
    };
    for (const auto& [kind, help] : commands) {
        CLI::App* sub = app.add_subcommand(maxmin::to_string(kind), help);
        add_common(sub, options);
        sub->callback([&chosen, kind = kind] { chosen = kind; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }
    try {
        return run(*chosen, options);
    } catch (const maxmin::io::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIoError;
    } catch (const maxmin::InputError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const maxmin::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kNonConvergence;
    } catch (const maxmin::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNonConvergence;
    }
}
