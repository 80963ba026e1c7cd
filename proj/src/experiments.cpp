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

#include "maxmin/rates.hpp"
#include "maxmin/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <numeric>
#include <thread>

namespace maxmin {

namespace {

using io::format_double;

constexpr std::uint64_t kInitStream = 0x1417;

struct Stats {
    double mean = 0.0;
    double std = 0.0; ///< sample standard deviation, 0 for one sample
    double variance = 0.0;
};

Stats stats(const std::vector<double>& v) {
    Stats s;
    if (v.empty()) {
        return s;
    }
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() > 1) {
        double acc = 0.0;
        for (double x : v) {
            acc += (x - s.mean) * (x - s.mean);
        }
        s.variance = acc / static_cast<double>(v.size() - 1);
        s.std = std::sqrt(s.variance);
    }
    return s;
}

bool clean(const MmTrace& t) {
    return t.converged && t.subproblem_nonconverged == 0;
}

MmOptions mm_options(const SystemConfig& config, std::uint64_t init_seed, bool stationarity = false) {
    MmOptions o = MmOptions::from_config(config);
    o.init_seed = init_seed;
    o.compute_stationarity = stationarity;
    return o;
}

SystemInstance with_snr(SystemInstance inst, double snr_db) {
    inst.config.snr_db = snr_db;
    for (int i = 0; i < inst.users(); ++i) {
        inst.p[i] = power_from_snr(snr_db, inst.Gamma[i]);
    }
    return inst;
}

SystemInstance trial_instance(const SystemConfig& config, int trial) {
    Rng rng(Rng::derive(config.seed, static_cast<std::uint64_t>(trial)));
    return generate_channels(config, rng);
}

SystemInstance base_instance(const ExperimentSpec& spec) {
    return spec.instance ? *spec.instance : generate_channels(spec.config);
}

std::vector<int> default_streams(const SystemInstance& inst) {
    std::vector<int> d(inst.users());
    for (int j = 0; j < inst.users(); ++j) {
        d[j] = std::max(1, std::min(inst.tx_antennas(j), inst.rx_antennas(j)) / 2);
    }
    return d;
}

std::vector<int> streams(const ExperimentSpec& spec, const SystemInstance& inst) {
    if (!spec.d) {
        return default_streams(inst);
    }
    std::vector<int> d = *spec.d;
    if (d.size() == 1 && inst.users() > 1) {
        d.assign(inst.users(), d[0]);
    }
    return d;
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) {
        s += (k ? " " : "") + std::to_string(v[k]);
    }
    return s;
}

std::vector<std::string> common_metadata(const ExperimentSpec& spec) {
    const auto& c = spec.config;
    return {"experiment=" + to_string(spec.kind),
            "N=" + std::to_string(c.N) + " M=" + join_ints(c.M) + " L=" + join_ints(c.L),
            "seed=" + std::to_string(c.seed),
            "epsilon=" + format_double(c.epsilon) + " max_iters=" + std::to_string(c.max_iters),
            std::string("log_base=") + (c.log_base == LogBase::base2 ? "base2" : "natural")};
}

double robust_scalar(const io::Json& j, const char* what) {
    if (!j.is_number()) {
        throw InputError(std::string("robust_loss needs a scalar ") + what);
    }
    return j.get<double>();
}

} // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::trace:
        return "trace";
    case ExperimentKind::snr_sweep:
        return "snr_sweep";
    case ExperimentKind::fairness:
        return "fairness";
    case ExperimentKind::cov_vs_fixed_d:
        return "cov_vs_fixed_d";
    case ExperimentKind::init_histogram:
        return "init_histogram";
    case ExperimentKind::robust_loss:
        return "robust_loss";
    case ExperimentKind::design:
        return "design";
    }
    return "design";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    for (auto k : {ExperimentKind::trace, ExperimentKind::snr_sweep, ExperimentKind::fairness,
                   ExperimentKind::cov_vs_fixed_d, ExperimentKind::init_histogram, ExperimentKind::robust_loss,
                   ExperimentKind::design}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw InputError("unknown experiment \"" + name + "\"");
}

ExperimentSpec ExperimentSpec::defaults(ExperimentKind kind) {
    ExperimentSpec s;
    s.kind = kind;
    switch (kind) {
    case ExperimentKind::trace:
        s.snr_grid = {0.0, 5.0, 10.0, 15.0};
        break;
    case ExperimentKind::snr_sweep:
        s.snr_grid = {0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
        break;
    case ExperimentKind::fairness:
        s.config = SystemConfig::uniform(10, 4, 4, 15.0);
        break;
    case ExperimentKind::robust_loss:
        s.trials = 20;
        s.robust = RobustSpec{};
        break;
    default:
        break;
    }
    s.output_path = to_string(kind) + (kind == ExperimentKind::design ? ".json" : ".csv");
    return s;
}

void ExperimentSpec::apply_paper_scale() {
    trials = 30;
    inits = 200;
}

void ExperimentSpec::validate() const {
    config.validate();
    if (trials < 1) {
        throw InputError("trials must be >= 1");
    }
    if (inits < 1) {
        throw InputError("inits must be >= 1");
    }
    if ((kind == ExperimentKind::trace || kind == ExperimentKind::snr_sweep) && snr_grid.empty()) {
        throw InputError("snr_grid must not be empty");
    }
    if (d) {
        if (d->size() != 1 && static_cast<int>(d->size()) != config.N) {
            throw InputError("d must hold one stream length or one per user");
        }
        for (std::size_t k = 0; k < d->size(); ++k) {
            const int v = (*d)[k];
            if (v < 1) {
                throw InputError("stream lengths must be >= 1");
            }
            const std::size_t first = d->size() == 1 ? 0 : k;
            const std::size_t last = d->size() == 1 ? config.M.size() : k + 1;
            for (std::size_t i = first; i < last && i < config.M.size(); ++i) {
                if (v > config.M[i]) {
                    throw InputError("stream length d_" + std::to_string(i + 1) + " exceeds M_" +
                                     std::to_string(i + 1));
                }
            }
        }
    }
    if (kind == ExperimentKind::cov_vs_fixed_d && (m_grid.empty() || d_grid.empty())) {
        throw InputError("M_grid and d_grid must not be empty");
    }
    if (kind == ExperimentKind::robust_loss && rho_grid.empty()) {
        throw InputError("rho_grid must not be empty");
    }
    if (!(eig_threshold >= 0.0 && eig_threshold < 1.0)) {
        throw InputError("eig_threshold must lie in [0, 1)");
    }
}

ExperimentSpec spec_from_json(ExperimentKind kind, const io::Json& j) {
    if (!j.is_object()) {
        throw InputError("config file must hold a JSON object");
    }
    ExperimentSpec s = ExperimentSpec::defaults(kind);
    try {
        io::Json sys = j.contains("config") ? j.at("config") : io::Json::object();
        for (const char* key : {"N", "M", "L", "snr_db", "seed", "epsilon", "max_iters", "log_base"}) {
            if (j.contains(key) && !sys.contains(key)) {
                sys[key] = j.at(key);
            }
        }
        if (!sys.empty()) {
            if (kind == ExperimentKind::fairness && !sys.contains("N")) {
                sys["N"] = s.config.N;
            }
            s.config = io::config_from_json(sys);
        }
        if (j.contains("trials")) {
            s.trials = j.at("trials").get<int>();
        }
        if (j.contains("inits")) {
            s.inits = j.at("inits").get<int>();
        }
        if (j.contains("snr_grid")) {
            s.snr_grid = j.at("snr_grid").get<std::vector<double>>();
        }
        if (j.contains("d")) {
            const auto& d = j.at("d");
            s.d = d.is_array() ? d.get<std::vector<int>>() : std::vector<int>{d.get<int>()};
        }
        if (j.contains("robust")) {
            const auto& r = j.at("robust");
            RobustSpec rs;
            if (r.contains("rho")) {
                rs.rho = r.at("rho");
            }
            if (r.contains("sigma2")) {
                rs.sigma2 = r.at("sigma2");
            }
            if (r.contains("zeta")) {
                rs.zeta = r.at("zeta");
            }
            s.robust = rs;
        }
        if (j.contains("rho_grid")) {
            s.rho_grid = j.at("rho_grid").get<std::vector<double>>();
        }
        if (j.contains("M_grid")) {
            s.m_grid = j.at("M_grid").get<std::vector<int>>();
        }
        if (j.contains("d_grid")) {
            s.d_grid = j.at("d_grid").get<std::vector<int>>();
        }
        if (j.contains("mode")) {
            const auto m = j.at("mode").get<std::string>();
            if (m == "cov") {
                s.mode = DesignMode::covariance;
            } else if (m == "fixed-d") {
                s.mode = DesignMode::fixed_d;
            } else {
                throw InputError("mode must be \"cov\" or \"fixed-d\"");
            }
        }
        if (j.contains("eig_threshold")) {
            s.eig_threshold = j.at("eig_threshold").get<double>();
        }
        if (j.contains("out")) {
            s.output_path = j.at("out").get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed config: ") + e.what());
    }
    s.validate();
    return s;
}

CovarianceSet isotropic_baseline(const SystemInstance& instance) {
    CovarianceSet q;
    for (int j = 0; j < instance.users(); ++j) {
        const int m = instance.tx_antennas(j);
        q.Q.push_back(CMatrix::Identity(m, m) * (instance.p[j] / m));
    }
    return q;
}

ExperimentResult run_trace(const ExperimentSpec& spec) {
    spec.validate();
    const SystemInstance base = base_instance(spec);
    const int n = base.users();
    std::vector<CovarianceDesign> designs(spec.snr_grid.size());
    parallel_for(static_cast<int>(spec.snr_grid.size()), worker_count(spec.threads), [&](int k) {
        designs[k] = mm_design_covariance(with_snr(base, spec.snr_grid[k]), mm_options(spec.config, spec.seed()));
    });
    ExperimentResult out;
    for (std::size_t k = 0; k < spec.snr_grid.size(); ++k) {
        const MmTrace& tr = designs[k].trace;
        io::CsvTable t;
        t.name = "snr" + format_double(spec.snr_grid[k]);
        t.metadata = common_metadata(spec);
        t.metadata.push_back("snr_db=" + format_double(spec.snr_grid[k]));
        t.metadata.push_back("initial_minrate=" + format_double(tr.initial_minrate));
        t.metadata.push_back(std::string("converged=") + (tr.converged ? "true" : "false"));
        t.header = {"iter", "t", "minrate"};
        for (int i = 0; i < n; ++i) {
            t.header.push_back("R_" + std::to_string(i + 1));
        }
        for (std::size_t it = 0; it < tr.t_history.size(); ++it) {
            std::vector<std::string> row{std::to_string(it + 1), format_double(tr.t_history[it]),
                                         format_double(tr.minrate_history[it])};
            for (double r : tr.rate_history[it]) {
                row.push_back(format_double(r));
            }
            t.add_row(std::move(row));
        }
        out.nonconverged += clean(tr) ? 0 : 1;
        out.tables.push_back(std::move(t));
    }
    return out;
}

ExperimentResult run_snr_sweep(const ExperimentSpec& spec) {
    spec.validate();
    const int snrs = static_cast<int>(spec.snr_grid.size());
    const int tasks = spec.trials * snrs;
    struct Cell {
        double cov = 0.0;
        double fixed = 0.0;
        double iso = 0.0;
        int bad = 0;
    };
    std::vector<Cell> cells(tasks);
    parallel_for(tasks, worker_count(spec.threads), [&](int k) {
        const int trial = k / snrs;
        const SystemInstance inst = with_snr(trial_instance(spec.config, trial), spec.snr_grid[k % snrs]);
        const auto seed = Rng::derive(spec.seed(), static_cast<std::uint64_t>(trial), 1);
        const auto cov = mm_design_covariance(inst, mm_options(spec.config, seed));
        const auto fixed = mm_design_precoder_fixed_d(inst, streams(spec, inst), mm_options(spec.config, seed));
        cells[k].cov = min_rate(inst, cov.Q);
        cells[k].fixed = min_rate(inst, fixed.V.covariances());
        cells[k].iso = min_rate(inst, isotropic_baseline(inst));
        cells[k].bad = (clean(cov.trace) ? 0 : 1) + (clean(fixed.trace) ? 0 : 1);
    });
    ExperimentResult out;
    io::CsvTable t;
    t.metadata = common_metadata(spec);
    t.metadata.push_back("trials share one channel draw across methods and SNR values");
    t.metadata.push_back("mm_cov and mm_fixed_d start from the same init seed per trial; fixed-d d=" +
                         (spec.d ? join_ints(*spec.d) : std::string("min(M,L)/2")));
    t.header = {"snr_db", "method", "mean_minrate", "std_minrate", "trials"};
    for (int s = 0; s < snrs; ++s) {
        std::vector<double> cov, fixed, iso;
        for (int trial = 0; trial < spec.trials; ++trial) {
            const Cell& c = cells[trial * snrs + s];
            cov.push_back(c.cov);
            fixed.push_back(c.fixed);
            iso.push_back(c.iso);
            out.nonconverged += c.bad;
        }
        const std::pair<const char*, const std::vector<double>*> methods[] = {
            {"mm_cov", &cov}, {"mm_fixed_d", &fixed}, {"isotropic", &iso}};
        for (const auto& [name, values] : methods) {
            const Stats st = stats(*values);
            t.add_row({format_double(spec.snr_grid[s]), name, format_double(st.mean), format_double(st.std),
                       std::to_string(spec.trials)});
        }
    }
    out.tables.push_back(std::move(t));
    return out;
}

ExperimentResult run_fairness(const ExperimentSpec& spec) {
    spec.validate();
    struct Trial {
        std::vector<double> mm;
        std::vector<double> iso;
        bool bad = false;
    };
    std::vector<Trial> trials(spec.trials);
    parallel_for(spec.trials, worker_count(spec.threads), [&](int k) {
        const SystemInstance inst = trial_instance(spec.config, k);
        const auto seed = Rng::derive(spec.seed(), static_cast<std::uint64_t>(k), 1);
        const auto cov = mm_design_covariance(inst, mm_options(spec.config, seed));
        trials[k].mm = rates_from_cov(inst, cov.Q).R;
        trials[k].iso = rates_from_cov(inst, isotropic_baseline(inst)).R;
        trials[k].bad = !clean(cov.trace);
    });
    ExperimentResult out;
    io::CsvTable rates;
    rates.name = "rates";
    rates.metadata = common_metadata(spec);
    rates.metadata.push_back("snr_db=" + format_double(spec.config.snr_db));
    rates.header = {"trial", "user", "rate", "method"};
    io::CsvTable spread;
    spread.name = "spread";
    spread.metadata = rates.metadata;
    spread.header = {"trial", "method", "spread"};
    std::vector<double> mm_spread, iso_spread;
    for (int k = 0; k < spec.trials; ++k) {
        const Trial& tr = trials[k];
        out.nonconverged += tr.bad ? 1 : 0;
        for (std::size_t i = 0; i < tr.mm.size(); ++i) {
            rates.add_row({std::to_string(k), std::to_string(i + 1), format_double(tr.mm[i]), "mm_cov"});
        }
        for (std::size_t i = 0; i < tr.iso.size(); ++i) {
            rates.add_row({std::to_string(k), std::to_string(i + 1), format_double(tr.iso[i]), "isotropic"});
        }
        const auto [mm_lo, mm_hi] = std::minmax_element(tr.mm.begin(), tr.mm.end());
        const auto [iso_lo, iso_hi] = std::minmax_element(tr.iso.begin(), tr.iso.end());
        mm_spread.push_back(*mm_hi - *mm_lo);
        iso_spread.push_back(*iso_hi - *iso_lo);
        spread.add_row({std::to_string(k), "mm_cov", format_double(mm_spread.back())});
        spread.add_row({std::to_string(k), "isotropic", format_double(iso_spread.back())});
    }
    spread.metadata.push_back("mean_spread mm_cov=" + format_double(stats(mm_spread).mean) +
                              " isotropic=" + format_double(stats(iso_spread).mean));
    out.tables.push_back(std::move(rates));
    out.tables.push_back(std::move(spread));
    return out;
}

ExperimentResult run_cov_vs_fixed_d(const ExperimentSpec& spec) {
    spec.validate();
    struct Job {
        int m = 0;
        int trial = 0;
    };
    std::vector<Job> jobs;
    for (int m : spec.m_grid) {
        for (int trial = 0; trial < spec.trials; ++trial) {
            jobs.push_back({m, trial});
        }
    }
    auto d_values = [&](int m) {
        std::vector<int> d;
        for (int v : spec.d_grid) {
            if (v <= m) {
                d.push_back(v);
            }
        }
        if (std::find(d.begin(), d.end(), m) == d.end()) {
            d.push_back(m);
        }
        return d;
    };
    struct Outcome {
        double cov = 0.0;
        double cov_time = 0.0;
        std::vector<double> fixed;
        std::vector<double> fixed_time;
        int bad = 0;
    };
    std::vector<Outcome> outcomes(jobs.size());
    parallel_for(static_cast<int>(jobs.size()), worker_count(spec.threads), [&](int k) {
        const Job& job = jobs[k];
        SystemConfig cfg = SystemConfig::uniform(spec.config.N, job.m, job.m, spec.config.snr_db, spec.seed());
        cfg.epsilon = spec.config.epsilon;
        cfg.max_iters = spec.config.max_iters;
        cfg.log_base = spec.config.log_base;
        const SystemInstance inst = trial_instance(cfg, job.trial);
        const auto seed = Rng::derive(spec.seed(), static_cast<std::uint64_t>(job.trial), 1);
        const auto cov = mm_design_covariance(inst, mm_options(cfg, seed));
        outcomes[k].cov = min_rate(inst, cov.Q);
        outcomes[k].cov_time = cov.trace.runtime_s;
        outcomes[k].bad += clean(cov.trace) ? 0 : 1;
        for (int d : d_values(job.m)) {
            const auto fixed =
                mm_design_precoder_fixed_d(inst, std::vector<int>(inst.users(), d), mm_options(cfg, seed));
            outcomes[k].fixed.push_back(min_rate(inst, fixed.V.covariances()));
            outcomes[k].fixed_time.push_back(fixed.trace.runtime_s);
            outcomes[k].bad += clean(fixed.trace) ? 0 : 1;
        }
    });
    ExperimentResult out;
    io::CsvTable t;
    t.metadata = common_metadata(spec);
    t.metadata.push_back("L=M for every row; snr_db=" + format_double(spec.config.snr_db) +
                         "; trials=" + std::to_string(spec.trials));
    t.header = {"M", "mode", "d", "mean_minrate", "mean_runtime_s"};
    std::size_t k = 0;
    for (int m : spec.m_grid) {
        const auto ds = d_values(m);
        std::vector<double> cov, cov_time;
        std::vector<std::vector<double>> fixed(ds.size()), fixed_time(ds.size());
        for (int trial = 0; trial < spec.trials; ++trial, ++k) {
            const Outcome& o = outcomes[k];
            cov.push_back(o.cov);
            cov_time.push_back(o.cov_time);
            for (std::size_t a = 0; a < ds.size(); ++a) {
                fixed[a].push_back(o.fixed[a]);
                fixed_time[a].push_back(o.fixed_time[a]);
            }
            out.nonconverged += o.bad;
        }
        t.add_row({std::to_string(m), "cov", "", format_double(stats(cov).mean), format_double(stats(cov_time).mean)});
        for (std::size_t a = 0; a < ds.size(); ++a) {
            t.add_row({std::to_string(m), "fixed_d", std::to_string(ds[a]), format_double(stats(fixed[a]).mean),
                       format_double(stats(fixed_time[a]).mean)});
        }
    }
    out.tables.push_back(std::move(t));
    return out;
}

ExperimentResult run_init_histogram(const ExperimentSpec& spec) {
    spec.validate();
    const SystemInstance inst = base_instance(spec);
    std::vector<double> finals(spec.inits);
    std::vector<int> bad(spec.inits, 0);
    parallel_for(spec.inits, worker_count(spec.threads), [&](int k) {
        const auto seed = Rng::derive(spec.seed(), kInitStream, static_cast<std::uint64_t>(k));
        const auto cov = mm_design_covariance(inst, mm_options(spec.config, seed));
        finals[k] = min_rate(inst, cov.Q);
        bad[k] = clean(cov.trace) ? 0 : 1;
    });
    const Stats st = stats(finals);
    ExperimentResult out;
    io::CsvTable t;
    t.metadata = common_metadata(spec);
    t.metadata.push_back("snr_db=" + format_double(inst.config.snr_db) + " inits=" + std::to_string(spec.inits));
    t.metadata.push_back("isotropic_minrate=" + format_double(min_rate(inst, isotropic_baseline(inst))));
    t.metadata.push_back("mean=" + format_double(st.mean) + " sample_variance=" + format_double(st.variance));
    t.header = {"init_index", "final_minrate"};
    for (int k = 0; k < spec.inits; ++k) {
        t.add_row({std::to_string(k), format_double(finals[k])});
        out.nonconverged += bad[k];
    }
    out.tables.push_back(std::move(t));
    return out;
}

ExperimentResult run_robust_loss(const ExperimentSpec& spec) {
    spec.validate();
    const RobustSpec rs = spec.robust.value_or(RobustSpec{});
    const double sigma2 = robust_scalar(rs.sigma2, "sigma2");
    const double zeta = robust_scalar(rs.zeta, "zeta");
    const int rhos = static_cast<int>(spec.rho_grid.size());
    const int tasks = spec.trials * rhos;
    std::vector<std::optional<double>> loss(tasks);
    std::vector<int> bad(tasks, 0);
    parallel_for(tasks, worker_count(spec.threads), [&](int k) {
        const int trial = k / rhos;
        const double rho = spec.rho_grid[k % rhos];
        SystemInstance hat = trial_instance(spec.config, trial);
        for (auto& row : hat.H) {
            for (auto& h : row) {
                h *= rho * std::sqrt(sigma2);
            }
        }
        const UncertaintyModel model = UncertaintyModel::uniform(hat, rho, sigma2, zeta);
        const auto seed = Rng::derive(spec.seed(), static_cast<std::uint64_t>(trial), 1);
        const auto nominal = mm_design_covariance(hat, mm_options(spec.config, seed));
        const auto robust = mm_design_robust(model, hat, mm_options(spec.config, seed));
        loss[k] = loss_parameter(robust_min_rate(model, hat, nominal.Q), robust_min_rate(model, hat, robust.Q));
        bad[k] = (clean(nominal.trace) ? 0 : 1) + (clean(robust.trace) ? 0 : 1);
    });
    ExperimentResult out;
    io::CsvTable t;
    t.metadata = common_metadata(spec);
    t.metadata.push_back("estimated channels are rho * sqrt(sigma2) times one unit-variance draw per trial");
    t.metadata.push_back("nominal design evaluated with the worst-case rate; sigma2=" + format_double(sigma2));
    t.header = {"rho", "zeta", "max_loss_over_trials", "mean_loss"};
    for (int r = 0; r < rhos; ++r) {
        std::vector<double> defined;
        for (int trial = 0; trial < spec.trials; ++trial) {
            const int k = trial * rhos + r;
            out.nonconverged += bad[k];
            if (loss[k]) {
                defined.push_back(*loss[k]);
            }
        }
        const bool any = !defined.empty();
        t.add_row({format_double(spec.rho_grid[r]), format_double(zeta),
                   any ? format_double(*std::max_element(defined.begin(), defined.end())) : "",
                   any ? format_double(stats(defined).mean) : ""});
    }
    out.tables.push_back(std::move(t));
    return out;
}

ExperimentResult design(const ExperimentSpec& spec) {
    spec.validate();
    const SystemInstance inst = base_instance(spec);
    const MmOptions options = mm_options(spec.config, spec.seed(), true);
    DesignResult r;
    r.mode = spec.mode;
    MmTrace trace;
    io::Json robust_json;
    if (spec.mode == DesignMode::covariance) {
        CovarianceDesign d;
        if (spec.robust) {
            io::Json rj = {{"rho", spec.robust->rho}, {"sigma2", spec.robust->sigma2}, {"zeta", spec.robust->zeta}};
            const UncertaintyModel model = io::uncertainty_from_json(rj, inst);
            d = mm_design_robust(model, inst, options);
            r.rates = robust_rates(model, inst, d.Q).R;
            robust_json = io::uncertainty_to_json(model);
        } else {
            d = mm_design_covariance(inst, options);
            r.rates = rates_from_cov(inst, d.Q).R;
        }
        r.Q = d.Q;
        r.V = extract_precoders(d.Q, spec.eig_threshold);
        trace = d.trace;
    } else {
        if (spec.robust) {
            throw InputError("robust design is available in covariance mode only");
        }
        const auto d = mm_design_precoder_fixed_d(inst, streams(spec, inst), options);
        r.V = d.V;
        r.Q = d.V.covariances();
        r.rates = rates_from_cov(inst, r.Q).R;
        trace = d.trace;
    }
    r.minrate = *std::min_element(r.rates.begin(), r.rates.end());
    r.minrate_history = trace.minrate_history;
    r.t_history = trace.t_history;
    r.stationarity_residual = trace.stationarity_residual;
    r.iterations = trace.iterations;
    r.converged = trace.converged;

    ExperimentResult out;
    io::Json j = design_result_to_json(r);
    j["seed"] = spec.seed();
    j["log_base"] = spec.config.log_base == LogBase::base2 ? "base2" : "natural";
    j["subproblem_nonconverged"] = trace.subproblem_nonconverged;
    j["runtime_s"] = trace.runtime_s;
    if (!robust_json.is_null()) {
        j["robust"] = robust_json;
    }
    out.json = std::move(j);
    out.nonconverged = clean(trace) ? 0 : 1;
    return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    switch (spec.kind) {
    case ExperimentKind::trace:
        return run_trace(spec);
    case ExperimentKind::snr_sweep:
        return run_snr_sweep(spec);
    case ExperimentKind::fairness:
        return run_fairness(spec);
    case ExperimentKind::cov_vs_fixed_d:
        return run_cov_vs_fixed_d(spec);
    case ExperimentKind::init_histogram:
        return run_init_histogram(spec);
    case ExperimentKind::robust_loss:
        return run_robust_loss(spec);
    case ExperimentKind::design:
        return design(spec);
    }
    return design(spec);
}

std::vector<std::string> write_result(const ExperimentSpec& spec, const ExperimentResult& result) {
    namespace fs = std::filesystem;
    std::vector<std::string> written;
    const fs::path target(spec.output_path);
    if (result.json) {
        io::write_text_file(target.string(), result.json->dump(2) + "\n");
        written.push_back(target.string());
    }
    if (result.tables.size() == 1 && !result.json) {
        io::write_text_file(target.string(), result.tables.front().to_string());
        written.push_back(target.string());
        return written;
    }
    for (const auto& t : result.tables) {
        fs::path p = target.parent_path() /
                     (target.stem().string() + "_" + t.name + (target.has_extension() ? target.extension().string() : ".csv"));
        io::write_text_file(p.string(), t.to_string());
        written.push_back(p.string());
    }
    return written;
}

io::Json design_result_to_json(const DesignResult& r) {
    io::Json q = io::Json::array();
    for (const auto& m : r.Q.Q) {
        q.push_back(io::matrix_to_json(m));
    }
    io::Json v = io::Json::array();
    for (const auto& m : r.V.V) {
        v.push_back(io::matrix_to_json(m));
    }
    return {{"mode", r.mode == DesignMode::covariance ? "cov" : "fixed-d"},
            {"Q", q},
            {"V", v},
            {"d", r.V.d},
            {"minrate", r.minrate},
            {"rates", r.rates},
            {"trace", {{"t", r.t_history}, {"minrate", r.minrate_history}}},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"stationarity_residual", r.stationarity_residual}};
}

DesignResult design_result_from_json(const io::Json& j) {
    try {
        DesignResult r;
        const auto mode = j.at("mode").get<std::string>();
        if (mode != "cov" && mode != "fixed-d") {
            throw InputError("design result: unknown mode " + mode);
        }
        r.mode = mode == "cov" ? DesignMode::covariance : DesignMode::fixed_d;
        for (const auto& m : j.at("Q")) {
            r.Q.Q.push_back(io::matrix_from_json(m));
        }
        std::vector<CMatrix> v;
        for (const auto& m : j.at("V")) {
            v.push_back(io::matrix_from_json(m));
        }
        r.V = PrecoderSet::from_matrices(std::move(v));
        r.minrate = j.at("minrate").get<double>();
        r.rates = j.at("rates").get<std::vector<double>>();
        r.t_history = j.at("trace").at("t").get<std::vector<double>>();
        r.minrate_history = j.at("trace").at("minrate").get<std::vector<double>>();
        r.iterations = j.at("iterations").get<int>();
        r.converged = j.at("converged").get<bool>();
        r.stationarity_residual = j.at("stationarity_residual").get<double>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed design result: ") + e.what());
    }
}

int worker_count(int requested) {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MAXMIN_IC_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) {
            n = v;
        }
    }
    if (requested > 0) {
        n = std::min(n, requested);
    }
    return std::max(1, n);
}

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
    if (count <= 0) {
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int k = next++; k < count; k = next++) {
            try {
                body(k);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const int n = std::max(1, std::min(threads, count));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

} // namespace maxmin
