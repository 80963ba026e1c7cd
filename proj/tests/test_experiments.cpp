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
#include "maxmin/oracles.hpp"
#include "maxmin/rates.hpp"
#include "support.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>
#include <stdexcept>

using namespace maxmin;

namespace {

struct Csv {
    std::vector<std::string> metadata;
    std::vector<std::string> header;
    std::vector<std::map<std::string, std::string>> rows;

    std::vector<std::string> column(const std::string& name) const {
        std::vector<std::string> out;
        for (const auto& r : rows) {
            out.push_back(r.at(name));
        }
        return out;
    }
};

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

Csv parse(const std::string& text) {
    Csv csv;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        REQUIRE(!line.empty());
        REQUIRE(line.back() == '\r');
        line.pop_back();
        if (line[0] == '#') {
            csv.metadata.push_back(line);
        } else if (csv.header.empty()) {
            csv.header = split(line);
        } else {
            const auto cells = split(line);
            REQUIRE(cells.size() == csv.header.size());
            std::map<std::string, std::string> row;
            for (std::size_t k = 0; k < cells.size(); ++k) {
                row[csv.header[k]] = cells[k];
            }
            csv.rows.push_back(row);
        }
    }
    return csv;
}

double num(const std::string& s) { return std::stod(s); }

ExperimentSpec small(ExperimentKind kind) {
    ExperimentSpec s = ExperimentSpec::defaults(kind);
    s.config = SystemConfig::uniform(2, 2, 2, 10.0, 5);
    s.trials = 3;
    s.inits = 6;
    s.threads = 1;
    return s;
}

std::string metadata_value(const Csv& csv, const std::string& key) {
    for (const auto& m : csv.metadata) {
        const auto pos = m.find(key + "=");
        if (pos != std::string::npos) {
            const auto start = pos + key.size() + 1;
            return m.substr(start, m.find(' ', start) - start);
        }
    }
    throw std::runtime_error("metadata key not found: " + key);
}

} // namespace

TEST_CASE("matrix and config JSON round-trips") {
    Rng rng(71);
    const CMatrix m = rng.cscg_matrix(3, 2);
    const CMatrix back = io::matrix_from_json(io::matrix_to_json(m));
    CHECK(back == m);

    SystemConfig c;
    c.N = 2;
    c.M = {3, 1};
    c.L = {2, 4};
    c.snr_db = 7.5;
    c.seed = 0xdeadbeefcafeULL;
    c.epsilon = 1e-5;
    c.max_iters = 77;
    c.log_base = LogBase::natural;
    const SystemConfig r = io::config_from_json(io::config_to_json(c));
    CHECK(r.N == 2);
    CHECK(r.M == c.M);
    CHECK(r.L == c.L);
    CHECK(r.snr_db == c.snr_db);
    CHECK(r.seed == c.seed);
    CHECK(r.epsilon == c.epsilon);
    CHECK(r.max_iters == 77);
    CHECK(r.log_base == LogBase::natural);

    const SystemConfig scalar = io::config_from_json(io::Json::parse(R"({"N": 3, "M": 2, "L": 5})"));
    CHECK(scalar.M == std::vector<int>{2, 2, 2});
    CHECK(scalar.L == std::vector<int>{5, 5, 5});
    CHECK(scalar.log_base == LogBase::base2);

    CHECK_THROWS_AS(io::config_from_json(io::Json::parse(R"({"N": -1})")), InputError);
    CHECK_THROWS_AS(io::config_from_json(io::Json::parse(R"({"N": 2, "M": [1]})")), InputError);
    CHECK_THROWS_AS(io::config_from_json(io::Json::parse(R"({"log_base": "ten"})")), InputError);
    CHECK_THROWS_AS(io::config_from_json(io::Json::parse(R"({"snr_db": "loud"})")), InputError);
}

TEST_CASE("instance and uncertainty JSON round-trips") {
    Rng rng(72);
    const SystemInstance inst = maxmin::testing::random_instance(rng, 3, 3);
    const SystemInstance back = io::instance_from_json(io::instance_to_json(inst));
    for (int j = 0; j < 3; ++j) {
        CHECK(back.p[j] == inst.p[j]);
        CHECK(back.Gamma[j] == inst.Gamma[j]);
        for (int i = 0; i < 3; ++i) {
            CHECK(back.H[j][i] == inst.H[j][i]);
        }
    }
    const CovarianceSet q = maxmin::testing::random_covariances(rng, inst);
    CHECK(min_rate(back, q) == min_rate(inst, q));

    const UncertaintyModel m = UncertaintyModel::uniform(inst, 0.7, 1.5, 0.2);
    const UncertaintyModel mb = io::uncertainty_from_json(io::uncertainty_to_json(m), inst);
    CHECK(mb.rho == m.rho);
    CHECK(mb.sigma2 == m.sigma2);
    CHECK(mb.zeta == m.zeta);

    const UncertaintyModel grid = io::uncertainty_from_json(
        io::Json::parse(R"({"rho": [[1, 0.5, 0.5], [0.5, 1, 0.5], [0.5, 0.5, 1]], "sigma2": 1, "zeta": [0, 0.1, 0.2]})"),
        inst);
    CHECK(grid.rho[0][1] == 0.5);
    CHECK(grid.zeta[2] == 0.2);
    CHECK_THROWS_AS(io::uncertainty_from_json(io::Json::parse(R"({"rho": 2})"), inst), InputError);
}

TEST_CASE("CSV formatting") {
    io::CsvTable t;
    t.metadata = {"note=a"};
    t.header = {"a", "b"};
    t.add_row({"1", "x,y"});
    t.add_row({"2", "say \"hi\""});
    CHECK(t.to_string() == "# note=a\r\na,b\r\n1,\"x,y\"\r\n2,\"say \"\"hi\"\"\"\r\n");

    for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -2.5, 0.0}) {
        CHECK(std::stod(io::format_double(v)) == v);
    }
    CHECK(io::format_double(0.5) == "0.5");
}

TEST_CASE("isotropic baseline") {
    SystemInstance inst = generate_channels(SystemConfig::uniform(2, 4, 4, 0.0));
    inst.p = {4.0, 2.0};
    const CovarianceSet q = isotropic_baseline(inst);
    CHECK(q.Q[0] == CMatrix::Identity(4, 4));
    CHECK(q.Q[1].trace().real() == 2.0);
}

TEST_CASE("trace experiment") {
    ExperimentSpec s = small(ExperimentKind::trace);
    s.snr_grid = {5.0, 15.0};
    const ExperimentResult r = run_trace(s);
    REQUIRE(r.tables.size() == 2);
    double final5 = 0.0;
    double final15 = 0.0;
    for (const auto& table : r.tables) {
        const Csv csv = parse(table.to_string());
        CHECK(csv.header == std::vector<std::string>{"iter", "t", "minrate", "R_1", "R_2"});
        CHECK(!csv.rows.empty());
        CHECK(csv.rows.size() <= static_cast<std::size_t>(s.config.max_iters));
        double prev = num(metadata_value(csv, "initial_minrate"));
        for (const auto& m : csv.column("minrate")) {
            CHECK(num(m) >= prev - 1e-6);
            prev = num(m);
        }
        (table.name == "snr5" ? final5 : final15) = prev;
    }
    CHECK(final15 > final5);
}

TEST_CASE("SNR sweep") {
    ExperimentSpec s = small(ExperimentKind::snr_sweep);
    s.snr_grid = {0.0, 10.0, 20.0};
    s.d = std::vector<int>{1, 1};
    const Csv csv = parse(run_snr_sweep(s).tables.at(0).to_string());
    CHECK(csv.header == std::vector<std::string>{"snr_db", "method", "mean_minrate", "std_minrate", "trials"});
    std::map<std::string, std::map<double, double>> mean;
    for (const auto& row : csv.rows) {
        mean[row.at("method")][num(row.at("snr_db"))] = num(row.at("mean_minrate"));
        CHECK(row.at("trials") == "3");
    }
    for (const char* method : {"mm_cov", "mm_fixed_d", "isotropic"}) {
        REQUIRE(mean[method].size() == 3);
        CHECK(mean[method][10.0] > mean[method][0.0]);
        CHECK(mean[method][20.0] > mean[method][10.0]);
    }
    for (double snr : {0.0, 10.0, 20.0}) {
        CHECK(mean["mm_cov"][snr] >= mean["isotropic"][snr]);
    }
}

TEST_CASE("fairness experiment") {
    ExperimentSpec s = small(ExperimentKind::fairness);
    s.config = SystemConfig::uniform(4, 2, 2, 10.0, 3);
    const ExperimentResult r = run_fairness(s);
    REQUIRE(r.tables.size() == 2);
    const Csv rates = parse(r.tables[0].to_string());
    const Csv spread = parse(r.tables[1].to_string());
    CHECK(rates.header == std::vector<std::string>{"trial", "user", "rate", "method"});
    CHECK(rates.rows.size() == 3u * 4u * 2u);
    CHECK(spread.header == std::vector<std::string>{"trial", "method", "spread"});

    std::map<std::pair<std::string, std::string>, std::vector<double>> per;
    for (const auto& row : rates.rows) {
        per[{row.at("trial"), row.at("method")}].push_back(num(row.at("rate")));
    }
    double mm_total = 0.0;
    double iso_total = 0.0;
    for (const auto& row : spread.rows) {
        const auto& v = per[{row.at("trial"), row.at("method")}];
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        CHECK(num(row.at("spread")) == doctest::Approx(*hi - *lo).epsilon(1e-12));
        (row.at("method") == "mm_cov" ? mm_total : iso_total) += num(row.at("spread"));
    }
    CHECK(mm_total < iso_total);
}

TEST_CASE("covariance versus fixed streams") {
    ExperimentSpec s = small(ExperimentKind::cov_vs_fixed_d);
    s.m_grid = {2};
    s.d_grid = {1, 2};
    s.trials = 2;
    const Csv csv = parse(run_cov_vs_fixed_d(s).tables.at(0).to_string());
    CHECK(csv.header == std::vector<std::string>{"M", "mode", "d", "mean_minrate", "mean_runtime_s"});
    REQUIRE(csv.rows.size() == 3);
    const double cov = num(csv.rows[0].at("mean_minrate"));
    CHECK(csv.rows[0].at("mode") == "cov");
    for (const auto& row : csv.rows) {
        CHECK(num(row.at("mean_runtime_s")) > 0.0);
        CHECK(row.at("M") == "2");
    }
    CHECK(csv.rows[2].at("d") == "2");
    CHECK(std::abs(num(csv.rows[2].at("mean_minrate")) - cov) <= 1e-6);
}

TEST_CASE("initialization histogram") {
    ExperimentSpec s = small(ExperimentKind::init_histogram);
    const Csv csv = parse(run_init_histogram(s).tables.at(0).to_string());
    CHECK(csv.header == std::vector<std::string>{"init_index", "final_minrate"});
    CHECK(csv.rows.size() == 6);
    const double iso = num(metadata_value(csv, "isotropic_minrate"));
    for (const auto& v : csv.column("final_minrate")) {
        CHECK(num(v) >= iso);
    }
    CHECK(num(metadata_value(csv, "sample_variance")) >= 0.0);
}

TEST_CASE("robust loss experiment") {
    ExperimentSpec s = small(ExperimentKind::robust_loss);
    s.rho_grid = {0.8, 1.0};
    s.trials = 2;
    const Csv csv = parse(run_robust_loss(s).tables.at(0).to_string());
    CHECK(csv.header == std::vector<std::string>{"rho", "zeta", "max_loss_over_trials", "mean_loss"});
    REQUIRE(csv.rows.size() == 2);
    for (const auto& row : csv.rows) {
        CHECK(num(row.at("zeta")) == 0.25);
        CHECK(num(row.at("max_loss_over_trials")) < 1.0);
        CHECK(num(row.at("mean_loss")) <= num(row.at("max_loss_over_trials")));
    }
}

TEST_CASE("design result is re-verifiable and round-trips") {
    ExperimentSpec s = small(ExperimentKind::design);
    s.config = SystemConfig::uniform(3, 3, 3, 10.0, 8);
    const ExperimentResult r = design(s);
    REQUIRE(r.json.has_value());
    const DesignResult d = design_result_from_json(*r.json);
    const SystemInstance inst = generate_channels(s.config);
    CHECK(std::abs(min_rate(inst, d.Q) - d.minrate) <= 1e-9);
    CHECK(d.converged);
    CHECK(d.minrate_history.size() == static_cast<std::size_t>(d.iterations));
    const io::Json again = design_result_to_json(d);
    for (const char* key : {"mode", "Q", "V", "d", "minrate", "rates", "trace", "iterations", "converged",
                            "stationarity_residual"}) {
        CHECK(again.at(key) == r.json->at(key));
    }

    ExperimentSpec loaded = s;
    loaded.instance = io::instance_from_json(io::instance_to_json(inst));
    io::Json a = *r.json;
    io::Json b = *design(loaded).json;
    a.erase("runtime_s");
    b.erase("runtime_s");
    CHECK(a == b);

    ExperimentSpec fixed = s;
    fixed.mode = DesignMode::fixed_d;
    fixed.d = std::vector<int>{1, 2, 3};
    const DesignResult fd = design_result_from_json(*design(fixed).json);
    CHECK(fd.V.d == std::vector<int>{1, 2, 3});
    CHECK(std::abs(min_rate(inst, fd.Q) - fd.minrate) <= 1e-9);
}

TEST_CASE("single-user design matches water-filling") {
    ExperimentSpec s = small(ExperimentKind::design);
    s.config = SystemConfig::uniform(1, 3, 3, 10.0, 4);
    s.config.epsilon = 1e-7;
    s.config.max_iters = 20000;
    const DesignResult d = design_result_from_json(*design(s).json);
    const SystemInstance inst = generate_channels(s.config);
    const auto wf = oracles::waterfilling_single_user(inst.H[0][0], inst.Gamma[0], inst.p[0]);
    CHECK(std::abs(d.minrate - wf.capacity) <= 1e-3);
}

TEST_CASE("experiments are deterministic and independent of the thread count") {
    ExperimentSpec s = small(ExperimentKind::snr_sweep);
    s.snr_grid = {5.0};
    const std::string one = run_snr_sweep(s).tables.at(0).to_string();
    s.threads = 3;
    const std::string three = run_snr_sweep(s).tables.at(0).to_string();
    CHECK(one == three);
    CHECK(run_snr_sweep(s).tables.at(0).to_string() == three);
}

TEST_CASE("write_result file naming") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "maxmin_write_result_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    ExperimentSpec s = small(ExperimentKind::trace);
    s.snr_grid = {0.0, 5.0};
    s.output_path = (dir / "tr.csv").string();
    const auto paths = write_result(s, run_trace(s));
    REQUIRE(paths.size() == 2);
    CHECK(fs::exists(dir / "tr_snr0.csv"));
    CHECK(fs::exists(dir / "tr_snr5.csv"));

    io::CsvTable t;
    t.header = {"a"};
    ExperimentResult one;
    one.tables.push_back(t);
    s.output_path = (dir / "single.csv").string();
    CHECK(write_result(s, one) == std::vector<std::string>{s.output_path});
    CHECK(fs::exists(dir / "single.csv"));

    s.output_path = (dir / "missing" / "x.csv").string();
    CHECK_THROWS_AS(write_result(s, one), io::IoError);
    fs::remove_all(dir);
}

TEST_CASE("spec parsing and validation") {
    const ExperimentSpec s = spec_from_json(
        ExperimentKind::snr_sweep,
        io::Json::parse(R"({"N": 2, "M": 2, "L": 2, "trials": 4, "snr_grid": [0, 10], "d": [1, 2]})"));
    CHECK(s.trials == 4);
    CHECK(s.snr_grid == std::vector<double>{0.0, 10.0});
    CHECK(s.d == std::vector<int>{1, 2});
    CHECK(ExperimentSpec::defaults(ExperimentKind::fairness).config.N == 10);
    CHECK(ExperimentSpec::defaults(ExperimentKind::robust_loss).robust.has_value());

    ExperimentSpec scaled = ExperimentSpec::defaults(ExperimentKind::init_histogram);
    scaled.apply_paper_scale();
    CHECK(scaled.trials == 30);
    CHECK(scaled.inits == 200);

    CHECK_THROWS_AS(spec_from_json(ExperimentKind::snr_sweep, io::Json::parse(R"({"trials": 0})")), InputError);
    CHECK_THROWS_AS(spec_from_json(ExperimentKind::design, io::Json::parse(R"({"N": 2, "d": [3, 1], "M": 2})")),
                    InputError);
    CHECK_THROWS_AS(spec_from_json(ExperimentKind::design, io::Json::parse(R"({"N": 3, "d": [1, 1], "M": 2})")),
                    InputError);
    CHECK_NOTHROW(spec_from_json(ExperimentKind::design, io::Json::parse(R"({"N": 3, "d": [2], "M": 2})")));
    CHECK(experiment_kind_from_string("robust_loss") == ExperimentKind::robust_loss);
    CHECK(to_string(ExperimentKind::cov_vs_fixed_d) == "cov_vs_fixed_d");
    CHECK_THROWS_AS(experiment_kind_from_string("nope"), InputError);
}

TEST_CASE("parallel_for runs every index and reports the first failure") {
    std::vector<int> hits(50, 0);
    parallel_for(50, 4, [&](int k) { hits[k] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));

    std::atomic<int> calls{0};
    try {
        parallel_for(20, 3, [&](int k) {
            calls++;
            if (k == 7 || k == 12) {
                throw InputError("fail " + std::to_string(k));
            }
        });
        FAIL("expected an exception");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()) == "fail 7");
    }

    setenv("MAXMIN_IC_THREADS", "2", 1);
    CHECK(worker_count(0) == 2);
    CHECK(worker_count(1) == 1);
    unsetenv("MAXMIN_IC_THREADS");
    CHECK(worker_count(0) >= 1);
}
