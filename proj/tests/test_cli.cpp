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
#include "maxmin/rates.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

using namespace maxmin;
namespace fs = std::filesystem;

#ifndef MAXMIN_IC_BIN
#error "MAXMIN_IC_BIN must name the CLI executable"
#endif

namespace {

struct Scratch {
    fs::path dir;
    Scratch() : dir(fs::temp_directory_path() / ("maxmin_cli_test_" + std::to_string(::getpid()))) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }

    std::string write(const std::string& name, const std::string& text) const {
        const fs::path p = dir / name;
        std::ofstream(p) << text;
        return p.string();
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args) {
    const std::string cmd = std::string(MAXMIN_IC_BIN) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

const char* kSmall = R"({"N": 2, "M": 2, "L": 2, "snr_db": 10, "seed": 3})";

} // namespace

TEST_CASE("successful design writes a verifiable result") {
    Scratch s;
    const std::string cfg = s.write("cfg.json", kSmall);
    CHECK(run("design --config " + cfg + " --out " + s.path("d.json") + " --dump-instance " + s.path("inst.json")) ==
          0);
    REQUIRE(fs::exists(s.path("d.json")));
    REQUIRE(fs::exists(s.path("inst.json")));
    const SystemInstance inst = io::instance_from_json(io::read_json_file(s.path("inst.json")));
    const io::Json j = io::read_json_file(s.path("d.json"));
    const DesignResult d = design_result_from_json(j);
    CHECK(std::abs(min_rate(inst, d.Q) - d.minrate) <= 1e-9);

    CHECK(run("design --config " + cfg + " --load-instance " + s.path("inst.json") + " --out " + s.path("e.json")) ==
          0);
    io::Json a = j;
    io::Json b = io::read_json_file(s.path("e.json"));
    a.erase("runtime_s");
    b.erase("runtime_s");
    CHECK(a == b);

    CHECK(run("design --config " + cfg + " --mode fixed-d --d 1 --out " + s.path("f.json")) == 0);
    CHECK(design_result_from_json(io::read_json_file(s.path("f.json"))).V.d == std::vector<int>{1, 1});
}

TEST_CASE("seed override changes the channels") {
    Scratch s;
    const std::string cfg = s.write("cfg.json", kSmall);
    CHECK(run("design --config " + cfg + " --seed 11 --out " + s.path("a.json")) == 0);
    CHECK(run("design --config " + cfg + " --seed 12 --out " + s.path("b.json")) == 0);
    CHECK(io::read_json_file(s.path("a.json")).at("minrate") != io::read_json_file(s.path("b.json")).at("minrate"));
    CHECK(io::read_json_file(s.path("a.json")).at("seed") == 11);
}

TEST_CASE("configuration errors exit with 1") {
    Scratch s;
    CHECK(run("design --config " + s.write("bad.json", R"({"N": -1})")) == 1);
    CHECK(run("design --config " + s.write("badm.json", R"({"N": 2, "M": [2]})")) == 1);
    CHECK(run("design --config " + s.write("junk.json", "{ not json")) == 1);
    CHECK(run("design --config " + s.write("d.json", kSmall) + " --mode fixed-d --d 5") == 1);
    CHECK(run("design --mode sideways") == 1);
    CHECK(run("no_such_experiment") == 1);
    CHECK(run("snr_sweep --config " + s.write("t.json", R"({"trials": 0})")) == 1);
}

TEST_CASE("non-convergence exits with 2 unless allowed") {
    Scratch s;
    const std::string cfg = s.write("cfg.json", R"({"N": 2, "M": 2, "L": 2, "max_iters": 1, "epsilon": 1e-9})");
    CHECK(run("design --config " + cfg + " --out " + s.path("x.json")) == 2);
    CHECK(run("design --config " + cfg + " --out " + s.path("y.json") + " --allow-nonconverged") == 0);
    CHECK(fs::exists(s.path("y.json")));
}

TEST_CASE("I/O errors exit with 3") {
    Scratch s;
    CHECK(run("design --config " + s.path("missing.json")) == 3);
    CHECK(run("design --config " + s.write("cfg.json", kSmall) + " --out " + s.path("nodir/out.json")) == 3);
    CHECK(run("design --config " + s.write("cfg2.json", kSmall) + " --load-instance " + s.path("none.json")) == 3);
}

TEST_CASE("experiment subcommands write CSV") {
    Scratch s;
    const std::string cfg = s.write(
        "cfg.json", R"({"N": 2, "M": 2, "L": 2, "trials": 2, "snr_grid": [0, 10], "d": [1], "inits": 3})");
    CHECK(run("snr_sweep --config " + cfg + " --out " + s.path("sweep.csv")) == 0);
    std::ifstream in(s.path("sweep.csv"));
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text.find("snr_db,method,mean_minrate,std_minrate,trials\r\n") != std::string::npos);
    CHECK(run("trace --config " + cfg + " --out " + s.path("tr.csv")) == 0);
    CHECK(fs::exists(s.path("tr_snr0.csv")));
    CHECK(fs::exists(s.path("tr_snr10.csv")));
    CHECK(run("init_histogram --config " + cfg + " --out " + s.path("h.csv")) == 0);
    CHECK(fs::exists(s.path("h.csv")));
}
