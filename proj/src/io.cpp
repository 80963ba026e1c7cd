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

#include "maxmin/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace maxmin::io {

namespace {

const Json& require(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw InputError(std::string("missing key \"") + key + "\"");
    }
    return j.at(key);
}

double number(const Json& j, const std::string& what) {
    if (!j.is_number()) {
        throw InputError(what + " must be a number");
    }
    return j.get<double>();
}

std::vector<int> per_user_ints(const Json& j, int n, const std::string& what) {
    if (j.is_number_integer()) {
        return std::vector<int>(n, j.get<int>());
    }
    if (!j.is_array()) {
        throw InputError(what + " must be an integer or a list of integers");
    }
    std::vector<int> out;
    for (const auto& v : j) {
        if (!v.is_number_integer()) {
            throw InputError(what + " must contain integers");
        }
        out.push_back(v.get<int>());
    }
    return out;
}

PairGrid<double> pair_grid(const Json& j, int n, const std::string& what) {
    if (j.is_number()) {
        return PairGrid<double>(n, std::vector<double>(n, j.get<double>()));
    }
    if (!j.is_array() || static_cast<int>(j.size()) != n) {
        throw InputError(what + " must be a scalar or an N x N grid");
    }
    PairGrid<double> out(n);
    for (int r = 0; r < n; ++r) {
        if (!j[r].is_array() || static_cast<int>(j[r].size()) != n) {
            throw InputError(what + " must be a scalar or an N x N grid");
        }
        for (int c = 0; c < n; ++c) {
            out[r].push_back(number(j[r][c], what));
        }
    }
    return out;
}

SystemConfig parse_config(const Json& j) {
    SystemConfig c;
    if (j.contains("N")) {
        c.N = j.at("N").get<int>();
        if (c.N < 1) {
            throw InputError("N must be >= 1");
        }
        c.M.assign(c.N, 4);
        c.L.assign(c.N, 4);
    }
    if (j.contains("M")) {
        c.M = per_user_ints(j.at("M"), c.N, "M");
    }
    if (j.contains("L")) {
        c.L = per_user_ints(j.at("L"), c.N, "L");
    }
    if (j.contains("snr_db")) {
        c.snr_db = number(j.at("snr_db"), "snr_db");
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer() || j.at("seed").get<long long>() < 0) {
            throw InputError("seed must be a non-negative integer");
        }
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("epsilon")) {
        c.epsilon = number(j.at("epsilon"), "epsilon");
    }
    if (j.contains("max_iters")) {
        c.max_iters = j.at("max_iters").get<int>();
    }
    if (j.contains("log_base")) {
        const auto b = j.at("log_base").get<std::string>();
        if (b == "base2" || b == "2" || b == "bits") {
            c.log_base = LogBase::base2;
        } else if (b == "natural" || b == "e" || b == "nats") {
            c.log_base = LogBase::natural;
        } else {
            throw InputError("log_base must be \"base2\" or \"natural\"");
        }
    }
    c.validate();
    return c;
}

} // namespace

Json matrix_to_json(const CMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back({{"re", m(r, c).real()}, {"im", m(r, c).imag()}});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

CMatrix matrix_from_json(const Json& j) {
    if (!j.is_array()) {
        throw InputError("matrix must be an array of rows");
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j[0].size());
    CMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw InputError("matrix rows must have equal length");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            const Json& e = row[static_cast<std::size_t>(c)];
            if (e.is_number()) {
                m(r, c) = e.get<double>();
            } else {
                m(r, c) = cdouble(number(require(e, "re"), "re"), number(require(e, "im"), "im"));
            }
        }
    }
    return m;
}

Json config_to_json(const SystemConfig& config) {
    return {{"N", config.N},
            {"M", config.M},
            {"L", config.L},
            {"snr_db", config.snr_db},
            {"seed", config.seed},
            {"epsilon", config.epsilon},
            {"max_iters", config.max_iters},
            {"log_base", config.log_base == LogBase::base2 ? "base2" : "natural"}};
}

SystemConfig config_from_json(const Json& j) {
    if (!j.is_object()) {
        throw InputError("config must be a JSON object");
    }
    try {
        return parse_config(j);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed config: ") + e.what());
    }
}

Json instance_to_json(const SystemInstance& instance) {
    Json h = Json::array();
    for (const auto& row : instance.H) {
        Json r = Json::array();
        for (const auto& m : row) {
            r.push_back(matrix_to_json(m));
        }
        h.push_back(std::move(r));
    }
    Json gamma = Json::array();
    for (const auto& g : instance.Gamma) {
        gamma.push_back(matrix_to_json(g));
    }
    return {{"config", config_to_json(instance.config)}, {"H", h}, {"Gamma", gamma}, {"p", instance.p}};
}

SystemInstance instance_from_json(const Json& j) {
    try {
        SystemInstance inst;
        const Json& h = require(j, "H");
        const Json& gamma = require(j, "Gamma");
        const Json& p = require(j, "p");
        if (!h.is_array() || !gamma.is_array() || !p.is_array()) {
            throw InputError("H, Gamma and p must be arrays");
        }
        const int n = static_cast<int>(p.size());
        if (static_cast<int>(h.size()) != n || static_cast<int>(gamma.size()) != n) {
            throw DimensionError("H, Gamma and p disagree on the user count");
        }
        inst.config = j.contains("config") ? config_from_json(j.at("config")) : SystemConfig{};
        for (int a = 0; a < n; ++a) {
            if (!h[a].is_array() || static_cast<int>(h[a].size()) != n) {
                throw DimensionError("H must be an N x N grid of matrices");
            }
            std::vector<CMatrix> row;
            for (int b = 0; b < n; ++b) {
                row.push_back(matrix_from_json(h[a][b]));
            }
            inst.H.push_back(std::move(row));
            inst.Gamma.push_back(matrix_from_json(gamma[a]));
            inst.p.push_back(number(p[a], "p"));
        }
        inst.config.N = n;
        inst.config.M.resize(n);
        inst.config.L.resize(n);
        for (int a = 0; a < n; ++a) {
            inst.config.M[a] = static_cast<int>(inst.H[a][a].cols());
            inst.config.L[a] = static_cast<int>(inst.Gamma[a].rows());
        }
        const auto problems = validate(inst);
        if (!problems.empty()) {
            std::string msg = "invalid instance:";
            for (const auto& s : problems) {
                msg += " " + s + ";";
            }
            throw InputError(msg);
        }
        return inst;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed instance JSON: ") + e.what());
    }
}

UncertaintyModel uncertainty_from_json(const Json& j, const SystemInstance& instance) {
    const int n = instance.users();
    UncertaintyModel m = UncertaintyModel::nominal(instance);
    if (!j.is_object()) {
        throw InputError("robust must be a JSON object");
    }
    if (j.contains("rho")) {
        m.rho = pair_grid(j.at("rho"), n, "rho");
    }
    if (j.contains("sigma2")) {
        m.sigma2 = pair_grid(j.at("sigma2"), n, "sigma2");
    }
    if (j.contains("zeta")) {
        const Json& z = j.at("zeta");
        if (z.is_number()) {
            m.zeta.assign(n, z.get<double>());
        } else if (z.is_array() && static_cast<int>(z.size()) == n) {
            m.zeta.clear();
            for (const auto& v : z) {
                m.zeta.push_back(number(v, "zeta"));
            }
        } else {
            throw InputError("zeta must be a scalar or a list of N values");
        }
    }
    m.validate(instance);
    return m;
}

Json uncertainty_to_json(const UncertaintyModel& model) {
    return {{"rho", model.rho}, {"sigma2", model.sigma2}, {"zeta", model.zeta}};
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path + " for reading");
    }
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoError("write to " + path + " failed");
    }
}

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    for (int prec = 6; prec <= 17; ++prec) {
        std::ostringstream os;
        os.imbue(std::locale::classic());
        os << std::setprecision(prec) << v;
        if (std::stod(os.str()) == v) {
            return os.str();
        }
    }
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17) << v;
    return os.str();
}

std::string CsvTable::to_string() const {
    auto quote = [](const std::string& cell) {
        if (cell.find_first_of(",\"\r\n") == std::string::npos) {
            return cell;
        }
        std::string q = "\"";
        for (char ch : cell) {
            q += ch;
            if (ch == '"') {
                q += '"';
            }
        }
        return q + "\"";
    };
    auto line = [&](const std::vector<std::string>& cells) {
        std::string s;
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k > 0) {
                s += ',';
            }
            s += quote(cells[k]);
        }
        return s + "\r\n";
    };
    std::string out;
    for (const auto& m : metadata) {
        out += "# " + m + "\r\n";
    }
    out += line(header);
    for (const auto& r : rows) {
        out += line(r);
    }
    return out;
}

} // namespace maxmin::io
