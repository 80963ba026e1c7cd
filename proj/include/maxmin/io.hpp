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
#include "maxmin/mm_core.hpp"
#include "maxmin/robust.hpp"
#include "maxmin/system_model.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace maxmin::io {

using Json = nlohmann::json;

/// Filesystem failure (unreadable input, unwritable output).
class IoError : public Error {
  public:
    using Error::Error;
};

Json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j);

Json config_to_json(const SystemConfig& config);

/// Reads N, M, L, snr_db, seed, epsilon, max_iters and log_base. M and L may be a
/// scalar (every user) or a list; missing keys keep their defaults.
SystemConfig config_from_json(const Json& j);

/// {"config": {...}, "H": [[matrix]], "Gamma": [matrix], "p": [...]} with H[j][i].
Json instance_to_json(const SystemInstance& instance);

/// Throws InputError when the data is malformed or violates an instance invariant.
SystemInstance instance_from_json(const Json& j);

/// {"rho": .., "sigma2": .., "zeta": ..}: rho and sigma2 scalars or N x N grids
/// indexed [j][i], zeta a scalar or a list. Gamma_hat is taken from `instance`.
UncertaintyModel uncertainty_from_json(const Json& j, const SystemInstance& instance);

Json uncertainty_to_json(const UncertaintyModel& model);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// A CSV table with optional '#' metadata lines ahead of the header row.
struct CsvTable {
    std::string name; ///< file suffix when an experiment emits several tables
    std::vector<std::string> metadata;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
    std::string to_string() const;
};

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

} // namespace maxmin::io
