/*
 * Copyright 2026 The invclass Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// UCI Student Performance (Portuguese class, student-por.csv): encoding of
// the raw semicolon-separated file into 43 numeric features, a default
// partition/cost configuration, and a synthetic stand-in with the same raw
// layout for tests and offline runs.

#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "invclass/config.hpp"
#include "invclass/dataset.hpp"

namespace invclass::student {

// Raw column names in file order (33 columns, G1..G3 last).
const std::vector<std::string>& raw_columns();

// Encoded feature names in Dataset column order (43 entries).
const std::vector<std::string>& feature_names();

// Yes/no and two-level fields become 0/1, nominal fields one-hot, ordinal
// fields stay numeric; G1 and G2 are dropped. y = +1 when G3 <= 13 (a C or
// below), else -1. Ids are 1-based row numbers. Throws DataError.
Dataset encode(const CsvRecords& raw);
Dataset load(const std::string& path);

// Writes `data` as a comma-separated file with columns
// id, <features...>, y.
void write_encoded_csv(const Dataset& data, const std::string& path);

// Default experiment document for an encoded file at `encoded_path`.
nlohmann::json default_config_json(const std::string& encoded_path);
ExperimentConfig default_config(const std::string& encoded_path = "");

// Synthetic rows in the raw file format. Grades follow a fixed latent model
// driven mainly by study time, failures, alcohol use, absences and going
// out, so budgeted changes can lower the probability of a C or below.
std::string synthetic_raw_csv(int rows, std::uint64_t seed);

}  // namespace invclass::student
