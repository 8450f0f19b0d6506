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

// CSV ingestion, mean imputation, min-max normalization and the
// train/test/tenths split used by the validation protocol.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "invclass/core.hpp"

namespace invclass {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct CsvOptions {
  char delimiter = ',';
  // Columns that must be present in the header.
  std::vector<std::string> required_columns;
  // Cells equal to one of these (after trimming) are missing.
  std::vector<std::string> missing_tokens{"", "NA", "NaN", "?"};
};

// Raw string cells, header first. Quoted fields follow RFC 4180.
struct CsvRecords {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvRecords read_csv_records(std::istream& in, char delimiter = ',');
CsvRecords read_csv_records_file(const std::string& path, char delimiter = ',');

// Numeric table; missing cells hold NaN.
struct RawTable {
  std::vector<std::string> columns;
  MatrixXd values;

  Index rows() const { return values.rows(); }
  // Throws DataError for unknown names.
  Index column_index(const std::string& name) const;
};

RawTable parse_csv(std::istream& in, const CsvOptions& options = {});
RawTable load_csv(const std::string& path, const CsvOptions& options = {});

inline bool is_missing(double v) { return v != v; }

struct Dataset {
  std::vector<std::string> feature_names;
  MatrixXd X;  // raw feature values, NaN where missing
  VectorXd y;  // +1 / -1
  std::vector<std::string> ids;

  Index rows() const { return X.rows(); }
  Index width() const { return X.cols(); }
  Index feature_index(const std::string& name) const;
  Dataset subset(const std::vector<Index>& rows) const;
};

// Every column other than the label and id becomes a feature. Rows whose
// label equals `positive_value` get +1, all others -1.
Dataset make_dataset(const RawTable& table, const std::string& label_column,
                     const std::string& id_column = "", double positive_value = 1.0);

struct DatasetSchema {
  std::vector<std::string> feature_names;
  std::string label_column;
  std::string id_column;
  VectorXd min;
  VectorXd max;
  VectorXd mean;
  std::vector<std::string> warnings;

  Index width() const { return min.size(); }
  // Impute, scale and clamp one raw row.
  VectorXd normalize(const Eigen::Ref<const VectorXd>& raw) const;
  // Raw value of a normalized one.
  VectorXd denormalize(const Eigen::Ref<const VectorXd>& normalized) const;
  // Raw-unit size of a normalized change in feature `column`.
  double raw_scale(Index column) const { return max[column] - min[column]; }
};

// Statistics come from `train_raw` only.
DatasetSchema fit_preprocess(const MatrixXd& train_raw, std::vector<std::string> names);
MatrixXd apply_preprocess(const MatrixXd& raw, const DatasetSchema& schema);

struct SplitPlan {
  std::vector<Index> train;
  std::vector<Index> test;
  std::vector<int> test_fold;  // fold id of test[k]
  int folds = 10;

  std::vector<Index> fold_rows(int fold) const;
  std::vector<Index> rest_of_test(int fold) const;
};

// Equal halves (odd n: the extra row goes to training) and tenths of the
// test half. Deterministic in `seed`.
SplitPlan make_split(Index n, std::uint64_t seed, int folds = 10);

}  // namespace invclass
