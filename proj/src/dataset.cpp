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

#include "invclass/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <random>

namespace invclass {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Reads one logical record; returns false at EOF. Quoted fields may span
// lines.
bool read_record(std::istream& in, char delimiter, std::vector<std::string>& fields,
                 long& line, bool& blank) {
  fields.clear();
  std::string field;
  bool quoted = false;
  bool any = false;
  bool field_was_quoted = false;
  int ch;
  while ((ch = in.get()) != EOF) {
    any = true;
    const char c = static_cast<char>(ch);
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && trim(field).empty()) {
      quoted = true;
      field_was_quoted = true;
      field.clear();
    } else if (c == delimiter) {
      fields.push_back(field_was_quoted ? field : trim(field));
      field.clear();
      field_was_quoted = false;
    } else if (c == '\n') {
      ++line;
      break;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (!any) return false;
  if (quoted) throw DataError("unterminated quoted field", line);
  fields.push_back(field_was_quoted ? field : trim(field));
  blank = fields.size() == 1 && fields[0].empty() && !field_was_quoted;
  return true;
}

}  // namespace

CsvRecords read_csv_records(std::istream& in, char delimiter) {
  CsvRecords out;
  std::vector<std::string> fields;
  long line = 0;
  bool blank = false;
  while (read_record(in, delimiter, fields, line, blank)) {
    if (!blank) break;
  }
  if (fields.empty() || blank) throw DataError("missing header row", 1);
  out.header = fields;
  long start = line + 1;
  while (read_record(in, delimiter, fields, line, blank)) {
    if (!blank && fields.size() != out.header.size()) {
      throw DataError("row " + std::to_string(start) + " has " + std::to_string(fields.size()) +
                          " fields, header has " + std::to_string(out.header.size()),
                      start);
    }
    if (!blank) out.rows.push_back(fields);
    start = line + 1;
  }
  return out;
}

CsvRecords read_csv_records_file(const std::string& path, char delimiter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_csv_records(in, delimiter);
}

Index RawTable::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw DataError("unknown column '" + name + "'");
  return static_cast<Index>(it - columns.begin());
}

RawTable parse_csv(std::istream& in, const CsvOptions& options) {
  const CsvRecords records = read_csv_records(in, options.delimiter);
  RawTable table;
  table.columns = records.header;
  for (const auto& name : options.required_columns) table.column_index(name);

  const Index n = static_cast<Index>(records.rows.size());
  const Index p = static_cast<Index>(records.header.size());
  table.values.resize(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) {
      const std::string& cell = records.rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
      if (std::find(options.missing_tokens.begin(), options.missing_tokens.end(), cell) !=
          options.missing_tokens.end()) {
        table.values(i, j) = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      double v = 0;
      const char* first = cell.data();
      const char* last = cell.data() + cell.size();
      if (!cell.empty() && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) {
        // +2: one for the header, one for 1-based numbering.
        throw DataError("row " + std::to_string(i + 2) + ", column '" + table.columns[j] +
                            "': cannot parse '" + cell + "' as a number",
                        static_cast<long>(i + 2));
      }
      table.values(i, j) = v;
    }
  }
  return table;
}

RawTable load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return parse_csv(in, options);
}

Index Dataset::feature_index(const std::string& name) const {
  const auto it = std::find(feature_names.begin(), feature_names.end(), name);
  if (it == feature_names.end()) throw ConfigError("unknown feature '" + name + "'");
  return static_cast<Index>(it - feature_names.begin());
}

Dataset Dataset::subset(const std::vector<Index>& rows) const {
  Dataset out;
  out.feature_names = feature_names;
  out.X = X(rows, Eigen::all);
  out.y = y(rows);
  if (!ids.empty()) {
    for (Index r : rows) out.ids.push_back(ids[static_cast<size_t>(r)]);
  }
  return out;
}

Dataset make_dataset(const RawTable& table, const std::string& label_column,
                     const std::string& id_column, double positive_value) {
  const Index label = table.column_index(label_column);
  const Index id = id_column.empty() ? -1 : table.column_index(id_column);
  Dataset out;
  std::vector<Index> features;
  for (Index j = 0; j < static_cast<Index>(table.columns.size()); ++j) {
    if (j == label || j == id) continue;
    features.push_back(j);
    out.feature_names.push_back(table.columns[static_cast<size_t>(j)]);
  }
  out.X = table.values(Eigen::all, features);
  out.y.resize(table.rows());
  for (Index i = 0; i < table.rows(); ++i) {
    const double v = table.values(i, label);
    if (is_missing(v)) {
      throw DataError("row " + std::to_string(i + 2) + ": missing label", static_cast<long>(i + 2));
    }
    out.y[i] = v == positive_value ? 1.0 : -1.0;
    out.ids.push_back(id >= 0 ? std::to_string(static_cast<long long>(table.values(i, id)))
                              : std::to_string(i));
  }
  return out;
}

VectorXd DatasetSchema::normalize(const Eigen::Ref<const VectorXd>& raw) const {
  if (raw.size() != width()) throw ArgumentError("normalize: width mismatch");
  VectorXd out(raw.size());
  for (Index j = 0; j < raw.size(); ++j) {
    const double v = is_missing(raw[j]) ? mean[j] : raw[j];
    const double range = max[j] - min[j];
    out[j] = range > 0 ? std::clamp((v - min[j]) / range, 0.0, 1.0) : 0.0;
  }
  return out;
}

VectorXd DatasetSchema::denormalize(const Eigen::Ref<const VectorXd>& normalized) const {
  if (normalized.size() != width()) throw ArgumentError("denormalize: width mismatch");
  return min.array() + normalized.array() * (max - min).array();
}

DatasetSchema fit_preprocess(const MatrixXd& train_raw, std::vector<std::string> names) {
  if (static_cast<Index>(names.size()) != train_raw.cols()) {
    throw ArgumentError("fit_preprocess: one name per column required");
  }
  DatasetSchema schema;
  schema.feature_names = std::move(names);
  const Index p = train_raw.cols();
  schema.min.resize(p);
  schema.max.resize(p);
  schema.mean.resize(p);
  for (Index j = 0; j < p; ++j) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double sum = 0;
    long count = 0;
    for (Index i = 0; i < train_raw.rows(); ++i) {
      const double v = train_raw(i, j);
      if (is_missing(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
      ++count;
    }
    if (count == 0) {
      lo = hi = sum = 0;
      count = 1;
    }
    schema.min[j] = lo;
    schema.max[j] = hi;
    schema.mean[j] = sum / static_cast<double>(count);
    if (!(hi > lo)) {
      schema.warnings.push_back("column '" + schema.feature_names[static_cast<size_t>(j)] +
                                "' is constant in training data; mapped to 0");
    }
  }
  return schema;
}

MatrixXd apply_preprocess(const MatrixXd& raw, const DatasetSchema& schema) {
  MatrixXd out(raw.rows(), raw.cols());
  for (Index i = 0; i < raw.rows(); ++i) out.row(i) = schema.normalize(raw.row(i).transpose());
  return out;
}

std::vector<Index> SplitPlan::fold_rows(int fold) const {
  std::vector<Index> out;
  for (size_t k = 0; k < test.size(); ++k) {
    if (test_fold[k] == fold) out.push_back(test[k]);
  }
  return out;
}

std::vector<Index> SplitPlan::rest_of_test(int fold) const {
  std::vector<Index> out;
  for (size_t k = 0; k < test.size(); ++k) {
    if (test_fold[k] != fold) out.push_back(test[k]);
  }
  return out;
}

SplitPlan make_split(Index n, std::uint64_t seed, int folds) {
  if (folds < 2) throw ConfigError("make_split: need at least 2 folds");
  if (n < 2 * folds) {
    throw ConfigError("make_split: need at least " + std::to_string(2 * folds) + " rows, got " +
                      std::to_string(n));
  }
  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  SplitPlan plan;
  plan.folds = folds;
  const auto n_train = static_cast<size_t>((n + 1) / 2);
  plan.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  plan.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(plan.train.begin(), plan.train.end());
  std::sort(plan.test.begin(), plan.test.end());
  // Fold ids follow the shuffled order so tenths are random subsets.
  std::vector<int> fold_of(static_cast<size_t>(n), -1);
  for (size_t k = n_train; k < order.size(); ++k) {
    fold_of[static_cast<size_t>(order[k])] = static_cast<int>((k - n_train) % static_cast<size_t>(folds));
  }
  for (Index row : plan.test) plan.test_fold.push_back(fold_of[static_cast<size_t>(row)]);
  return plan;
}

}  // namespace invclass
