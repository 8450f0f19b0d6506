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

#include "invclass/student.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace invclass::student {

namespace {

struct Binary {
  const char* column;
  const char* zero;  // level mapped to 0
  const char* one;   // level mapped to 1
  const char* name;
};

const Binary kBinaries[] = {
    {"school", "GP", "MS", "school_MS"},
    {"sex", "F", "M", "sex_M"},
    {"address", "R", "U", "address_U"},
    {"famsize", "LE3", "GT3", "famsize_GT3"},
    {"Pstatus", "A", "T", "Pstatus_T"},
    {"schoolsup", "no", "yes", "schoolsup"},
    {"famsup", "no", "yes", "famsup"},
    {"paid", "no", "yes", "paid"},
    {"activities", "no", "yes", "activities"},
    {"nursery", "no", "yes", "nursery"},
    {"higher", "no", "yes", "higher"},
    {"internet", "no", "yes", "internet"},
    {"romantic", "no", "yes", "romantic"},
};

const char* const kNumeric[] = {"age",     "Medu",     "Fedu",  "traveltime", "studytime",
                                "failures", "famrel",  "freetime", "goout",   "Dalc",
                                "Walc",    "health",   "absences"};

struct Nominal {
  const char* column;
  std::vector<std::string> levels;
};

const std::vector<Nominal>& nominals() {
  static const std::vector<Nominal> n{
      {"Mjob", {"at_home", "health", "other", "services", "teacher"}},
      {"Fjob", {"at_home", "health", "other", "services", "teacher"}},
      {"reason", {"course", "home", "other", "reputation"}},
      {"guardian", {"father", "mother", "other"}},
  };
  return n;
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace

const std::vector<std::string>& raw_columns() {
  static const std::vector<std::string> cols{
      "school",  "sex",       "age",       "address",  "famsize",    "Pstatus",  "Medu",
      "Fedu",    "Mjob",      "Fjob",      "reason",   "guardian",   "traveltime", "studytime",
      "failures", "schoolsup", "famsup",   "paid",     "activities", "nursery",  "higher",
      "internet", "romantic", "famrel",    "freetime", "goout",      "Dalc",     "Walc",
      "health",  "absences",  "G1",        "G2",       "G3"};
  return cols;
}

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& b : kBinaries) out.emplace_back(b.name);
    for (const char* c : kNumeric) out.emplace_back(c);
    for (const auto& n : nominals()) {
      for (const auto& level : n.levels) out.push_back(std::string(n.column) + "_" + level);
    }
    return out;
  }();
  return names;
}

Dataset encode(const CsvRecords& raw) {
  auto col = [&](const std::string& name) {
    const auto it = std::find(raw.header.begin(), raw.header.end(), name);
    if (it == raw.header.end()) throw DataError("student data: missing column '" + name + "'", 1);
    return static_cast<size_t>(it - raw.header.begin());
  };
  const auto n = static_cast<Index>(raw.rows.size());
  Dataset d;
  d.feature_names = feature_names();
  d.X.resize(n, static_cast<Index>(d.feature_names.size()));
  d.y.resize(n);

  for (Index i = 0; i < n; ++i) {
    const auto& row = raw.rows[static_cast<size_t>(i)];
    const long line = static_cast<long>(i) + 2;
    auto field = [&](const std::string& name) { return strip(row[col(name)]); };
    auto fail = [&](const std::string& what) {
      return DataError("student data, line " + std::to_string(line) + ": " + what, line);
    };
    auto number = [&](const std::string& name) {
      const std::string v = field(name);
      try {
        size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
      } catch (const std::exception&) {
        throw fail("column '" + name + "' has non-numeric value '" + v + "'");
      }
    };
    Index j = 0;
    for (const auto& b : kBinaries) {
      const std::string v = field(b.column);
      if (v != b.one && v != b.zero) {
        throw fail("column '" + std::string(b.column) + "' has unknown level '" + v + "'");
      }
      d.X(i, j++) = v == b.one ? 1.0 : 0.0;
    }
    for (const char* c : kNumeric) d.X(i, j++) = number(c);
    for (const auto& nom : nominals()) {
      const std::string v = field(nom.column);
      const auto it = std::find(nom.levels.begin(), nom.levels.end(), v);
      if (it == nom.levels.end()) {
        throw fail("column '" + std::string(nom.column) + "' has unknown level '" + v + "'");
      }
      for (const auto& level : nom.levels) d.X(i, j++) = level == v ? 1.0 : 0.0;
    }
    d.y[i] = number("G3") <= 13.0 ? 1.0 : -1.0;
    d.ids.push_back(std::to_string(i + 1));
  }
  return d;
}

Dataset load(const std::string& path) { return encode(read_csv_records_file(path, ';')); }

void write_encoded_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out.precision(17);
  out << "id";
  for (const auto& name : data.feature_names) out << ',' << name;
  out << ",y\n";
  for (Index i = 0; i < data.rows(); ++i) {
    out << (data.ids.empty() ? std::to_string(i + 1) : data.ids[static_cast<size_t>(i)]);
    for (Index j = 0; j < data.width(); ++j) out << ',' << data.X(i, j);
    out << ',' << data.y[i] << '\n';
  }
}

nlohmann::json default_config_json(const std::string& encoded_path) {
  using nlohmann::json;
  // Costs are budget units per unit of normalized change. Increasing study
  // time or taking paid classes is expensive; cutting drinking, absences or
  // going out is cheaper.
  return json{
      {"dataset", {{"path", encoded_path}, {"delimiter", ","}, {"label", "y"}, {"id", "id"}, {"positive", 1}}},
      {"partition",
       {{"direct", {"studytime", "absences", "Dalc", "Walc", "goout", "freetime", "activities", "paid"}},
        {"indirect", {"health", "famrel"}}}},
      {"costs",
       {{"studytime", {{"up", 4.0}, {"down", 0.0}}},
        {"absences", {{"up", 0.0}, {"down", 3.0}}},
        {"Dalc", {{"up", 0.0}, {"down", 3.0}}},
        {"Walc", {{"up", 0.0}, {"down", 3.0}}},
        {"goout", {{"up", 0.0}, {"down", 2.0}}},
        {"freetime", {{"up", 0.0}, {"down", 2.0}}},
        {"activities", {{"up", 3.0}, {"down", 0.0}}},
        {"paid", {{"up", 5.0}, {"down", 0.0}}}}},
      {"policy", "hardline"},
      {"model", {{"type", "svm"}, {"C", {0.1, 1.0, 10.0}}, {"sigma", {0.5, 1.0, 2.0, 4.0, 8.0}},
                 {"ridge", {1e-4}}, {"folds", 5}}},
      {"optimizer", {{"method", "pgd"}, {"max_iter", 1000}, {"tol", 1e-6}, {"step", "auto"}}},
      {"budgets", {{"start", 0}, {"stop", 20}, {"step", 1}}},
      {"seed", 1}};
}

ExperimentConfig default_config(const std::string& encoded_path) {
  return parse_config(default_config_json(encoded_path));
}

std::string synthetic_raw_csv(int rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  auto pick = [&](std::initializer_list<double> weights) {
    std::discrete_distribution<int> dist(weights);
    return dist(rng);
  };
  auto clampi = [](double v, int lo, int hi) {
    return std::clamp(static_cast<int>(std::lround(v)), lo, hi);
  };
  auto yes = [&](double p) { return u01(rng) < p ? "yes" : "no"; };
  const char* jobs[] = {"at_home", "health", "other", "services", "teacher"};
  const char* reasons[] = {"course", "home", "other", "reputation"};
  const char* guardians[] = {"father", "mother", "other"};

  std::ostringstream out;
  for (size_t k = 0; k < raw_columns().size(); ++k) out << (k ? ";" : "") << raw_columns()[k];
  out << '\n';
  for (int i = 0; i < rows; ++i) {
    const int studytime = 1 + pick({0.32, 0.47, 0.15, 0.06});
    const int failures = pick({0.84, 0.11, 0.03, 0.02});
    const int goout = 1 + pick({0.07, 0.22, 0.32, 0.22, 0.17});
    const int freetime = clampi(2.0 + 0.4 * goout + 0.9 * noise(rng), 1, 5);
    const int dalc = clampi(0.4 + 0.35 * goout + 0.8 * std::abs(noise(rng)), 1, 5);
    const int walc = clampi(dalc + 0.4 * goout - 0.6 + 0.8 * noise(rng), 1, 5);
    const int absences = std::clamp(static_cast<int>(std::floor(-4.0 * std::log(1.0 - u01(rng)) +
                                                                0.8 * (dalc - 1))),
                                    0, 32);
    const int health = clampi(4.0 - 0.3 * (dalc - 1) - 0.1 * (walc - 1) + 1.2 * noise(rng), 1, 5);
    const int famrel = clampi(4.2 - 0.15 * (goout - 3) + 0.1 * (freetime - 3) + 0.8 * noise(rng), 1, 5);
    const bool higher = u01(rng) < 0.9;
    const bool paid = u01(rng) < 0.06;
    const bool activities = u01(rng) < 0.48;
    const int medu = pick({0.01, 0.22, 0.29, 0.21, 0.27});
    const int fedu = clampi(medu - 0.3 + noise(rng), 0, 4);
    const double latent = 12.6 + 1.4 * (studytime - 2) - 1.8 * failures - 0.8 * (dalc - 1) -
                          0.4 * (walc - 2) - 0.12 * absences - 0.5 * (goout - 3) +
                          1.6 * (higher ? 1 : 0) + 0.9 * (paid ? 1 : 0) +
                          0.6 * (activities ? 1 : 0) + 0.25 * (medu - 2) + 0.3 * (health - 3) +
                          1.8 * noise(rng);
    const int g3 = clampi(latent, 0, 20);
    const int g2 = clampi(g3 + noise(rng), 0, 20);
    const int g1 = clampi(g2 + noise(rng), 0, 20);

    out << (u01(rng) < 0.35 ? "MS" : "GP") << ';' << (u01(rng) < 0.41 ? "M" : "F") << ';'
        << 15 + pick({0.17, 0.27, 0.27, 0.21, 0.06, 0.02}) << ';' << (u01(rng) < 0.7 ? "U" : "R")
        << ';' << (u01(rng) < 0.7 ? "GT3" : "LE3") << ';' << (u01(rng) < 0.88 ? "T" : "A") << ';'
        << medu << ';' << fedu << ';' << jobs[pick({0.21, 0.07, 0.40, 0.21, 0.11})] << ';'
        << jobs[pick({0.06, 0.04, 0.57, 0.28, 0.05})] << ';' << reasons[pick({0.44, 0.23, 0.11, 0.22})]
        << ';' << guardians[pick({0.24, 0.70, 0.06})] << ';' << 1 + pick({0.57, 0.33, 0.08, 0.02})
        << ';' << studytime << ';' << failures << ';' << yes(0.1) << ';' << yes(0.61) << ';'
        << (paid ? "yes" : "no") << ';' << (activities ? "yes" : "no") << ';' << yes(0.8) << ';'
        << (higher ? "yes" : "no") << ';' << yes(0.77) << ';' << yes(0.37) << ';' << famrel << ';'
        << freetime << ';' << goout << ';' << dalc << ';' << walc << ';' << health << ';'
        << absences << ';' << g1 << ';' << g2 << ';' << g3 << '\n';
  }
  return out.str();
}

}  // namespace invclass::student
