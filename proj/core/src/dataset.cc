// Copyright 2026 The fairbound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fairbound/dataset.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "fairbound/csv.h"
#include "fairbound/error.h"

namespace fairbound {

CategoricalDataset::CategoricalDataset(std::vector<Variable> variables)
    : variables_(std::move(variables)) {
  std::set<std::string> names;
  for (const Variable& v : variables_) {
    if (v.arity() < 2) {
      ThrowError(ErrorCode::kInvalidArgument,
                 "variable '" + v.name + "' needs at least two categories");
    }
    if (!names.insert(v.name).second) {
      ThrowError(ErrorCode::kInvalidArgument,
                 "duplicate variable name '" + v.name + "'");
    }
  }
}

std::size_t CategoricalDataset::IndexOf(std::string_view name) const {
  return FindVariable(variables_, name);
}

bool CategoricalDataset::HasVariable(std::string_view name) const {
  return std::any_of(variables_.begin(), variables_.end(),
                     [&](const Variable& v) { return v.name == name; });
}

void CategoricalDataset::AddRow(std::span<const int> row) {
  if (row.size() != variables_.size()) {
    ThrowError(ErrorCode::kInvalidArgument, "row has wrong arity");
  }
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i] < 0 || static_cast<std::size_t>(row[i]) >= variables_[i].arity()) {
      ThrowError(ErrorCode::kInvalidArgument,
                 "category index out of range for '" + variables_[i].name + "'");
    }
  }
  values_.insert(values_.end(), row.begin(), row.end());
}

CategoricalDataset CategoricalDataset::Project(
    std::span<const std::string> names) const {
  std::vector<std::size_t> index;
  std::vector<Variable> vars;
  for (const std::string& name : names) {
    index.push_back(IndexOf(name));
    vars.push_back(variables_[index.back()]);
  }
  CategoricalDataset out(std::move(vars));
  out.Reserve(num_rows());
  std::vector<int> projected(index.size());
  for (std::size_t r = 0; r < num_rows(); ++r) {
    for (std::size_t i = 0; i < index.size(); ++i) projected[i] = at(r, index[i]);
    out.values_.insert(out.values_.end(), projected.begin(), projected.end());
  }
  return out;
}

CategoricalDataset CategoricalDataset::SelectRows(
    std::span<const std::size_t> rows) const {
  CategoricalDataset out(variables_);
  out.Reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= num_rows()) {
      ThrowError(ErrorCode::kInvalidArgument, "row index out of range");
    }
    const auto src = row(r);
    out.values_.insert(out.values_.end(), src.begin(), src.end());
  }
  return out;
}

ProbabilityTable EmpiricalMarginal(const CategoricalDataset& data,
                                   std::span<const std::string> vars) {
  if (data.num_rows() == 0) {
    ThrowError(ErrorCode::kEmptyDataset, "empirical marginal of an empty dataset");
  }
  std::vector<std::size_t> index;
  std::vector<Variable> selected;
  for (const std::string& name : vars) {
    index.push_back(data.IndexOf(name));
    selected.push_back(data.variables()[index.back()]);
  }
  std::map<Cell, std::size_t> counts;
  Cell cell(index.size());
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    for (std::size_t i = 0; i < index.size(); ++i) cell[i] = data.at(r, index[i]);
    ++counts[cell];
  }
  ProbabilityTable table(std::move(selected));
  const double n = static_cast<double>(data.num_rows());
  for (const auto& [c, count] : counts) {
    table.Add(c, static_cast<double>(count) / n);
  }
  return table;
}

ConditionalTable EmpiricalConditional(const CategoricalDataset& data,
                                      std::span<const std::string> target,
                                      std::span<const std::string> given) {
  if (data.num_rows() == 0) {
    ThrowError(ErrorCode::kEmptyDataset,
               "empirical conditional of an empty dataset");
  }
  std::vector<std::size_t> target_index;
  std::vector<std::size_t> given_index;
  std::vector<Variable> target_vars;
  std::vector<Variable> given_vars;
  for (const std::string& name : target) {
    target_index.push_back(data.IndexOf(name));
    target_vars.push_back(data.variables()[target_index.back()]);
  }
  for (const std::string& name : given) {
    given_index.push_back(data.IndexOf(name));
    given_vars.push_back(data.variables()[given_index.back()]);
  }
  std::map<Cell, std::map<Cell, std::size_t>> counts;
  std::map<Cell, std::size_t> totals;
  Cell t(target_index.size());
  Cell g(given_index.size());
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = data.at(r, target_index[i]);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = data.at(r, given_index[i]);
    ++counts[g][t];
    ++totals[g];
  }
  ConditionalTable out(std::move(target_vars), std::move(given_vars));
  for (const auto& [gc, column] : counts) {
    const double total = static_cast<double>(totals[gc]);
    for (const auto& [tc, count] : column) {
      out.Set(gc, tc, static_cast<double>(count) / total);
    }
  }
  return out;
}

CategoricalDataset ReadCategoricalCsv(const std::filesystem::path& path,
                                      char delimiter) {
  std::ifstream in(path);
  if (!in) {
    ThrowError(ErrorCode::kIoError, "cannot open '" + path.string() + "'");
  }
  CsvOptions options;
  options.delimiter = delimiter;
  options.trim_fields = true;
  CsvReader reader(in, options, path.string());
  std::vector<std::string> header;
  if (!reader.Next(header)) reader.Fail("missing header row");
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> fields;
  while (reader.Next(fields)) {
    if (fields.size() != header.size()) {
      reader.Fail("expected " + std::to_string(header.size()) + " fields, got " +
                  std::to_string(fields.size()));
    }
    rows.push_back(fields);
  }
  if (rows.empty()) {
    ThrowError(ErrorCode::kEmptyDataset, "'" + path.string() + "' has no rows");
  }
  std::vector<Variable> vars(header.size());
  std::vector<std::map<std::string, int>> lookup(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    std::set<std::string> labels;
    for (const auto& row : rows) labels.insert(row[c]);
    vars[c].name = header[c];
    vars[c].domain.assign(labels.begin(), labels.end());
    for (std::size_t i = 0; i < vars[c].domain.size(); ++i) {
      lookup[c][vars[c].domain[i]] = static_cast<int>(i);
    }
  }
  CategoricalDataset data(std::move(vars));
  data.Reserve(rows.size());
  std::vector<int> coded(header.size());
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < header.size(); ++c) coded[c] = lookup[c][row[c]];
    data.AddRow(coded);
  }
  return data;
}

void WriteCategoricalCsv(const CategoricalDataset& data, std::ostream& out) {
  const auto& vars = data.variables();
  for (std::size_t c = 0; c < vars.size(); ++c) {
    out << (c ? "," : "") << vars[c].name;
  }
  out << '\n';
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    for (std::size_t c = 0; c < vars.size(); ++c) {
      out << (c ? "," : "") << vars[c].domain[data.at(r, c)];
    }
    out << '\n';
  }
}

}  // namespace fairbound
