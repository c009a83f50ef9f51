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

#include "fairbound/table.h"

#include <cmath>
#include <string>

#include "fairbound/error.h"

namespace fairbound {

std::size_t FindVariable(std::span<const Variable> variables,
                         std::string_view name) {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].name == name) return i;
  }
  ThrowError(ErrorCode::kUnknownVariable,
             "no variable named '" + std::string(name) + "'");
}

ProbabilityTable::ProbabilityTable(std::vector<Variable> variables)
    : variables_(std::move(variables)) {}

std::size_t ProbabilityTable::IndexOf(std::string_view name) const {
  return FindVariable(variables_, name);
}

void ProbabilityTable::CheckCell(const Cell& cell) const {
  if (cell.size() != variables_.size()) {
    ThrowError(ErrorCode::kInvalidArgument, "cell has wrong arity");
  }
  for (std::size_t i = 0; i < cell.size(); ++i) {
    if (cell[i] < 0 || static_cast<std::size_t>(cell[i]) >= variables_[i].arity()) {
      ThrowError(ErrorCode::kInvalidArgument,
                 "category index out of range for '" + variables_[i].name + "'");
    }
  }
}

void ProbabilityTable::Add(const Cell& cell, double p) {
  CheckCell(cell);
  if (p == 0.0) return;
  cells_[cell] += p;
}

double ProbabilityTable::Get(const Cell& cell) const {
  const auto it = cells_.find(cell);
  return it == cells_.end() ? 0.0 : it->second;
}

double ProbabilityTable::Total() const {
  double total = 0.0;
  for (const auto& [cell, p] : cells_) total += p;
  return total;
}

void ProbabilityTable::Normalize() {
  const double total = Total();
  if (!(total > 0.0)) {
    ThrowError(ErrorCode::kDegenerateResult, "cannot normalise an empty table");
  }
  for (auto& [cell, p] : cells_) p /= total;
}

ProbabilityTable ProbabilityTable::Marginalize(
    std::span<const std::string> keep) const {
  std::vector<std::size_t> index;
  std::vector<Variable> vars;
  for (const std::string& name : keep) {
    index.push_back(IndexOf(name));
    vars.push_back(variables_[index.back()]);
  }
  ProbabilityTable out(std::move(vars));
  Cell reduced(index.size());
  for (const auto& [cell, p] : cells_) {
    for (std::size_t i = 0; i < index.size(); ++i) reduced[i] = cell[index[i]];
    out.cells_[reduced] += p;
  }
  return out;
}

double TotalVariation(const ProbabilityTable& a, const ProbabilityTable& b) {
  if (a.variables() != b.variables()) {
    ThrowError(ErrorCode::kDomainMismatch,
               "total variation needs tables over the same variables");
  }
  double sum = 0.0;
  for (const auto& [cell, p] : a.cells()) sum += std::abs(p - b.Get(cell));
  for (const auto& [cell, p] : b.cells()) {
    if (!a.cells().contains(cell)) sum += std::abs(p);
  }
  return 0.5 * sum;
}

ConditionalTable::ConditionalTable(std::vector<Variable> target,
                                   std::vector<Variable> given)
    : target_(std::move(target)), given_(std::move(given)) {}

void ConditionalTable::Set(const Cell& given, const Cell& target, double p) {
  if (given.size() != given_.size() || target.size() != target_.size()) {
    ThrowError(ErrorCode::kInvalidArgument, "conditional cell has wrong arity");
  }
  columns_[given][target] = p;
}

const std::map<Cell, double>* ConditionalTable::Column(const Cell& given) const {
  const auto it = columns_.find(given);
  return it == columns_.end() ? nullptr : &it->second;
}

void ConditionalTable::Validate() const {
  for (const auto& [given, column] : columns_) {
    double total = 0.0;
    for (const auto& [target, p] : column) {
      if (!(p >= 0.0)) {
        ThrowError(ErrorCode::kInvalidArgument, "negative conditional entry");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      ThrowError(ErrorCode::kInvalidArgument,
                 "conditional column sums to " + std::to_string(total));
    }
  }
}

std::size_t ProductDomainSize(std::span<const Variable> variables) {
  std::size_t size = 1;
  for (const Variable& v : variables) {
    if (v.arity() != 0 && size > (std::size_t{1} << 62) / v.arity()) {
      ThrowError(ErrorCode::kOverflow, "product domain too large");
    }
    size *= v.arity();
  }
  return size;
}

Cell DecodeCell(std::span<const Variable> variables, std::size_t flat) {
  Cell cell(variables.size());
  for (std::size_t i = variables.size(); i-- > 0;) {
    const std::size_t arity = variables[i].arity();
    cell[i] = static_cast<int>(flat % arity);
    flat /= arity;
  }
  return cell;
}

}  // namespace fairbound
