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

#include "fairbound/csv.h"

#include <charconv>
#include <cmath>

#include "fairbound/error.h"

namespace fairbound {

std::string_view TrimView(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool ParseDouble(std::string_view text, double& out) {
  text = TrimView(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() &&
         std::isfinite(out);
}

CsvReader::CsvReader(std::istream& in, CsvOptions options,
                     std::string source_name)
    : in_(in), options_(std::move(options)), source_name_(std::move(source_name)) {}

void CsvReader::Fail(const std::string& message) const {
  ThrowError(ErrorCode::kParseError,
             source_name_ + ":" + std::to_string(record_line_) + ": " + message);
}

bool CsvReader::ReadLine(std::string& line) {
  if (!std::getline(in_, line)) return false;
  ++line_;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

bool CsvReader::Next(std::vector<std::string>& fields) {
  fields.clear();
  std::string line;
  while (true) {
    if (!ReadLine(line)) return false;
    if (TrimView(line).empty()) continue;
    if (!options_.comment_prefix.empty() &&
        line.starts_with(options_.comment_prefix)) {
      continue;
    }
    break;
  }
  record_line_ = line_;

  if (options_.whitespace_delimited) {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
      fields.emplace_back(line.substr(i, j - i));
      i = j;
    }
    return true;
  }

  std::string field;
  bool in_quotes = false;
  bool was_quoted = false;
  std::size_t i = 0;
  while (true) {
    if (i >= line.size()) {
      if (in_quotes) {
        // Quoted field spanning lines.
        std::string next;
        if (!ReadLine(next)) Fail("unterminated quoted field");
        field.push_back('\n');
        line = std::move(next);
        i = 0;
        continue;
      }
      break;
    }
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && TrimView(field).empty() && !was_quoted) {
      field.clear();
      in_quotes = true;
      was_quoted = true;
    } else if (c == options_.delimiter) {
      fields.push_back(options_.trim_fields && !was_quoted
                           ? std::string(TrimView(field))
                           : field);
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(c);
    }
    ++i;
  }
  fields.push_back(options_.trim_fields && !was_quoted
                       ? std::string(TrimView(field))
                       : field);
  return true;
}

}  // namespace fairbound
