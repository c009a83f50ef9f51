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

#ifndef FAIRBOUND_CSV_H_
#define FAIRBOUND_CSV_H_

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace fairbound {

struct CsvOptions {
  char delimiter = ',';
  // Runs of spaces/tabs separate fields; quoting is not recognised.
  bool whitespace_delimited = false;
  bool trim_fields = false;
  // Lines starting with this prefix are skipped (empty = none).
  std::string comment_prefix;
};

// Streaming reader for delimited text with RFC 4180 style quoting. Blank
// lines are skipped. Errors are ParseError with "source:line" in the message.
class CsvReader {
 public:
  CsvReader(std::istream& in, CsvOptions options, std::string source_name);

  // Returns false at end of input.
  bool Next(std::vector<std::string>& fields);

  // Line number (1-based) where the most recent record started.
  std::size_t line_number() const { return record_line_; }
  const std::string& source_name() const { return source_name_; }

  [[noreturn]] void Fail(const std::string& message) const;

 private:
  bool ReadLine(std::string& line);

  std::istream& in_;
  CsvOptions options_;
  std::string source_name_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

std::string_view TrimView(std::string_view s);

// Strict number parsing of a whole field; false on trailing garbage.
bool ParseDouble(std::string_view text, double& out);

}  // namespace fairbound

#endif  // FAIRBOUND_CSV_H_
