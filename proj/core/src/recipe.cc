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

#include "fairbound/recipe.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "fairbound/csv.h"
#include "fairbound/error.h"

namespace fairbound {
namespace {

using nlohmann::json;

[[noreturn]] void Schema(const std::string& message) {
  ThrowError(ErrorCode::kSchemaMismatch, "recipe: " + message);
}

std::vector<std::string> StringList(const json& j, const char* key) {
  if (!j.is_array()) Schema(std::string("'") + key + "' must be an array");
  std::vector<std::string> out;
  for (const json& v : j) {
    if (!v.is_string()) {
      Schema(std::string("'") + key + "' must hold strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

double Number(const json& j, const char* key) {
  if (!j.is_number()) Schema(std::string("'") + key + "' must be a number");
  return j.get<double>();
}

std::string String(const json& j, const char* key) {
  if (!j.is_string()) Schema(std::string("'") + key + "' must be a string");
  return j.get<std::string>();
}

void RejectUnknownKeys(const json& j, std::initializer_list<const char*> allowed,
                       const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; })) {
      Schema("unknown key '" + key + "' in " + where);
    }
  }
}

AttributeSpec ParseAttribute(const json& j) {
  if (!j.is_object()) Schema("each attribute must be an object");
  RejectUnknownKeys(j,
                    {"name", "source", "categories", "values", "default", "bins",
                     "lowercase", "on_unknown"},
                    "attribute");
  AttributeSpec a;
  if (!j.contains("name")) Schema("attribute without a name");
  a.name = String(j["name"], "name");
  a.source = j.contains("source") ? String(j["source"], "source") : a.name;
  if (!j.contains("categories")) {
    Schema("attribute '" + a.name + "' must declare its categories");
  }
  a.categories = StringList(j["categories"], "categories");
  if (j.contains("values") && j.contains("bins")) {
    Schema("attribute '" + a.name + "' has both 'values' and 'bins'");
  }
  if (j.contains("values")) {
    a.kind = AttributeSpec::Kind::kValues;
    if (!j["values"].is_object()) Schema("'values' must be an object");
    for (const auto& [raw, mapped] : j["values"].items()) {
      a.values[raw] = String(mapped, "values");
    }
  }
  if (j.contains("bins")) {
    a.kind = AttributeSpec::Kind::kBins;
    if (!j["bins"].is_array()) Schema("'bins' must be an array");
    for (const json& b : j["bins"]) {
      RejectUnknownKeys(b, {"label", "lt", "le"}, "bin");
      Bin bin;
      bin.label = String(b.at("label"), "label");
      if (b.contains("lt")) bin.lt = Number(b["lt"], "lt");
      if (b.contains("le")) bin.le = Number(b["le"], "le");
      if (bin.lt && bin.le) Schema("a bin takes 'lt' or 'le', not both");
      a.bins.push_back(bin);
    }
  }
  if (j.contains("default")) a.default_value = String(j["default"], "default");
  if (j.contains("lowercase")) {
    if (!j["lowercase"].is_boolean()) Schema("'lowercase' must be a boolean");
    a.lowercase = j["lowercase"].get<bool>();
  }
  if (j.contains("on_unknown")) {
    const std::string mode = String(j["on_unknown"], "on_unknown");
    if (mode == "error") {
      a.on_unknown = AttributeSpec::OnUnknown::kError;
    } else if (mode == "reject_row") {
      a.on_unknown = AttributeSpec::OnUnknown::kRejectRow;
    } else {
      Schema("'on_unknown' must be 'error' or 'reject_row'");
    }
  }
  return a;
}

RowFilter ParseFilter(const json& j) {
  RejectUnknownKeys(j, {"column", "in", "not_in", "range"}, "filter");
  RowFilter f;
  f.column = String(j.at("column"), "column");
  const int kinds = j.contains("in") + j.contains("not_in") + j.contains("range");
  if (kinds != 1) Schema("filter on '" + f.column + "' needs exactly one test");
  if (j.contains("in")) {
    f.kind = RowFilter::Kind::kIn;
    f.values = StringList(j["in"], "in");
  } else if (j.contains("not_in")) {
    f.kind = RowFilter::Kind::kNotIn;
    f.values = StringList(j["not_in"], "not_in");
  } else {
    f.kind = RowFilter::Kind::kRange;
    const json& r = j["range"];
    if (!r.is_array() || r.size() != 2) Schema("'range' must be [lo, hi]");
    f.lo = Number(r[0], "range");
    f.hi = Number(r[1], "range");
  }
  return f;
}

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string FormatNumber(double x) {
  if (std::abs(x) < 1e15 && x == std::floor(x)) {
    return std::to_string(static_cast<long long>(x));
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Raw table with named columns; derived columns are appended.
struct RawRow {
  std::vector<std::string> fields;
  std::string source;
  std::size_t line = 0;
};

[[noreturn]] void RowError(ErrorCode code, const RawRow& row,
                           const std::string& message) {
  ThrowError(code, row.source + ":" + std::to_string(row.line) + ": " + message);
}

double RowNumber(const RawRow& row, std::size_t col, const std::string& name) {
  double v = 0.0;
  if (!ParseDouble(row.fields[col], v)) {
    RowError(ErrorCode::kParseError, row,
             "column '" + name + "': '" + row.fields[col] + "' is not a number");
  }
  return v;
}

}  // namespace

void DatasetRecipe::Validate() const {
  if (sources.empty()) Schema("no sources");
  if (!header && columns.empty()) Schema("'columns' is required without a header");
  if (attributes.empty()) Schema("no attributes");
  std::set<std::string> names;
  for (const AttributeSpec& a : attributes) {
    if (!names.insert(a.name).second) Schema("duplicate attribute '" + a.name + "'");
    std::set<std::string> cats(a.categories.begin(), a.categories.end());
    if (cats.size() != a.categories.size() || cats.size() < 2) {
      Schema("attribute '" + a.name + "' needs at least two distinct categories");
    }
    const auto known = [&](const std::string& c, const char* what) {
      if (!cats.count(c)) {
        Schema("attribute '" + a.name + "': " + what + " '" + c +
               "' is not a declared category");
      }
    };
    for (const auto& [_, mapped] : a.values) known(mapped, "value");
    for (const Bin& b : a.bins) known(b.label, "bin label");
    if (a.default_value) known(*a.default_value, "default");
    if (a.kind == AttributeSpec::Kind::kBins && a.bins.empty()) {
      Schema("attribute '" + a.name + "' has an empty 'bins' list");
    }
  }
  const auto binary = [&](const std::string& name, const std::string& value,
                          const char* role) -> const AttributeSpec& {
    const auto it = std::find_if(attributes.begin(), attributes.end(),
                                 [&](const AttributeSpec& a) { return a.name == name; });
    if (it == attributes.end()) Schema(std::string(role) + " '" + name + "' is not an attribute");
    if (it->categories.size() != 2) Schema(std::string(role) + " '" + name + "' must be binary");
    if (std::find(it->categories.begin(), it->categories.end(), value) ==
        it->categories.end()) {
      Schema(std::string(role) + " value '" + value + "' is not a category");
    }
    return *it;
  };
  binary(label, favourable, "label");
  const AttributeSpec& prot = binary(protected_attribute, privileged, "protected");
  if (prot.categories[1] != privileged) {
    Schema("list the privileged category of '" + protected_attribute + "' last");
  }
}

DatasetRecipe ParseRecipe(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) Schema("top level must be an object");
  RejectUnknownKeys(j,
                    {"format_version", "name", "description", "sources",
                     "delimiter", "header", "columns", "comment_prefix", "trim",
                     "null_values", "derive", "filters", "attributes", "label",
                     "protected"},
                    "recipe");
  if (!j.contains("format_version") || !j["format_version"].is_number_integer() ||
      j["format_version"].get<int>() != kRecipeFormatVersion) {
    Schema("'format_version' must be " + std::to_string(kRecipeFormatVersion));
  }
  DatasetRecipe r;
  r.name = j.contains("name") ? String(j["name"], "name") : "custom";
  if (!j.contains("sources")) Schema("missing 'sources'");
  for (const std::string& s : StringList(j["sources"], "sources")) {
    const std::filesystem::path p(s);
    r.sources.push_back(p.is_absolute() ? p : base_dir / p);
  }
  if (j.contains("delimiter")) {
    const std::string d = String(j["delimiter"], "delimiter");
    if (d == "whitespace") {
      r.whitespace_delimited = true;
    } else if (d.size() == 1) {
      r.delimiter = d[0];
    } else if (d == "\\t") {
      r.delimiter = '\t';
    } else {
      Schema("'delimiter' must be one character or \"whitespace\"");
    }
  }
  if (j.contains("header")) {
    if (!j["header"].is_boolean()) Schema("'header' must be a boolean");
    r.header = j["header"].get<bool>();
  }
  if (j.contains("columns")) r.columns = StringList(j["columns"], "columns");
  if (j.contains("comment_prefix")) {
    r.comment_prefix = String(j["comment_prefix"], "comment_prefix");
  }
  if (j.contains("trim")) {
    if (!j["trim"].is_boolean()) Schema("'trim' must be a boolean");
    r.trim = j["trim"].get<bool>();
  }
  if (j.contains("null_values")) r.null_values = StringList(j["null_values"], "null_values");
  if (j.contains("derive")) {
    for (const json& d : j["derive"]) {
      RejectUnknownKeys(d, {"name", "sum"}, "derive");
      r.derive.push_back({String(d.at("name"), "name"), StringList(d.at("sum"), "sum")});
    }
  }
  if (j.contains("filters")) {
    for (const json& f : j["filters"]) r.filters.push_back(ParseFilter(f));
  }
  if (!j.contains("attributes") || !j["attributes"].is_array()) {
    Schema("'attributes' must be an array");
  }
  for (const json& a : j["attributes"]) r.attributes.push_back(ParseAttribute(a));
  if (!j.contains("label") || !j.contains("protected")) {
    Schema("'label' and 'protected' are required");
  }
  RejectUnknownKeys(j["label"], {"attribute", "favourable"}, "label");
  RejectUnknownKeys(j["protected"], {"attribute", "privileged"}, "protected");
  r.label = String(j["label"].at("attribute"), "attribute");
  r.favourable = String(j["label"].at("favourable"), "favourable");
  r.protected_attribute = String(j["protected"].at("attribute"), "attribute");
  r.privileged = String(j["protected"].at("privileged"), "privileged");
  r.Validate();
  return r;
}

DatasetRecipe LoadRecipe(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) ThrowError(ErrorCode::kIoError, "cannot open '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    ThrowError(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  try {
    return ParseRecipe(j, path.parent_path());
  } catch (const json::exception& e) {
    Schema(e.what());
  }
}

IngestResult Ingest(const DatasetRecipe& recipe) {
  recipe.Validate();
  IngestResult result;
  IngestReport& report = result.report;

  CsvOptions options;
  options.delimiter = recipe.delimiter;
  options.whitespace_delimited = recipe.whitespace_delimited;
  options.trim_fields = recipe.trim;
  options.comment_prefix = recipe.comment_prefix;

  std::vector<std::string> columns;
  std::vector<RawRow> rows;
  for (const auto& path : recipe.sources) {
    std::ifstream in(path);
    if (!in) ThrowError(ErrorCode::kIoError, "cannot open '" + path.string() + "'");
    CsvReader reader(in, options, path.string());
    std::vector<std::string> fields;
    std::vector<std::string> file_columns = recipe.columns;
    if (recipe.header) {
      if (!reader.Next(fields)) reader.Fail("missing header row");
      file_columns = fields;
    }
    if (columns.empty()) {
      columns = file_columns;
    } else if (columns != file_columns) {
      reader.Fail("columns differ from the first source");
    }
    std::size_t n_file = 0;
    while (reader.Next(fields)) {
      if (fields.size() != columns.size()) {
        reader.Fail("expected " + std::to_string(columns.size()) +
                    " fields, got " + std::to_string(fields.size()));
      }
      rows.push_back({fields, path.string(), reader.line_number()});
      ++n_file;
    }
    if (n_file == 0) reader.Fail("no data rows");
  }
  report.rows_read = rows.size();

  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < columns.size(); ++i) col[columns[i]] = i;
  const auto column = [&](const std::string& name) {
    const auto it = col.find(name);
    if (it == col.end()) Schema("column '" + name + "' not found in the sources");
    return it->second;
  };

  // Nulls only matter in the columns the recipe reads.
  std::set<std::size_t> used;
  for (const DerivedColumn& d : recipe.derive) {
    for (const std::string& s : d.sum) used.insert(column(s));
  }
  for (const RowFilter& f : recipe.filters) {
    if (col.count(f.column)) used.insert(col[f.column]);
  }
  for (const AttributeSpec& a : recipe.attributes) {
    if (col.count(a.source)) used.insert(col[a.source]);
  }

  std::vector<std::vector<std::size_t>> derive_cols;
  for (const DerivedColumn& d : recipe.derive) {
    std::vector<std::size_t> inputs;
    for (const std::string& s : d.sum) inputs.push_back(column(s));
    derive_cols.push_back(inputs);
    col[d.name] = columns.size();
    columns.push_back(d.name);
  }
  std::vector<std::size_t> filter_cols;
  for (const RowFilter& f : recipe.filters) filter_cols.push_back(column(f.column));
  std::vector<std::size_t> attr_cols;
  std::vector<Variable> vars;
  for (const AttributeSpec& a : recipe.attributes) {
    attr_cols.push_back(column(a.source));
    vars.push_back({a.name, a.categories});
  }
  std::vector<std::map<std::string, int>> code(recipe.attributes.size());
  for (std::size_t i = 0; i < vars.size(); ++i) {
    for (std::size_t c = 0; c < vars[i].domain.size(); ++c) {
      code[i][vars[i].domain[c]] = static_cast<int>(c);
    }
  }

  CategoricalDataset data(vars);
  data.Reserve(rows.size());
  std::vector<int> coded(vars.size());
  const std::set<std::string> nulls(recipe.null_values.begin(),
                                    recipe.null_values.end());
  for (RawRow& row : rows) {
    if (std::any_of(used.begin(), used.end(),
                    [&](std::size_t c) { return nulls.count(row.fields[c]) > 0; })) {
      ++report.rows_with_nulls;
      continue;
    }
    for (std::size_t d = 0; d < recipe.derive.size(); ++d) {
      double total = 0.0;
      for (std::size_t c : derive_cols[d]) total += RowNumber(row, c, columns[c]);
      row.fields.push_back(FormatNumber(total));
    }
    bool keep = true;
    for (std::size_t f = 0; f < recipe.filters.size() && keep; ++f) {
      const RowFilter& filter = recipe.filters[f];
      const std::string& v = row.fields[filter_cols[f]];
      switch (filter.kind) {
        case RowFilter::Kind::kIn:
          keep = std::find(filter.values.begin(), filter.values.end(), v) !=
                 filter.values.end();
          break;
        case RowFilter::Kind::kNotIn:
          keep = std::find(filter.values.begin(), filter.values.end(), v) ==
                 filter.values.end();
          break;
        case RowFilter::Kind::kRange: {
          const double x = RowNumber(row, filter_cols[f], filter.column);
          keep = x >= filter.lo && x <= filter.hi;
          break;
        }
      }
    }
    if (!keep) {
      ++report.rows_filtered;
      continue;
    }
    bool rejected = false;
    for (std::size_t i = 0; i < recipe.attributes.size() && !rejected; ++i) {
      const AttributeSpec& a = recipe.attributes[i];
      std::string raw = row.fields[attr_cols[i]];
      if (a.lowercase) raw = Lower(raw);
      std::optional<std::string> label;
      switch (a.kind) {
        case AttributeSpec::Kind::kIdentity:
          label = raw;
          break;
        case AttributeSpec::Kind::kValues: {
          const auto it = a.values.find(raw);
          if (it != a.values.end()) {
            label = it->second;
          } else if (a.default_value) {
            label = *a.default_value;
          }
          break;
        }
        case AttributeSpec::Kind::kBins: {
          const double x = RowNumber(row, attr_cols[i], a.source);
          for (const Bin& b : a.bins) {
            if ((b.lt && x < *b.lt) || (b.le && x <= *b.le) || (!b.lt && !b.le)) {
              label = b.label;
              break;
            }
          }
          break;
        }
      }
      const auto it = label ? code[i].find(*label) : code[i].end();
      if (it == code[i].end()) {
        if (a.on_unknown == AttributeSpec::OnUnknown::kRejectRow) {
          rejected = true;
          break;
        }
        RowError(ErrorCode::kUnknownCategory, row,
                 "attribute '" + a.name + "': value '" + row.fields[attr_cols[i]] +
                     "' matches no category");
      }
      coded[i] = it->second;
    }
    if (rejected) {
      ++report.rows_rejected;
      continue;
    }
    data.AddRow(coded);
  }
  report.rows_kept = data.num_rows();
  if (report.rows_kept == 0) {
    ThrowError(ErrorCode::kEmptyDataset, "recipe '" + recipe.name + "' kept no rows");
  }
  result.data = std::move(data);
  return result;
}

}  // namespace fairbound
