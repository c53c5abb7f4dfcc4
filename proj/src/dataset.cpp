#include "pars/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "pars/rng.hpp"

namespace pars {

const char* to_string(FeatureKind kind) {
  return kind == FeatureKind::Numeric ? "numeric" : "categorical";
}

std::optional<FeatureKind> feature_kind_from_string(std::string_view s) {
  if (s == "numeric") return FeatureKind::Numeric;
  if (s == "categorical") return FeatureKind::Categorical;
  return std::nullopt;
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < features.size(); ++i)
    if (features[i].name == name) return i;
  return std::nullopt;
}

std::vector<std::size_t> Schema::numeric_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < features.size(); ++i)
    if (features[i].kind == FeatureKind::Numeric) out.push_back(i);
  return out;
}

std::vector<std::size_t> Schema::categorical_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < features.size(); ++i)
    if (features[i].kind == FeatureKind::Categorical) out.push_back(i);
  return out;
}

void Schema::validate() const {
  if (features.empty()) throw Error("schema has no features");
  std::unordered_set<std::string> seen;
  for (const auto& f : features) {
    if (f.name.empty()) throw Error("schema contains an empty feature name");
    if (!seen.insert(f.name).second)
      throw Error("duplicate feature name '" + f.name + "' in schema");
  }
}

std::string cell_to_string(const Cell& c) {
  if (is_missing(c)) return "";
  if (std::holds_alternative<double>(c)) return format_number(cell_number(c));
  return cell_category(c);
}

std::vector<double> Dataset::numeric_column(std::size_t feature) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(cell_number(row[feature]));
  return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);  // UTF-8 BOM
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        field_started = true;  // a delimiter implies a following field
        break;
      case '\r':
        break;
      case '\n':
        if (!record.empty() || !field.empty() || field_started) end_record();
        break;
      default:
        field.push_back(c);
        break;
    }
  }
  if (in_quotes) throw Error("unterminated quoted field in CSV input");
  if (!record.empty() || !field.empty() || field_started) end_record();
  return records;
}

std::string csv_quote(std::string_view field) {
  bool needs_quotes = field.find_first_of(",\"\n\r") != std::string_view::npos ||
                      (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

Schema infer_schema(const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& cells) {
  if (header.empty()) throw Error("empty header row");
  Schema schema;
  for (const auto& name : header)
    schema.features.push_back({std::string(trim(name)), FeatureKind::Numeric});
  for (std::size_t r = 0; r < cells.size(); ++r) {
    if (cells[r].size() != header.size())
      throw Error("ragged CSV: row " + std::to_string(r + 1) + " has " +
                  std::to_string(cells[r].size()) + " cells, expected " +
                  std::to_string(header.size()));
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (schema.features[c].kind == FeatureKind::Categorical) continue;
      std::string_view cell = trim(cells[r][c]);
      if (cell.empty()) continue;
      if (!parse_number(cell)) schema.features[c].kind = FeatureKind::Categorical;
    }
  }
  schema.validate();
  return schema;
}

Dataset dataset_from_cells(const std::vector<std::string>& header,
                           const std::vector<std::vector<std::string>>& cells,
                           const std::optional<Schema>& schema_in, MissingPolicy missing) {
  Schema schema = schema_in ? *schema_in : infer_schema(header, cells);
  schema.validate();
  if (schema_in) {
    if (header.size() != schema.size())
      throw Error("CSV has " + std::to_string(header.size()) + " columns, schema expects " +
                  std::to_string(schema.size()));
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (std::string(trim(header[c])) != schema.features[c].name)
        throw Error("CSV column " + std::to_string(c + 1) + " is '" +
                    std::string(trim(header[c])) + "', schema expects '" +
                    schema.features[c].name + "'");
    }
  }
  if (cells.empty()) throw Error("empty dataset: no data rows");

  Dataset d;
  d.schema = std::move(schema);
  d.rows.reserve(cells.size());
  for (std::size_t r = 0; r < cells.size(); ++r) {
    if (cells[r].size() != d.schema.size())
      throw Error("ragged CSV: row " + std::to_string(r + 1) + " has " +
                  std::to_string(cells[r].size()) + " cells, expected " +
                  std::to_string(d.schema.size()));
    Instance row;
    row.reserve(d.schema.size());
    for (std::size_t c = 0; c < d.schema.size(); ++c) {
      std::string_view cell = trim(cells[r][c]);
      const auto& feat = d.schema.features[c];
      if (cell.empty()) {
        if (missing == MissingPolicy::Reject)
          throw Error("missing value at row " + std::to_string(r + 1) + ", column '" +
                      feat.name + "'");
        row.emplace_back(std::monostate{});
        continue;
      }
      if (feat.kind == FeatureKind::Numeric) {
        auto v = parse_number(cell);
        if (!v)
          throw Error("cannot parse '" + std::string(cell) + "' as a number at row " +
                      std::to_string(r + 1) + ", column '" + feat.name + "'");
        row.emplace_back(*v);
      } else {
        row.emplace_back(std::string(cell));
      }
    }
    d.rows.push_back(std::move(row));
  }
  return d;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error("I/O error while reading '" + path + "'");
  return std::move(buf).str();
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("I/O error while writing '" + path + "'");
}

Dataset load_csv(const std::string& path, const std::optional<Schema>& schema,
                 MissingPolicy missing) {
  auto records = parse_csv(read_text_file(path));
  if (records.empty()) throw Error("empty CSV file: " + path);
  std::vector<std::string> header = std::move(records.front());
  records.erase(records.begin());
  try {
    return dataset_from_cells(header, records, schema, missing);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

std::string to_csv(const Dataset& d) {
  std::string out;
  for (std::size_t c = 0; c < d.schema.size(); ++c) {
    if (c) out += ',';
    out += csv_quote(d.schema.features[c].name);
  }
  out += '\n';
  for (const auto& row : d.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += csv_quote(cell_to_string(row[c]));
    }
    out += '\n';
  }
  return out;
}

void save_csv(const Dataset& d, const std::string& path) { write_text_file(path, to_csv(d)); }

Schema load_schema_sidecar(const std::string& path) {
  auto records = parse_csv(read_text_file(path));
  Schema schema;
  for (std::size_t r = 0; r < records.size(); ++r) {
    if (records[r].size() != 2)
      throw Error(path + ": schema line " + std::to_string(r + 1) +
                  " must be 'name,kind'");
    auto kind = feature_kind_from_string(trim(records[r][1]));
    if (!kind)
      throw Error(path + ": unknown feature kind '" + records[r][1] + "' on line " +
                  std::to_string(r + 1) + " (expected categorical or numeric)");
    schema.features.push_back({std::string(trim(records[r][0])), *kind});
  }
  schema.validate();
  return schema;
}

std::pair<Dataset, Dataset> split(const Dataset& d, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error("train fraction must be in (0,1), got " + format_number(train_fraction));
  if (d.n_rows() < 2) throw Error("need at least 2 rows to split");

  std::vector<std::size_t> order(d.n_rows());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(derive_seed(seed, /*stream=*/1));
  rng.shuffle(order);

  const auto n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(d.n_rows())));
  Dataset train, test;
  train.schema = d.schema;
  test.schema = d.schema;
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < n_train ? train : test).rows.push_back(d.rows[order[i]]);
  return {std::move(train), std::move(test)};
}

}  // namespace pars
