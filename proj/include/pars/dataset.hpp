#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "pars/common.hpp"

namespace pars {

enum class FeatureKind { Categorical, Numeric };

const char* to_string(FeatureKind kind);
std::optional<FeatureKind> feature_kind_from_string(std::string_view s);

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::Categorical;
  bool operator==(const FeatureSpec&) const = default;
};

struct Schema {
  std::vector<FeatureSpec> features;

  std::size_t size() const { return features.size(); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  std::vector<std::size_t> numeric_indices() const;
  std::vector<std::size_t> categorical_indices() const;

  // Throws Error unless names are unique, non-empty, and at least one
  // feature is present.
  void validate() const;

  bool operator==(const Schema&) const = default;
};

// A cell is missing, a finite real, or a category token.
using Cell = std::variant<std::monostate, double, std::string>;
using Instance = std::vector<Cell>;

inline bool is_missing(const Cell& c) { return std::holds_alternative<std::monostate>(c); }
inline double cell_number(const Cell& c) { return std::get<double>(c); }
inline const std::string& cell_category(const Cell& c) { return std::get<std::string>(c); }

std::string cell_to_string(const Cell& c);

struct Dataset {
  Schema schema;
  std::vector<Instance> rows;

  std::size_t n_rows() const { return rows.size(); }
  std::size_t n_features() const { return schema.size(); }

  // Values of one numeric feature, in row order. Pre: no missing cells.
  std::vector<double> numeric_column(std::size_t feature) const;
};

// Missing cells (empty after trimming) are rejected during training
// ingestion; explanation-time inputs may carry them.
enum class MissingPolicy { Reject, Allow };

// Raw rectangular CSV cells (no header) -> schema. A column is numeric iff
// every non-missing cell parses as a finite real; otherwise categorical.
Schema infer_schema(const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& cells);

Dataset dataset_from_cells(const std::vector<std::string>& header,
                           const std::vector<std::vector<std::string>>& cells,
                           const std::optional<Schema>& schema = std::nullopt,
                           MissingPolicy missing = MissingPolicy::Reject);

Dataset load_csv(const std::string& path, const std::optional<Schema>& schema = std::nullopt,
                 MissingPolicy missing = MissingPolicy::Reject);

std::string to_csv(const Dataset& d);
void save_csv(const Dataset& d, const std::string& path);

// Sidecar file: one `name,kind` line per feature, kind in {categorical,numeric}.
Schema load_schema_sidecar(const std::string& path);

// Seeded shuffle, |train| = round(fraction * n), exact partition.
std::pair<Dataset, Dataset> split(const Dataset& d, double train_fraction, std::uint64_t seed);

// RFC-4180 style parsing: comma delimiter, optional double-quoted fields with
// "" escapes; embedded newlines allowed inside quotes.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);
std::string csv_quote(std::string_view field);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace pars
