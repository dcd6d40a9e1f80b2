#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mortml/dataset.hpp"
#include "mortml/schema.hpp"

namespace mortml {

/// One CSV cell; nullopt marks a missing value.
using Cell = std::optional<double>;

/// Parsed CSV contents before imputation and feature selection.
struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_cols() const { return header.size(); }

    bool operator==(const RawTable&) const = default;
};

/// Reads a comma-separated file. The first line must be a header; every
/// data row must have exactly as many cells as the header. Empty cells and
/// the literal token "NA" become missing values; everything else must
/// parse as a finite number ("." decimal point).
RawTable load_csv(const std::filesystem::path& path);

/// Same contract as load_csv, reading from a stream. `origin` is used in
/// error messages.
RawTable parse_csv(std::istream& in, const std::string& origin);

/// Replaces every missing cell with the arithmetic mean of its column's
/// observed cells; observed cells pass through unchanged. A column with no
/// observed cell at all is an error naming the column.
RawTable impute_mean(const RawTable& table);

/// Projects the table onto the schema's feature columns in schema order,
/// drops extra columns, extracts the label column and checks that it holds
/// exact 0/1 values only. The table must already be imputed.
Dataset select_features(const RawTable& table, const FeatureSchema& schema);

/// Feature columns only (no label required) — used for batch scoring
/// inputs. Errors name the first missing schema column.
Matrix select_feature_matrix(const RawTable& table, const FeatureSchema& schema);

/// Writes a dataset back out in the documented CSV dialect (features in
/// schema order, label last).
void write_dataset_csv(const Dataset& ds, const std::filesystem::path& path);

/// Shortest round-trip decimal form of a double ("0.5", "1", "0.6666666666666666").
std::string format_number(double v);

}  // namespace mortml
