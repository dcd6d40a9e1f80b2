#include "mortml/table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "mortml/errors.hpp"

namespace mortml {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

Cell parse_cell(const std::string& token, const std::string& origin, std::size_t line_no,
                std::size_t col) {
    if (token.empty() || token == "NA") return std::nullopt;
    double value = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value))
        throw DataError(origin + ":" + std::to_string(line_no) + ": column " + std::to_string(col + 1) +
                        ": '" + token + "' is neither numeric nor a missing marker");
    return value;
}

}  // namespace

RawTable parse_csv(std::istream& in, const std::string& origin) {
    std::string line;
    if (!std::getline(in, line)) throw DataError(origin + ": empty file (header row required)");

    RawTable table;
    for (auto& name : split_line(line)) table.header.push_back(std::move(name));
    if (table.header.empty()) throw DataError(origin + ": header row has no columns");

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto tokens = split_line(line);
        if (tokens.size() != table.header.size())
            throw DataError(origin + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(table.header.size()) + " cells, got " +
                            std::to_string(tokens.size()));
        std::vector<Cell> row;
        row.reserve(tokens.size());
        for (std::size_t c = 0; c < tokens.size(); ++c)
            row.push_back(parse_cell(tokens[c], origin, line_no, c));
        table.rows.push_back(std::move(row));
    }
    return table;
}

RawTable load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return parse_csv(in, path.string());
}

RawTable impute_mean(const RawTable& table) {
    RawTable out = table;
    const std::size_t cols = table.n_cols();
    std::vector<double> sums(cols, 0.0);
    std::vector<std::size_t> counts(cols, 0);
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (row[c]) {
                sums[c] += *row[c];
                ++counts[c];
            }
        }
    }
    std::vector<double> means(cols, 0.0);
    for (std::size_t c = 0; c < cols; ++c) {
        bool has_missing = false;
        for (const auto& row : table.rows)
            if (!row[c]) has_missing = true;
        if (has_missing && counts[c] == 0)
            throw DataError("column '" + table.header[c] + "' has no observed values to impute from");
        if (counts[c] > 0) means[c] = sums[c] / static_cast<double>(counts[c]);
    }
    for (auto& row : out.rows)
        for (std::size_t c = 0; c < cols; ++c)
            if (!row[c]) row[c] = means[c];
    return out;
}

namespace {

std::size_t find_column(const RawTable& table, const std::string& name) {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end())
        throw DataError("required column '" + name + "' not found in header");
    return static_cast<std::size_t>(it - table.header.begin());
}

double require_imputed(const Cell& cell, const std::string& column, std::size_t row) {
    if (!cell)
        throw DataError("column '" + column + "' row " + std::to_string(row + 1) +
                        " is missing; impute before selecting features");
    return *cell;
}

}  // namespace

Matrix select_feature_matrix(const RawTable& table, const FeatureSchema& schema) {
    schema.validate();
    std::vector<std::size_t> feature_cols;
    feature_cols.reserve(schema.size());
    for (const auto& name : schema.feature_names) feature_cols.push_back(find_column(table, name));

    Matrix features(table.n_rows(), schema.size());
    for (std::size_t r = 0; r < table.n_rows(); ++r)
        for (std::size_t j = 0; j < feature_cols.size(); ++j)
            features(r, j) = require_imputed(table.rows[r][feature_cols[j]],
                                             schema.feature_names[j], r);
    return features;
}

Dataset select_features(const RawTable& table, const FeatureSchema& schema) {
    Dataset ds;
    ds.schema = schema;
    ds.features = select_feature_matrix(table, schema);

    const std::size_t label_col = find_column(table, schema.label_name);
    ds.labels.reserve(table.n_rows());
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        const double v = require_imputed(table.rows[r][label_col], schema.label_name, r);
        if (v != 0.0 && v != 1.0)
            throw DataError("label '" + schema.label_name + "' row " + std::to_string(r + 1) +
                            " is " + format_number(v) + "; only exact 0/1 values are accepted");
        ds.labels.push_back(v == 1.0 ? 1 : 0);
    }
    ds.validate();
    return ds;
}

std::string format_number(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

void write_dataset_csv(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    for (std::size_t j = 0; j < ds.schema.size(); ++j) out << ds.schema.feature_names[j] << ',';
    out << ds.schema.label_name << '\n';
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        for (std::size_t j = 0; j < ds.n_features(); ++j) out << format_number(ds.features(r, j)) << ',';
        out << ds.labels[r] << '\n';
    }
    if (!out) throw DataError("failed writing '" + path.string() + "'");
}

}  // namespace mortml
