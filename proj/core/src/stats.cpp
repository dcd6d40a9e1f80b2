#include "mortml/stats.hpp"

#include <cmath>
#include <fstream>

#include "mortml/errors.hpp"
#include "mortml/table.hpp"

namespace mortml {

namespace {

double column_mean(std::span<const double> x) {
    double sum = 0.0;
    for (const double v : x) sum += v;
    return sum / static_cast<double>(x.size());
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("pearson: length mismatch");
    if (x.size() < 2) throw DataError("pearson: need at least 2 observations");

    const double mx = column_mean(x);
    const double my = column_mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw DataError("pearson: zero-variance column");
    return sxy / std::sqrt(sxx * syy);
}

CorrelationMatrix correlation_matrix(const Dataset& ds) {
    ds.validate();
    const std::size_t d = ds.n_features();

    std::vector<std::vector<double>> columns;
    columns.reserve(d + 1);
    for (std::size_t j = 0; j < d; ++j) columns.push_back(ds.features.column(j));
    std::vector<double> label_col(ds.labels.begin(), ds.labels.end());
    columns.push_back(std::move(label_col));

    CorrelationMatrix m;
    m.labels = ds.schema.feature_names;
    m.labels.push_back(ds.schema.label_name);
    m.values = Matrix(d + 1, d + 1, 0.0);

    for (std::size_t i = 0; i <= d; ++i) {
        m.values(i, i) = 1.0;
        for (std::size_t j = i + 1; j <= d; ++j) {
            double r = 0.0;
            try {
                r = pearson(columns[i], columns[j]);
            } catch (const DataError&) {
                throw DataError("correlation: column '" + m.labels[i] + "' or '" + m.labels[j] +
                                "' is constant");
            }
            m.values(i, j) = r;
            m.values(j, i) = r;
        }
    }
    return m;
}

void write_correlation_csv(const CorrelationMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    for (const auto& label : m.labels) out << ',' << label;
    out << '\n';
    for (std::size_t i = 0; i < m.labels.size(); ++i) {
        out << m.labels[i];
        for (std::size_t j = 0; j < m.labels.size(); ++j) out << ',' << format_number(m.values(i, j));
        out << '\n';
    }
    if (!out) throw DataError("failed writing '" + path.string() + "'");
}

}  // namespace mortml
