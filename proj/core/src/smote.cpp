#include "mortml/smote.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <vector>

#include "mortml/errors.hpp"
#include "mortml/rng.hpp"

namespace mortml {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = a[j] - b[j];
        sum += diff * diff;
    }
    return sum;
}

}  // namespace

std::vector<std::size_t> knn_indices(const Matrix& points, std::size_t query, std::size_t k) {
    if (points.rows() == 0) throw DataError("knn: empty point set");
    if (query >= points.rows()) throw DataError("knn: query index out of range");
    if (k > points.rows() - 1)
        throw ConfigError("knn: k = " + std::to_string(k) + " exceeds available neighbors " +
                          std::to_string(points.rows() - 1));

    std::vector<std::pair<double, std::size_t>> by_distance;
    by_distance.reserve(points.rows() - 1);
    const auto q = points.row(query);
    for (std::size_t r = 0; r < points.rows(); ++r) {
        if (r == query) continue;
        by_distance.emplace_back(squared_distance(points.row(r), q), r);
    }
    std::sort(by_distance.begin(), by_distance.end());  // ties fall to the lower row index
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(by_distance[i].second);
    return out;
}

Dataset smote(const Dataset& ds, const SmoteConfig& cfg) {
    ds.validate();
    if (cfg.k < 1) throw ConfigError("smote: k must be at least 1");
    if (cfg.target_ratio != 1.0) throw ConfigError("smote: only target_ratio = 1.0 is supported");

    const auto counts = ds.class_counts();
    if (counts[0] == 0 || counts[1] == 0) throw DataError("smote: both classes must be present");

    const int minority = counts[1] < counts[0] ? 1 : 0;
    const auto minority_count = static_cast<std::size_t>(counts[static_cast<std::size_t>(minority)]);
    const auto deficit = static_cast<std::size_t>(counts[static_cast<std::size_t>(1 - minority)]) -
                         minority_count;
    if (deficit == 0) return ds;
    if (minority_count < 2)
        throw DataError("smote: minority class has fewer than 2 rows, neighbors are undefined");

    std::size_t k = static_cast<std::size_t>(cfg.k);
    if (k > minority_count - 1) {
        std::cerr << "[mortml] warning: smote k=" << k << " clamped to " << minority_count - 1
                  << " (minority class has only " << minority_count << " rows)\n";
        k = minority_count - 1;
    }

    Matrix minority_points;
    for (std::size_t r = 0; r < ds.n_rows(); ++r)
        if (ds.labels[r] == minority) minority_points.append_row(ds.features.row(r));

    // bases cycle round-robin, so only min(deficit, minority_count) rows
    // ever need a neighbor list; compute them on first use
    std::vector<std::vector<std::size_t>> neighbors(minority_count);

    Dataset out = ds;
    Rng rng(cfg.seed);
    std::vector<double> synthetic(ds.n_features());
    for (std::size_t s = 0; s < deficit; ++s) {
        const std::size_t base = s % minority_count;
        if (neighbors[base].empty()) neighbors[base] = knn_indices(minority_points, base, k);
        const auto& nbs = neighbors[base];
        const auto nb = nbs[static_cast<std::size_t>(rng.below(nbs.size()))];
        const double lambda = rng.uniform();
        const auto x = minority_points.row(base);
        const auto z = minority_points.row(nb);
        for (std::size_t j = 0; j < synthetic.size(); ++j)
            synthetic[j] = x[j] + lambda * (z[j] - x[j]);
        out.features.append_row(synthetic);
        out.labels.push_back(minority);
    }
    return out;
}

}  // namespace mortml
