#include "mortml/dataset.hpp"

#include <cmath>
#include <numeric>

#include "mortml/errors.hpp"
#include "mortml/rng.hpp"

namespace mortml {

std::array<std::int64_t, 2> Dataset::class_counts() const {
    std::array<std::int64_t, 2> counts{0, 0};
    for (const int y : labels) ++counts[static_cast<std::size_t>(y)];
    return counts;
}

Dataset Dataset::subset(const std::vector<std::size_t>& row_indices) const {
    Dataset out;
    out.schema = schema;
    out.features = Matrix(row_indices.size(), n_features());
    out.labels.reserve(row_indices.size());
    for (std::size_t i = 0; i < row_indices.size(); ++i) {
        const auto src = features.row(row_indices[i]);
        for (std::size_t j = 0; j < n_features(); ++j) out.features(i, j) = src[j];
        out.labels.push_back(labels[row_indices[i]]);
    }
    return out;
}

void Dataset::validate() const {
    if (n_rows() == 0) throw DataError("dataset: no rows");
    if (n_features() == 0) throw DataError("dataset: no feature columns");
    if (labels.size() != n_rows()) throw DataError("dataset: label/feature row count mismatch");
    if (schema.size() != n_features())
        throw DataError("dataset: schema names " + std::to_string(schema.size()) +
                        " columns but the matrix has " + std::to_string(n_features()));
    for (const double v : features.storage())
        if (!std::isfinite(v)) throw DataError("dataset: non-finite feature value");
    for (const int y : labels)
        if (y != 0 && y != 1) throw DataError("dataset: label outside {0,1}");
}

namespace {

// round(x) with .5 rounding up
std::size_t round_up_half(double x) { return static_cast<std::size_t>(std::floor(x + 0.5)); }

}  // namespace

SplitPair split(const Dataset& ds, double ratio, std::uint64_t seed, bool stratified) {
    if (!(ratio > 0.0 && ratio < 1.0))
        throw ConfigError("split: ratio must lie strictly between 0 and 1");
    if (ds.n_rows() < 2) throw DataError("split: need at least 2 rows");

    Rng rng(seed);
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;

    if (!stratified) {
        std::vector<std::size_t> order(ds.n_rows());
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(order);
        const std::size_t n_train = round_up_half(ratio * static_cast<double>(ds.n_rows()));
        train_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
        test_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    } else {
        for (int cls : {0, 1}) {
            std::vector<std::size_t> members;
            for (std::size_t r = 0; r < ds.n_rows(); ++r)
                if (ds.labels[r] == cls) members.push_back(r);
            rng.shuffle(members);
            const std::size_t n_train = round_up_half(ratio * static_cast<double>(members.size()));
            train_rows.insert(train_rows.end(), members.begin(),
                              members.begin() + static_cast<std::ptrdiff_t>(n_train));
            test_rows.insert(test_rows.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train),
                             members.end());
        }
    }

    if (train_rows.empty() || test_rows.empty())
        throw ConfigError("split: ratio " + std::to_string(ratio) + " leaves an empty partition on " +
                          std::to_string(ds.n_rows()) + " rows");

    SplitPair pair;
    pair.train = ds.subset(train_rows);
    pair.test = ds.subset(test_rows);
    pair.seed = seed;
    return pair;
}

}  // namespace mortml
