#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mortml/matrix.hpp"
#include "mortml/schema.hpp"

namespace mortml {

/// Imputed, schema-ordered feature matrix with binary labels. The unit of
/// flow through the pipeline.
struct Dataset {
    Matrix features;          // n x d, finite values only
    std::vector<int> labels;  // entries in {0, 1}
    FeatureSchema schema;

    std::size_t n_rows() const { return features.rows(); }
    std::size_t n_features() const { return features.cols(); }

    std::array<std::int64_t, 2> class_counts() const;

    Dataset subset(const std::vector<std::size_t>& row_indices) const;

    /// Finiteness, label domain, schema/feature-count agreement, n >= 1.
    void validate() const;

    bool operator==(const Dataset&) const = default;
};

struct SplitPair {
    Dataset train;
    Dataset test;
    std::uint64_t seed = 0;
};

/// Seeded shuffle split. Train receives round(ratio * n) rows (ties away
/// from zero), the rest go to test. `stratified` shuffles and rounds
/// within each class instead.
SplitPair split(const Dataset& ds, double ratio, std::uint64_t seed, bool stratified = false);

}  // namespace mortml
