#pragma once

#include <cstdint>
#include <vector>

#include "mortml/dataset.hpp"

namespace mortml {

struct SmoteConfig {
    int k = 5;                  // neighbor count
    double target_ratio = 1.0;  // minority/majority after resampling; only 1.0 is supported
    std::uint64_t seed = 0;

    bool operator==(const SmoteConfig&) const = default;
};

/// Indices of the k rows nearest to points.row(query) in Euclidean
/// distance, the query row itself excluded. Ties resolve to the lower row
/// index. Requires k <= rows - 1.
std::vector<std::size_t> knn_indices(const Matrix& points, std::size_t query, std::size_t k);

/// Oversamples the minority class until both classes have equal counts.
/// Each synthetic row is x + lambda * (nb - x) with x a minority row
/// (visited round-robin), nb one of its k nearest minority-class neighbors
/// chosen uniformly, and lambda ~ U[0,1). Original rows are kept verbatim,
/// in order, ahead of the synthetic block. A k larger than
/// minority_count - 1 is clamped with a warning on stderr.
Dataset smote(const Dataset& ds, const SmoteConfig& cfg);

}  // namespace mortml
