#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mortml/dataset.hpp"

namespace mortml {

/// Pairwise correlations of the feature columns plus the label column.
struct CorrelationMatrix {
    std::vector<std::string> labels;  // feature names followed by the label name
    Matrix values;                    // (d+1) x (d+1), symmetric, unit diagonal

    bool operator==(const CorrelationMatrix&) const = default;
};

/// Product-moment correlation, two-pass mean-centered sums. Both columns
/// must have nonzero variance.
double pearson(std::span<const double> x, std::span<const double> y);

CorrelationMatrix correlation_matrix(const Dataset& ds);

/// CSV export with labels as the first row and column (heatmap-ready).
void write_correlation_csv(const CorrelationMatrix& m, const std::filesystem::path& path);

}  // namespace mortml
