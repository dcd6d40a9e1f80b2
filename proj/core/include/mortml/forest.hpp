#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mortml/dataset.hpp"
#include "mortml/tree.hpp"

namespace mortml {

struct ForestConfig {
    int n_trees = 101;     // odd, so binary votes cannot tie
    int max_features = 0;  // per-node candidates; 0 resolves to ceil(sqrt(d))
    bool bootstrap = true;
    TreeConfig tree;
    std::uint64_t seed = 0;

    bool operator==(const ForestConfig&) const = default;
};

struct ForestModel {
    std::vector<Tree> trees;
    ForestConfig config;

    bool operator==(const ForestModel&) const = default;
};

/// n rows drawn uniformly with replacement; deterministic under seed.
Dataset bootstrap_sample(const Dataset& ds, std::uint64_t seed);

/// Tree i trains on a bootstrap sample seeded by (seed, i) with
/// max_features random candidate features per node, so the result is
/// independent of training order.
ForestModel fit_forest(const Dataset& ds, const ForestConfig& cfg);

struct ForestPrediction {
    int label = 0;
    std::array<double, 2> vote_fractions{0.0, 0.0};
};

/// Majority vote over the trees; ties resolve to class 0.
ForestPrediction predict_forest(const ForestModel& model, std::span<const double> x);

}  // namespace mortml
