#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mortml/matrix.hpp"
#include "mortml/rng.hpp"

namespace mortml {

enum class SplitCriterion { entropy, squared_error };

struct TreeConfig {
    int max_depth = 6;  // boosted regression stages typically use 3
    int min_samples_split = 2;
    double min_gain = 0.0;
    SplitCriterion criterion = SplitCriterion::entropy;

    bool operator==(const TreeConfig&) const = default;
};

struct TreeNode {
    int feature_index = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::array<std::int64_t, 2> class_counts{0, 0};  // classification leaves
    double value = 0.0;                              // regression leaf mean

    bool is_leaf() const { return feature_index < 0; }
    bool operator==(const TreeNode&) const = default;
};

/// Binary decision tree stored as a node arena; nodes[0] is the root.
/// Routing convention: x[feature] <= threshold goes left.
struct Tree {
    std::vector<TreeNode> nodes;

    bool empty() const { return nodes.empty(); }
    bool operator==(const Tree&) const = default;
};

/// Shannon entropy of a class-count vector, in bits; 0*log(0) == 0.
double entropy(std::span<const std::int64_t> class_counts);

/// H(parent) - weighted child entropies. Children must sum to the parent
/// componentwise; result is non-negative up to rounding.
double information_gain(std::span<const std::int64_t> parent_counts,
                        std::span<const std::int64_t> left_counts,
                        std::span<const std::int64_t> right_counts);

struct SplitChoice {
    int feature_index = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

/// Per-node candidate feature subsetter; a forest plugs in a random
/// sampler here, a plain tree considers every feature.
using FeatureSampler = std::function<std::vector<int>(Rng&)>;

/// Best (feature, threshold) over the given rows and candidate features.
/// Thresholds are midpoints between consecutive distinct sorted values;
/// gain is information gain (entropy) or weighted variance reduction
/// (squared_error). Ties break to the lowest feature index, then the
/// lowest threshold. Returns nullopt when no split reaches min_gain; at
/// the default min_gain = 0 a zero-gain split is still taken, which is
/// what lets depth-2 trees represent XOR exactly.
/// For the entropy criterion `values` must hold 0/1 class labels.
std::optional<SplitChoice> best_split(const Matrix& features, std::span<const double> values,
                                      std::span<const std::size_t> row_indices,
                                      std::span<const int> candidate_features,
                                      SplitCriterion criterion, double min_gain = 0.0);

/// Recursive partitioning: grow until max_depth, an undersized node, a
/// pure node, or no positive-gain split. Leaves keep their class counts.
Tree fit_tree(const Matrix& features, std::span<const int> labels, const TreeConfig& cfg,
              const FeatureSampler& sampler = nullptr, Rng* rng = nullptr);

/// Squared-error variant; leaves store the mean of their targets.
Tree fit_regression_tree(const Matrix& features, std::span<const double> targets,
                         const TreeConfig& cfg);

struct TreePrediction {
    int label = 0;
    std::array<double, 2> probabilities{0.0, 0.0};
};

/// Route by threshold comparison; leaf majority class (ties to class 0)
/// and count-normalized probabilities.
TreePrediction predict_tree(const Tree& tree, std::span<const double> x);

double predict_regression(const Tree& tree, std::span<const double> x);

int tree_depth(const Tree& tree);

}  // namespace mortml
