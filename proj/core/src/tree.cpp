#include "mortml/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mortml/errors.hpp"

namespace mortml {

double entropy(std::span<const std::int64_t> class_counts) {
    if (class_counts.empty()) throw DataError("entropy: empty count vector");
    std::int64_t total = 0;
    for (const auto c : class_counts) {
        if (c < 0) throw DataError("entropy: negative count");
        total += c;
    }
    if (total == 0) throw DataError("entropy: zero total count");
    double h = 0.0;
    for (const auto c : class_counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

double information_gain(std::span<const std::int64_t> parent_counts,
                        std::span<const std::int64_t> left_counts,
                        std::span<const std::int64_t> right_counts) {
    if (parent_counts.size() != left_counts.size() || parent_counts.size() != right_counts.size())
        throw DataError("information_gain: class count arity mismatch");
    std::int64_t n = 0, nl = 0, nr = 0;
    for (std::size_t i = 0; i < parent_counts.size(); ++i) {
        if (left_counts[i] + right_counts[i] != parent_counts[i])
            throw DataError("information_gain: children do not sum to parent");
        n += parent_counts[i];
        nl += left_counts[i];
        nr += right_counts[i];
    }
    if (n == 0) throw DataError("information_gain: empty parent");
    const double wl = static_cast<double>(nl) / static_cast<double>(n);
    const double wr = static_cast<double>(nr) / static_cast<double>(n);
    double gain = entropy(parent_counts);
    if (nl > 0) gain -= wl * entropy(left_counts);
    if (nr > 0) gain -= wr * entropy(right_counts);
    return gain;
}

namespace {

struct ValueTargetPair {
    double value;
    double target;
};

double binary_entropy(std::int64_t c0, std::int64_t c1) {
    const std::array<std::int64_t, 2> counts{c0, c1};
    return entropy(counts);
}

}  // namespace

std::optional<SplitChoice> best_split(const Matrix& features, std::span<const double> values,
                                      std::span<const std::size_t> row_indices,
                                      std::span<const int> candidate_features,
                                      SplitCriterion criterion, double min_gain) {
    const std::size_t n = row_indices.size();
    if (n < 2) return std::nullopt;

    std::vector<int> candidates(candidate_features.begin(), candidate_features.end());
    std::sort(candidates.begin(), candidates.end());  // tie-break: lowest feature wins

    // parent statistics
    std::int64_t parent_c1 = 0;
    double parent_sum = 0.0, parent_sumsq = 0.0;
    for (const auto r : row_indices) {
        const double t = values[r];
        if (criterion == SplitCriterion::entropy) {
            parent_c1 += t != 0.0 ? 1 : 0;
        } else {
            parent_sum += t;
            parent_sumsq += t * t;
        }
    }
    const auto nd = static_cast<double>(n);
    double parent_impurity = 0.0;
    if (criterion == SplitCriterion::entropy) {
        parent_impurity = binary_entropy(static_cast<std::int64_t>(n) - parent_c1, parent_c1);
    } else {
        const double mean = parent_sum / nd;
        parent_impurity = std::max(0.0, parent_sumsq / nd - mean * mean);
    }

    std::optional<SplitChoice> best;
    std::vector<ValueTargetPair> items(n);
    for (const int f : candidates) {
        if (f < 0 || static_cast<std::size_t>(f) >= features.cols())
            throw DataError("best_split: candidate feature index out of range");
        for (std::size_t i = 0; i < n; ++i)
            items[i] = {features(row_indices[i], static_cast<std::size_t>(f)), values[row_indices[i]]};
        std::sort(items.begin(), items.end(),
                  [](const ValueTargetPair& a, const ValueTargetPair& b) { return a.value < b.value; });
        if (items.front().value == items.back().value) continue;  // constant column

        std::int64_t left_c1 = 0;
        double left_sum = 0.0, left_sumsq = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double t = items[i].target;
            if (criterion == SplitCriterion::entropy) {
                left_c1 += t != 0.0 ? 1 : 0;
            } else {
                left_sum += t;
                left_sumsq += t * t;
            }
            if (items[i].value == items[i + 1].value) continue;

            const auto nl = static_cast<std::int64_t>(i) + 1;
            const auto nr = static_cast<std::int64_t>(n) - nl;
            const double wl = static_cast<double>(nl) / nd;
            const double wr = static_cast<double>(nr) / nd;
            double gain = 0.0;
            if (criterion == SplitCriterion::entropy) {
                const std::int64_t right_c1 = parent_c1 - left_c1;
                gain = parent_impurity - wl * binary_entropy(nl - left_c1, left_c1) -
                       wr * binary_entropy(nr - right_c1, right_c1);
            } else {
                const double lmean = left_sum / static_cast<double>(nl);
                const double rsum = parent_sum - left_sum;
                const double rmean = rsum / static_cast<double>(nr);
                const double lvar =
                    std::max(0.0, left_sumsq / static_cast<double>(nl) - lmean * lmean);
                const double rvar = std::max(
                    0.0, (parent_sumsq - left_sumsq) / static_cast<double>(nr) - rmean * rmean);
                gain = parent_impurity - wl * lvar - wr * rvar;
            }
            if (gain >= min_gain && (!best || gain > best->gain)) {
                best = SplitChoice{f, (items[i].value + items[i + 1].value) / 2.0, gain};
            }
        }
    }
    return best;
}

namespace {

class TreeGrower {
public:
    TreeGrower(const Matrix& features, std::span<const double> values, const TreeConfig& cfg,
               const FeatureSampler& sampler, Rng* rng)
        : features_(features), values_(values), cfg_(cfg), sampler_(sampler), rng_(rng) {
        all_features_.resize(features.cols());
        std::iota(all_features_.begin(), all_features_.end(), 0);
    }

    Tree grow_all() {
        std::vector<std::size_t> rows(features_.rows());
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        Tree tree;
        grow(tree, rows, 0);
        return tree;
    }

private:
    int grow(Tree& tree, std::vector<std::size_t>& rows, int depth) {
        const int idx = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();

        std::array<std::int64_t, 2> counts{0, 0};
        double sum = 0.0;
        for (const auto r : rows) {
            const double t = values_[r];
            if (cfg_.criterion == SplitCriterion::entropy) ++counts[t != 0.0 ? 1 : 0];
            sum += t;
        }
        tree.nodes[static_cast<std::size_t>(idx)].class_counts = counts;
        tree.nodes[static_cast<std::size_t>(idx)].value =
            cfg_.criterion == SplitCriterion::squared_error
                ? sum / static_cast<double>(rows.size())
                : 0.0;

        const bool pure = cfg_.criterion == SplitCriterion::entropy &&
                          (counts[0] == 0 || counts[1] == 0);
        if (depth >= cfg_.max_depth || rows.size() < static_cast<std::size_t>(cfg_.min_samples_split) ||
            pure)
            return idx;

        std::vector<int> candidates = sampler_ ? sampler_(*rng_) : all_features_;
        const auto choice =
            best_split(features_, values_, rows, candidates, cfg_.criterion, cfg_.min_gain);
        if (!choice) return idx;

        std::vector<std::size_t> left_rows, right_rows;
        left_rows.reserve(rows.size());
        right_rows.reserve(rows.size());
        for (const auto r : rows)
            if (features_(r, static_cast<std::size_t>(choice->feature_index)) <= choice->threshold)
                left_rows.push_back(r);
            else
                right_rows.push_back(r);

        rows.clear();
        rows.shrink_to_fit();

        const int left = grow(tree, left_rows, depth + 1);
        const int right = grow(tree, right_rows, depth + 1);
        auto& node = tree.nodes[static_cast<std::size_t>(idx)];
        node.feature_index = choice->feature_index;
        node.threshold = choice->threshold;
        node.left = left;
        node.right = right;
        return idx;
    }

    const Matrix& features_;
    std::span<const double> values_;
    const TreeConfig& cfg_;
    const FeatureSampler& sampler_;
    Rng* rng_;
    std::vector<int> all_features_;
};

void check_tree_config(const Matrix& features, std::size_t n_values, const TreeConfig& cfg) {
    if (features.rows() == 0) throw DataError("fit_tree: empty dataset");
    if (features.rows() != n_values) throw DataError("fit_tree: value/row count mismatch");
    if (cfg.max_depth < 1) throw ConfigError("fit_tree: max_depth must be at least 1");
    if (cfg.min_samples_split < 2) throw ConfigError("fit_tree: min_samples_split must be at least 2");
}

}  // namespace

Tree fit_tree(const Matrix& features, std::span<const int> labels, const TreeConfig& cfg,
              const FeatureSampler& sampler, Rng* rng) {
    check_tree_config(features, labels.size(), cfg);
    if (cfg.criterion != SplitCriterion::entropy)
        throw ConfigError("fit_tree: classification requires the entropy criterion");
    if (sampler && rng == nullptr)
        throw ConfigError("fit_tree: a feature sampler needs an rng");
    std::vector<double> values(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) throw DataError("fit_tree: label outside {0,1}");
        values[i] = static_cast<double>(labels[i]);
    }
    return TreeGrower(features, values, cfg, sampler, rng).grow_all();
}

Tree fit_regression_tree(const Matrix& features, std::span<const double> targets,
                         const TreeConfig& cfg) {
    check_tree_config(features, targets.size(), cfg);
    TreeConfig reg_cfg = cfg;
    reg_cfg.criterion = SplitCriterion::squared_error;
    return TreeGrower(features, targets, reg_cfg, nullptr, nullptr).grow_all();
}

namespace {

const TreeNode& route_to_leaf(const Tree& tree, std::span<const double> x) {
    if (tree.empty()) throw DataError("predict: empty tree");
    const TreeNode* node = &tree.nodes[0];
    while (!node->is_leaf()) {
        if (static_cast<std::size_t>(node->feature_index) >= x.size())
            throw DataError("predict: feature index " + std::to_string(node->feature_index) +
                            " out of range (corrupt model?)");
        const int next = x[static_cast<std::size_t>(node->feature_index)] <= node->threshold
                             ? node->left
                             : node->right;
        if (next < 0 || static_cast<std::size_t>(next) >= tree.nodes.size())
            throw DataError("predict: dangling child index (corrupt model?)");
        node = &tree.nodes[static_cast<std::size_t>(next)];
    }
    return *node;
}

}  // namespace

TreePrediction predict_tree(const Tree& tree, std::span<const double> x) {
    const TreeNode& leaf = route_to_leaf(tree, x);
    TreePrediction out;
    const auto total = leaf.class_counts[0] + leaf.class_counts[1];
    if (total > 0) {
        out.probabilities = {static_cast<double>(leaf.class_counts[0]) / static_cast<double>(total),
                             static_cast<double>(leaf.class_counts[1]) / static_cast<double>(total)};
    }
    out.label = leaf.class_counts[1] > leaf.class_counts[0] ? 1 : 0;
    return out;
}

double predict_regression(const Tree& tree, std::span<const double> x) {
    return route_to_leaf(tree, x).value;
}

int tree_depth(const Tree& tree) {
    if (tree.empty()) return 0;
    int max_depth = 0;
    // (node, depth) walk without recursion
    std::vector<std::pair<int, int>> stack{{0, 0}};
    while (!stack.empty()) {
        const auto [idx, depth] = stack.back();
        stack.pop_back();
        max_depth = std::max(max_depth, depth);
        const auto& node = tree.nodes[static_cast<std::size_t>(idx)];
        if (!node.is_leaf()) {
            stack.emplace_back(node.left, depth + 1);
            stack.emplace_back(node.right, depth + 1);
        }
    }
    return max_depth;
}

}  // namespace mortml
