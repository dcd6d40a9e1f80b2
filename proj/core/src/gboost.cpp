#include "mortml/gboost.hpp"

#include <algorithm>
#include <cmath>

#include "mortml/errors.hpp"

namespace mortml {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double log_loss(std::span<const int> labels, std::span<const double> probabilities) {
    if (labels.size() != probabilities.size()) throw DataError("log_loss: length mismatch");
    if (labels.empty()) throw DataError("log_loss: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double p = std::clamp(probabilities[i], 1e-12, 1.0 - 1e-12);
        sum -= labels[i] == 1 ? std::log(p) : std::log(1.0 - p);
    }
    return sum / static_cast<double>(labels.size());
}

namespace {

// leaf index a row lands in, for the Newton value rewrite
std::size_t leaf_index(const Tree& tree, std::span<const double> x) {
    std::size_t idx = 0;
    while (!tree.nodes[idx].is_leaf()) {
        const auto& node = tree.nodes[idx];
        idx = static_cast<std::size_t>(
            x[static_cast<std::size_t>(node.feature_index)] <= node.threshold ? node.left
                                                                              : node.right);
    }
    return idx;
}

}  // namespace

GbModel fit_gb(const Dataset& ds, const GbConfig& cfg, std::vector<double>* stage_losses) {
    ds.validate();
    if (cfg.n_estimators < 0) throw ConfigError("gb: n_estimators must be non-negative");
    if (cfg.learning_rate < 0.0) throw ConfigError("gb: learning_rate must be non-negative");
    const auto counts = ds.class_counts();
    if (counts[0] == 0 || counts[1] == 0)
        throw TrainError("gb: both classes must be present (prior log-odds would be infinite)");

    const std::size_t n = ds.n_rows();
    const double prior = static_cast<double>(counts[1]) / static_cast<double>(n);

    GbModel model;
    model.f0 = std::log(prior / (1.0 - prior));
    model.learning_rate = cfg.learning_rate;
    model.stages.reserve(static_cast<std::size_t>(cfg.n_estimators));

    std::vector<double> scores(n, model.f0);
    std::vector<double> probs(n);
    std::vector<double> residuals(n);

    const auto record_loss = [&] {
        if (!stage_losses) return;
        for (std::size_t i = 0; i < n; ++i) probs[i] = sigmoid(scores[i]);
        stage_losses->push_back(log_loss(ds.labels, probs));
    };
    if (stage_losses) stage_losses->clear();
    record_loss();  // prior-only loss

    TreeConfig tree_cfg;
    tree_cfg.max_depth = cfg.max_depth;
    tree_cfg.criterion = SplitCriterion::squared_error;

    for (int stage = 0; stage < cfg.n_estimators; ++stage) {
        for (std::size_t i = 0; i < n; ++i) {
            probs[i] = sigmoid(scores[i]);
            residuals[i] = static_cast<double>(ds.labels[i]) - probs[i];
        }
        Tree tree = fit_regression_tree(ds.features, residuals, tree_cfg);

        // Newton step per leaf: sum(residual) / sum(p(1-p)), denominator clamped
        std::vector<double> numerator(tree.nodes.size(), 0.0);
        std::vector<double> denominator(tree.nodes.size(), 0.0);
        std::vector<std::size_t> row_leaf(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto leaf = leaf_index(tree, ds.features.row(i));
            row_leaf[i] = leaf;
            numerator[leaf] += residuals[i];
            denominator[leaf] += probs[i] * (1.0 - probs[i]);
        }
        for (std::size_t node = 0; node < tree.nodes.size(); ++node)
            if (tree.nodes[node].is_leaf())
                tree.nodes[node].value = numerator[node] / std::max(denominator[node], 1e-12);

        for (std::size_t i = 0; i < n; ++i)
            scores[i] += cfg.learning_rate * tree.nodes[row_leaf[i]].value;

        model.stages.push_back(std::move(tree));
        record_loss();
    }
    return model;
}

double gb_decision(const GbModel& model, std::span<const double> x) {
    double sum = 0.0;
    for (const auto& stage : model.stages) sum += predict_regression(stage, x);
    return model.f0 + model.learning_rate * sum;
}

GbPrediction predict_gb(const GbModel& model, std::span<const double> x) {
    GbPrediction out;
    out.probability = sigmoid(gb_decision(model, x));
    out.label = out.probability >= 0.5 ? 1 : 0;
    return out;
}

}  // namespace mortml
