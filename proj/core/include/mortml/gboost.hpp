#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mortml/dataset.hpp"
#include "mortml/tree.hpp"

namespace mortml {

struct GbConfig {
    int n_estimators = 100;
    double learning_rate = 0.1;
    int max_depth = 3;  // depth of each regression stage
    std::uint64_t seed = 0;

    bool operator==(const GbConfig&) const = default;
};

/// Stagewise regression trees on log-loss gradients. The score is
/// F(x) = f0 + learning_rate * sum of stage outputs; prediction is
/// sigmoid(F).
struct GbModel {
    double f0 = 0.0;  // initial log-odds of the training prior
    double learning_rate = 0.1;
    std::vector<Tree> stages;

    bool operator==(const GbModel&) const = default;
};

/// Each stage fits a squared-error tree to the residuals y - sigmoid(F),
/// then replaces every leaf value by the Newton step
/// sum(residuals) / sum(p * (1 - p)) over the leaf (denominator clamped at
/// 1e-12). When stage_losses is given it receives the training log-loss
/// after every stage, preceded by the prior-only loss.
GbModel fit_gb(const Dataset& ds, const GbConfig& cfg, std::vector<double>* stage_losses = nullptr);

double gb_decision(const GbModel& model, std::span<const double> x);

struct GbPrediction {
    int label = 0;
    double probability = 0.0;
};

/// probability = sigmoid(F(x)); class 1 iff probability >= 0.5.
GbPrediction predict_gb(const GbModel& model, std::span<const double> x);

double sigmoid(double z);

/// Mean binary cross-entropy of probabilities against 0/1 labels,
/// probabilities clamped to [1e-12, 1 - 1e-12].
double log_loss(std::span<const int> labels, std::span<const double> probabilities);

}  // namespace mortml
