#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <variant>

#include "mortml/forest.hpp"
#include "mortml/gboost.hpp"
#include "mortml/mlp.hpp"
#include "mortml/schema.hpp"
#include "mortml/svm.hpp"
#include "mortml/tree.hpp"

namespace mortml {

struct TreeModel {
    Tree tree;
    TreeConfig config;
};

struct MlpModel {
    NetParams params;
    TrainConfig config;
};

/// A trained classifier of any of the five kinds, together with the
/// schema it was trained against.
struct TrainedModel {
    FeatureSchema schema;
    std::variant<TreeModel, ForestModel, GbModel, SvmModel, MlpModel> classifier;

    /// "decision_tree", "random_forest", "gradient_boosting", "svm" or "mlp".
    std::string kind() const;
};

struct Scored {
    int label = 0;
    double score = 0.0;
};

/// Class plus a per-kind score: class-1 probability for tree/forest/gb/mlp,
/// the signed decision value for svm.
Scored predict_scored(const TrainedModel& model, std::span<const double> x);

int predict_label(const TrainedModel& model, std::span<const double> x);

/// Versioned JSON envelope; doubles serialize round-trip exactly, so a
/// save/load cycle preserves predictions bit for bit.
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace mortml
