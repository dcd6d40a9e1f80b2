// Internal JSON converters shared by model and report serialization.
// Not installed; nlohmann stays out of the public headers.
#pragma once

#include <json.hpp>

#include "mortml/errors.hpp"
#include "mortml/forest.hpp"
#include "mortml/gboost.hpp"
#include "mortml/matrix.hpp"
#include "mortml/mlp.hpp"
#include "mortml/schema.hpp"
#include "mortml/svm.hpp"
#include "mortml/tree.hpp"

namespace mortml::detail {

using nlohmann::json;

inline json matrix_to_json(const Matrix& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.storage()}};
}

inline Matrix matrix_from_json(const json& j) {
    const auto rows = j.at("rows").get<std::size_t>();
    const auto cols = j.at("cols").get<std::size_t>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != rows * cols) throw DataError("matrix payload: data size mismatch");
    Matrix m(rows, cols);
    m.storage() = data;
    return m;
}

inline json tree_node_to_json(const Tree& tree, int idx) {
    const auto& node = tree.nodes.at(static_cast<std::size_t>(idx));
    if (node.is_leaf())
        return json{{"counts", node.class_counts}, {"value", node.value}};
    return json{{"feature", node.feature_index},
                {"threshold", node.threshold},
                {"left", tree_node_to_json(tree, node.left)},
                {"right", tree_node_to_json(tree, node.right)}};
}

inline json tree_to_json(const Tree& tree) {
    if (tree.empty()) throw DataError("serialize: empty tree");
    return tree_node_to_json(tree, 0);
}

inline int tree_node_from_json(const json& j, Tree& tree) {
    const int idx = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (j.contains("feature")) {
        const int feature = j.at("feature").get<int>();
        const double threshold = j.at("threshold").get<double>();
        if (feature < 0) throw DataError("tree payload: negative feature index");
        const int left = tree_node_from_json(j.at("left"), tree);
        const int right = tree_node_from_json(j.at("right"), tree);
        auto& node = tree.nodes[static_cast<std::size_t>(idx)];
        node.feature_index = feature;
        node.threshold = threshold;
        node.left = left;
        node.right = right;
    } else {
        auto& node = tree.nodes[static_cast<std::size_t>(idx)];
        node.class_counts = j.at("counts").get<std::array<std::int64_t, 2>>();
        node.value = j.at("value").get<double>();
    }
    return idx;
}

inline Tree tree_from_json(const json& j) {
    Tree tree;
    tree_node_from_json(j, tree);
    return tree;
}

inline json tree_config_to_json(const TreeConfig& cfg) {
    return json{{"max_depth", cfg.max_depth},
                {"min_samples_split", cfg.min_samples_split},
                {"min_gain", cfg.min_gain},
                {"criterion", cfg.criterion == SplitCriterion::entropy ? "entropy" : "squared_error"}};
}

inline TreeConfig tree_config_from_json(const json& j) {
    TreeConfig cfg;
    cfg.max_depth = j.at("max_depth").get<int>();
    cfg.min_samples_split = j.at("min_samples_split").get<int>();
    cfg.min_gain = j.at("min_gain").get<double>();
    const auto criterion = j.at("criterion").get<std::string>();
    if (criterion == "entropy")
        cfg.criterion = SplitCriterion::entropy;
    else if (criterion == "squared_error")
        cfg.criterion = SplitCriterion::squared_error;
    else
        throw DataError("tree payload: unknown criterion '" + criterion + "'");
    return cfg;
}

inline json forest_config_to_json(const ForestConfig& cfg) {
    return json{{"n_trees", cfg.n_trees},
                {"max_features", cfg.max_features},
                {"bootstrap", cfg.bootstrap},
                {"tree", tree_config_to_json(cfg.tree)},
                {"seed", cfg.seed}};
}

inline ForestConfig forest_config_from_json(const json& j) {
    ForestConfig cfg;
    cfg.n_trees = j.at("n_trees").get<int>();
    cfg.max_features = j.at("max_features").get<int>();
    cfg.bootstrap = j.at("bootstrap").get<bool>();
    cfg.tree = tree_config_from_json(j.at("tree"));
    cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
}

inline json gb_config_to_json(const GbConfig& cfg) {
    return json{{"n_estimators", cfg.n_estimators},
                {"learning_rate", cfg.learning_rate},
                {"max_depth", cfg.max_depth},
                {"seed", cfg.seed}};
}

inline json kernel_to_json(const Kernel& k) {
    return json{{"kind", k.kind == KernelKind::linear ? "linear" : "rbf"}, {"gamma", k.gamma}};
}

inline Kernel kernel_from_json(const json& j) {
    Kernel k;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "linear")
        k.kind = KernelKind::linear;
    else if (kind == "rbf")
        k.kind = KernelKind::rbf;
    else
        throw DataError("svm payload: unknown kernel '" + kind + "'");
    k.gamma = j.at("gamma").get<double>();
    return k;
}

inline json svm_config_to_json(const SvmConfig& cfg) {
    return json{{"C", cfg.C},           {"kernel", kernel_to_json(cfg.kernel)},
                {"tol", cfg.tol},       {"max_passes", cfg.max_passes},
                {"max_sweeps", cfg.max_sweeps}, {"seed", cfg.seed}};
}

inline json train_config_to_json(const TrainConfig& cfg) {
    return json{{"epochs", cfg.epochs},
                {"batch_size", cfg.batch_size},
                {"dropout_rate", cfg.dropout_rate},
                {"learning_rate", cfg.learning_rate},
                {"beta1", cfg.beta1},
                {"beta2", cfg.beta2},
                {"epsilon", cfg.epsilon},
                {"seed", cfg.seed},
                {"hidden1", cfg.hidden1},
                {"hidden2", cfg.hidden2}};
}

inline TrainConfig train_config_from_json(const json& j) {
    TrainConfig cfg;
    cfg.epochs = j.at("epochs").get<int>();
    cfg.batch_size = j.at("batch_size").get<int>();
    cfg.dropout_rate = j.at("dropout_rate").get<double>();
    cfg.learning_rate = j.at("learning_rate").get<double>();
    cfg.beta1 = j.at("beta1").get<double>();
    cfg.beta2 = j.at("beta2").get<double>();
    cfg.epsilon = j.at("epsilon").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.hidden1 = j.at("hidden1").get<std::size_t>();
    cfg.hidden2 = j.at("hidden2").get<std::size_t>();
    return cfg;
}

inline json schema_to_json(const FeatureSchema& schema) {
    return json{{"features", schema.feature_names}, {"label", schema.label_name}};
}

inline FeatureSchema schema_from_json(const json& j) {
    FeatureSchema schema;
    schema.feature_names = j.at("features").get<std::vector<std::string>>();
    schema.label_name = j.at("label").get<std::string>();
    schema.validate();
    return schema;
}

}  // namespace mortml::detail
