#include "mortml/forest.hpp"

#include <cmath>

#include "mortml/errors.hpp"
#include "mortml/rng.hpp"

namespace mortml {

Dataset bootstrap_sample(const Dataset& ds, std::uint64_t seed) {
    ds.validate();
    Rng rng(seed);
    std::vector<std::size_t> rows(ds.n_rows());
    for (auto& r : rows) r = static_cast<std::size_t>(rng.below(ds.n_rows()));
    return ds.subset(rows);
}

ForestModel fit_forest(const Dataset& ds, const ForestConfig& cfg) {
    ds.validate();
    if (cfg.n_trees < 1) throw ConfigError("forest: n_trees must be at least 1");
    const auto d = static_cast<int>(ds.n_features());
    int max_features = cfg.max_features;
    if (max_features == 0)
        max_features = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));
    if (max_features < 1 || max_features > d)
        throw ConfigError("forest: max_features must lie in [1, " + std::to_string(d) + "]");
    const auto counts = ds.class_counts();
    if (counts[0] == 0 || counts[1] == 0) throw TrainError("forest: both classes must be present");

    ForestModel model;
    model.config = cfg;
    model.config.max_features = max_features;
    model.trees.reserve(static_cast<std::size_t>(cfg.n_trees));

    const FeatureSampler sampler = [d, max_features](Rng& rng) {
        return rng.sample_without_replacement(d, max_features);
    };

    for (int i = 0; i < cfg.n_trees; ++i) {
        // per-tree stream: training order never affects the result
        const auto tree_seed = Rng::derive(cfg.seed, static_cast<std::uint64_t>(i));
        const Dataset sample = cfg.bootstrap ? bootstrap_sample(ds, tree_seed) : ds;
        Rng node_rng(Rng::derive(tree_seed, 1));
        model.trees.push_back(fit_tree(sample.features, sample.labels, cfg.tree, sampler, &node_rng));
    }
    return model;
}

ForestPrediction predict_forest(const ForestModel& model, std::span<const double> x) {
    if (model.trees.empty()) throw DataError("forest: empty model");
    std::array<std::int64_t, 2> votes{0, 0};
    for (const auto& tree : model.trees)
        ++votes[static_cast<std::size_t>(predict_tree(tree, x).label)];
    ForestPrediction out;
    const auto total = static_cast<double>(model.trees.size());
    out.vote_fractions = {static_cast<double>(votes[0]) / total,
                          static_cast<double>(votes[1]) / total};
    out.label = votes[1] > votes[0] ? 1 : 0;  // tie falls to class 0
    return out;
}

}  // namespace mortml
