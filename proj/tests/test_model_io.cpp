#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "mortml/errors.hpp"
#include "mortml/model_io.hpp"
#include "mortml/synth.hpp"

using namespace mortml;

namespace {

// small nine-feature binary training set so every classifier kind fits fast
Dataset training_set() {
    SyntheticSpec spec;
    spec.schema = FeatureSchema::clinical_default();
    spec.positive_prior = 0.4;
    for (std::size_t j = 0; j < 9; ++j) spec.features.push_back(rates_for_phi(0.5, 0.4));
    return synthesize(spec, 80, 21);
}

std::vector<TrainedModel> train_all(const Dataset& ds) {
    std::vector<TrainedModel> models;

    TreeConfig tree_cfg;
    models.push_back({ds.schema, TreeModel{fit_tree(ds.features, ds.labels, tree_cfg), tree_cfg}});

    ForestConfig forest_cfg;
    forest_cfg.n_trees = 7;
    forest_cfg.seed = 5;
    models.push_back({ds.schema, fit_forest(ds, forest_cfg)});

    GbConfig gb_cfg;
    gb_cfg.n_estimators = 15;
    models.push_back({ds.schema, fit_gb(ds, gb_cfg)});

    SvmConfig svm_cfg;
    svm_cfg.seed = 5;
    models.push_back({ds.schema, fit_svm(ds, svm_cfg)});

    TrainConfig mlp_cfg;
    mlp_cfg.epochs = 3;
    mlp_cfg.seed = 5;
    models.push_back({ds.schema, MlpModel{train_mlp(ds, mlp_cfg).params, mlp_cfg}});
    return models;
}

Matrix probe_grid(std::size_t n, std::size_t d) {
    Rng rng(1234);
    Matrix grid(n, d);
    for (auto& v : grid.storage()) v = rng.uniform() < 0.5 ? 0.0 : 1.0;
    return grid;
}

}  // namespace

TEST_SUITE("model_io") {

TEST_CASE("save/load round trip preserves predictions for all five kinds") {
    const auto ds = training_set();
    const auto grid = probe_grid(100, 9);
    const auto dir = std::filesystem::temp_directory_path() / "mortml_models";
    std::filesystem::create_directories(dir);

    for (const auto& model : train_all(ds)) {
        const auto path = dir / (model.kind() + ".json");
        save_model(model, path);
        const auto loaded = load_model(path);
        CHECK(loaded.kind() == model.kind());
        CHECK(loaded.schema == model.schema);
        for (std::size_t r = 0; r < grid.rows(); ++r) {
            const auto a = predict_scored(model, grid.row(r));
            const auto b = predict_scored(loaded, grid.row(r));
            CHECK(a.label == b.label);
            CHECK(a.score == b.score);  // exact: doubles serialize round-trip
        }
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("serialization is stable: same model, same bytes") {
    const auto ds = training_set();
    GbConfig cfg;
    cfg.n_estimators = 5;
    const TrainedModel model{ds.schema, fit_gb(ds, cfg)};
    CHECK(model_to_json(model) == model_to_json(model));
}

TEST_CASE("unknown version tag is rejected") {
    const auto ds = training_set();
    TreeConfig cfg;
    const TrainedModel model{ds.schema, TreeModel{fit_tree(ds.features, ds.labels, cfg), cfg}};
    auto text = model_to_json(model);
    const auto pos = text.find("\"version\": 1");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 12, "\"version\": 9");
    CHECK_THROWS_AS(model_from_json(text), DataError);
}

TEST_CASE("truncated JSON is an error, not a partial model") {
    const auto ds = training_set();
    TreeConfig cfg;
    const TrainedModel model{ds.schema, TreeModel{fit_tree(ds.features, ds.labels, cfg), cfg}};
    const auto text = model_to_json(model);
    CHECK_THROWS_AS(model_from_json(text.substr(0, text.size() / 2)), DataError);
    CHECK_THROWS_AS(model_from_json(""), DataError);
}

TEST_CASE("unknown kind and foreign format are rejected") {
    CHECK_THROWS_AS(model_from_json(R"({"format":"something-else","version":1})"), DataError);
    CHECK_THROWS_AS(
        model_from_json(
            R"({"format":"mortml-model","version":1,"kind":"perceptron","schema":{"features":["a"],"label":"y"},"model":{}})"),
        DataError);
}

TEST_CASE("prediction validates the feature count against the schema") {
    const auto ds = training_set();
    TreeConfig cfg;
    const TrainedModel model{ds.schema, TreeModel{fit_tree(ds.features, ds.labels, cfg), cfg}};
    const std::vector<double> short_row(8, 0.0);
    CHECK_THROWS_AS(predict_scored(model, short_row), DataError);
}

}  // TEST_SUITE
