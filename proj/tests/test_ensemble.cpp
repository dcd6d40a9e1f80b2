#include <doctest.h>

#include <algorithm>
#include <set>

#include "mortml/errors.hpp"
#include "mortml/forest.hpp"
#include "mortml/gboost.hpp"
#include "mortml/synth.hpp"

using namespace mortml;

namespace {

Dataset make_dataset(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels) {
    Dataset ds;
    ds.schema = FeatureSchema::generic(rows[0].size());
    ds.features = Matrix::from_rows(rows);
    ds.labels = labels;
    return ds;
}

Dataset linearly_separable(Rng& rng, std::size_t n) {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
        const int y = rng.uniform() < 0.5 ? 1 : 0;
        const double offset = y == 1 ? 2.0 : -2.0;
        rows.push_back({rng.uniform(-1, 1) + offset, rng.uniform(-1, 1) + offset});
        labels.push_back(y);
    }
    labels[0] = 0;
    labels[1] = 1;  // guarantee both classes
    rows[0][0] = -2.5;
    rows[1][0] = 2.5;
    return make_dataset(rows, labels);
}

Dataset random_labeled(Rng& rng, std::size_t n, std::size_t d) {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row;
        for (std::size_t j = 0; j < d; ++j) row.push_back(rng.uniform(-1, 1));
        rows.push_back(row);
        labels.push_back(rng.uniform() < 0.5 ? 1 : 0);
    }
    labels[0] = 0;
    labels[1] = 1;
    return make_dataset(rows, labels);
}

}  // namespace

TEST_SUITE("ensemble") {

TEST_CASE("bootstrap: n = 1 repeats the only row") {
    const auto ds = make_dataset({{3, 4}}, {1});
    const auto sample = bootstrap_sample(ds, 9);
    CHECK(sample.n_rows() == 1);
    CHECK(sample.features(0, 0) == 3.0);
}

TEST_CASE("bootstrap: output size equals input size") {
    Rng rng(1);
    for (const std::size_t n : {2, 17, 100}) {
        const auto ds = random_labeled(rng, n, 2);
        CHECK(bootstrap_sample(ds, rng.next_raw()).n_rows() == n);
    }
}

TEST_CASE("bootstrap: distinct-row fraction approaches 1 - 1/e") {
    Rng rng(2);
    const std::size_t n = 1000;
    const auto ds = random_labeled(rng, n, 1);  // continuous, rows unique w.p. 1
    double fraction_sum = 0;
    const int repeats = 10;
    for (int i = 0; i < repeats; ++i) {
        const auto sample = bootstrap_sample(ds, rng.next_raw());
        std::set<double> distinct;
        for (std::size_t r = 0; r < n; ++r) distinct.insert(sample.features(r, 0));
        fraction_sum += static_cast<double>(distinct.size()) / static_cast<double>(n);
    }
    CHECK(std::abs(fraction_sum / repeats - 0.632) <= 0.03);
}

TEST_CASE("degenerate forest (1 tree, all features, no bootstrap) equals the plain tree") {
    Rng rng(3);
    const auto ds = random_labeled(rng, 40, 3);
    ForestConfig cfg;
    cfg.n_trees = 1;
    cfg.max_features = 3;
    cfg.bootstrap = false;
    cfg.seed = 1234;
    const auto forest = fit_forest(ds, cfg);
    const auto tree = fit_tree(ds.features, ds.labels, cfg.tree);
    for (int probe = 0; probe < 50; ++probe) {
        const std::vector<double> x{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        CHECK(predict_forest(forest, x).label == predict_tree(tree, x).label);
    }
}

TEST_CASE("forest determinism under seed") {
    Rng rng(4);
    const auto ds = random_labeled(rng, 30, 2);
    ForestConfig cfg;
    cfg.n_trees = 7;
    cfg.seed = 77;
    CHECK(fit_forest(ds, cfg) == fit_forest(ds, cfg));
}

TEST_CASE("forest separates an easy 100-row problem") {
    Rng rng(5);
    const auto ds = linearly_separable(rng, 100);
    ForestConfig cfg;
    cfg.n_trees = 21;
    cfg.seed = 7;
    const auto forest = fit_forest(ds, cfg);
    std::size_t correct = 0;
    for (std::size_t r = 0; r < ds.n_rows(); ++r)
        if (predict_forest(forest, ds.features.row(r)).label == ds.labels[r]) ++correct;
    CHECK(static_cast<double>(correct) / static_cast<double>(ds.n_rows()) >= 0.95);
}

TEST_CASE("vote fractions count by hand; documented tie rule") {
    ForestModel model;
    // three stump "trees": two voting class 1, one voting class 0
    Tree leaf1;
    leaf1.nodes.push_back({-1, 0, -1, -1, {0, 5}, 0.0});
    Tree leaf0;
    leaf0.nodes.push_back({-1, 0, -1, -1, {5, 0}, 0.0});
    model.trees = {leaf1, leaf0, leaf1};
    model.config.n_trees = 3;
    const auto p = predict_forest(model, std::vector<double>{0.0});
    CHECK(p.label == 1);
    CHECK(p.vote_fractions[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(p.vote_fractions[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    model.trees = {leaf1, leaf1};
    const auto unanimous = predict_forest(model, std::vector<double>{0.0});
    CHECK(unanimous.label == 1);
    CHECK(unanimous.vote_fractions[1] == 1.0);

    model.trees = {leaf1, leaf0};  // 1-1 tie goes to class 0
    CHECK(predict_forest(model, std::vector<double>{0.0}).label == 0);
}

TEST_CASE("forest rejects single-class input") {
    const auto ds = make_dataset({{0}, {1}, {2}}, {1, 1, 1});
    CHECK_THROWS_AS(fit_forest(ds, {}), TrainError);
}

TEST_CASE("forest prediction ignores tree order (vote counting commutes)") {
    Rng rng(12);
    const auto ds = random_labeled(rng, 40, 2);
    ForestConfig cfg;
    cfg.n_trees = 9;
    cfg.seed = 4;
    const auto model = fit_forest(ds, cfg);
    auto reversed = model;
    std::reverse(reversed.trees.begin(), reversed.trees.end());
    for (int probe = 0; probe < 30; ++probe) {
        const std::vector<double> x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const auto a = predict_forest(model, x);
        const auto b = predict_forest(reversed, x);
        CHECK(a.label == b.label);
        CHECK(a.vote_fractions == b.vote_fractions);
    }
}

// ---------------------------------------------------------------------------

TEST_CASE("gb: zero learning rate or zero stages collapse to the prior") {
    Rng rng(6);
    const auto ds = random_labeled(rng, 40, 2);
    const double prior =
        static_cast<double>(ds.class_counts()[1]) / static_cast<double>(ds.n_rows());

    GbConfig no_stages;
    no_stages.n_estimators = 0;
    const auto m0 = fit_gb(ds, no_stages);
    CHECK(std::abs(predict_gb(m0, ds.features.row(0)).probability - prior) <= 1e-12);

    GbConfig zero_lr;
    zero_lr.n_estimators = 5;
    zero_lr.learning_rate = 0.0;
    const auto m1 = fit_gb(ds, zero_lr);
    for (int probe = 0; probe < 10; ++probe) {
        const std::vector<double> x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        CHECK(std::abs(predict_gb(m1, x).probability - prior) <= 1e-12);
    }
}

TEST_CASE("gb single stage on the 4-point line matches hand computation") {
    // x = 0,1,2,3 with labels 0,0,1,1; f0 = ln(0.5/0.5) = 0, residuals are
    // +-0.5, the depth-1 stage splits at x = 1.5 and each leaf's Newton step
    // is sum(r) / sum(p(1-p)) = (+-1.0) / 0.5 = +-2
    const auto ds = make_dataset({{0}, {1}, {2}, {3}}, {0, 0, 1, 1});
    GbConfig cfg;
    cfg.n_estimators = 1;
    cfg.max_depth = 1;
    cfg.learning_rate = 0.1;
    const auto model = fit_gb(ds, cfg);
    CHECK(model.f0 == 0.0);
    REQUIRE(model.stages.size() == 1);
    const auto& stage = model.stages[0];
    REQUIRE(stage.nodes.size() == 3);
    CHECK(stage.nodes[0].threshold == doctest::Approx(1.5).epsilon(1e-12));

    // F(x) = 0 + 0.1 * (+-2); sigma gives 0.450166 / 0.549834
    const double f_left = gb_decision(model, std::vector<double>{0.0});
    const double f_right = gb_decision(model, std::vector<double>{3.0});
    CHECK(f_left == doctest::Approx(-0.2).epsilon(1e-9));
    CHECK(f_right == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(predict_gb(model, std::vector<double>{0.0}).probability ==
          doctest::Approx(sigmoid(-0.2)).epsilon(1e-9));
    CHECK(predict_gb(model, std::vector<double>{3.0}).label == 1);
}

TEST_CASE("gb: probability stays inside (0,1) and empty stages give sigmoid(f0)") {
    Rng rng(7);
    const auto ds = random_labeled(rng, 30, 2);
    GbConfig cfg;
    cfg.n_estimators = 25;
    const auto model = fit_gb(ds, cfg);
    for (int probe = 0; probe < 30; ++probe) {
        const std::vector<double> x{rng.uniform(-3, 3), rng.uniform(-3, 3)};
        const double p = predict_gb(model, x).probability;
        CHECK(p > 0.0);
        CHECK(p < 1.0);
    }
}

TEST_CASE("gb training log-loss is non-increasing, 20 seeded datasets") {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const auto ds = random_labeled(rng, 20 + rng.below(40), 1 + rng.below(3));
        GbConfig cfg;
        cfg.n_estimators = 30;
        std::vector<double> losses;
        fit_gb(ds, cfg, &losses);
        REQUIRE(losses.size() == 31);  // prior + one per stage
        for (std::size_t i = 1; i < losses.size(); ++i) CHECK(losses[i] <= losses[i - 1] + 1e-9);
    }
}

TEST_CASE("gb Newton denominators stay guarded on nearly pure data") {
    // one stray negative in a sea of positives drives leaves nearly pure;
    // scores must stay finite
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 50; ++i) {
        rows.push_back({static_cast<double>(i)});
        labels.push_back(i == 0 ? 0 : 1);
    }
    const auto ds = make_dataset(rows, labels);
    GbConfig cfg;
    cfg.n_estimators = 60;
    const auto model = fit_gb(ds, cfg);
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        const double f = gb_decision(model, ds.features.row(r));
        CHECK(std::isfinite(f));
    }
}

TEST_CASE("gb rejects single-class input") {
    const auto ds = make_dataset({{0}, {1}}, {1, 1});
    CHECK_THROWS_AS(fit_gb(ds, {}), TrainError);
}

}  // TEST_SUITE
