#include <doctest.h>

#include <set>

#include "mortml/errors.hpp"
#include "mortml/tree.hpp"
#include "oracles.hpp"

using namespace mortml;

namespace {

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = i;
    return rows;
}

const std::vector<int> kBothFeatures{0, 1};
const std::vector<int> kOneFeature{0};

// 2-D XOR, exactly representable at depth 2
const auto kXorX = Matrix::from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
const std::vector<int> kXorY{0, 1, 1, 0};

}  // namespace

TEST_SUITE("tree") {

TEST_CASE("entropy spot values") {
    const std::array<std::int64_t, 2> pure{10, 0};
    const std::array<std::int64_t, 2> even{7, 7};
    const std::array<std::int64_t, 2> mixed{9, 5};
    CHECK(entropy(pure) == 0.0);
    CHECK(entropy(even) == 1.0);
    CHECK(entropy(mixed) == doctest::Approx(0.9403).epsilon(1e-4));
    CHECK_THROWS_AS(entropy(std::span<const std::int64_t>{}), DataError);
}

TEST_CASE("entropy is maximal exactly at equiprobable counts") {
    for (std::int64_t k = 1; k <= 20; ++k) {
        const std::array<std::int64_t, 2> even{k, k};
        CHECK(entropy(even) == doctest::Approx(1.0).epsilon(1e-12));
        const std::array<std::int64_t, 2> skew{k, k + 1};
        CHECK(entropy(skew) < 1.0);
    }
}

TEST_CASE("information gain: hand values and error paths") {
    const std::array<std::int64_t, 2> parent{9, 5};
    const std::array<std::int64_t, 2> left{6, 2};
    const std::array<std::int64_t, 2> right{3, 3};
    CHECK(information_gain(parent, left, right) == doctest::Approx(0.0481).epsilon(1e-4));

    const std::array<std::int64_t, 2> balanced{2, 2};
    const std::array<std::int64_t, 2> pure0{2, 0};
    const std::array<std::int64_t, 2> pure1{0, 2};
    CHECK(information_gain(balanced, pure0, pure1) == doctest::Approx(1.0).epsilon(1e-12));

    // children that replicate the parent ratio yield zero gain
    const std::array<std::int64_t, 2> p2{4, 2};
    const std::array<std::int64_t, 2> l2{2, 1};
    const std::array<std::int64_t, 2> r2{2, 1};
    CHECK(information_gain(p2, l2, r2) == doctest::Approx(0.0).epsilon(1e-12));

    const std::array<std::int64_t, 2> bad{1, 1};
    CHECK_THROWS_AS(information_gain(parent, bad, right), DataError);
}

TEST_CASE("information gain is non-negative on random consistent splits") {
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        std::array<std::int64_t, 2> left{static_cast<std::int64_t>(rng.below(10)),
                                         static_cast<std::int64_t>(rng.below(10))};
        std::array<std::int64_t, 2> right{static_cast<std::int64_t>(rng.below(10)),
                                          static_cast<std::int64_t>(rng.below(10))};
        const std::array<std::int64_t, 2> parent{left[0] + right[0], left[1] + right[1]};
        if (parent[0] + parent[1] == 0 || left[0] + left[1] == 0 || right[0] + right[1] == 0)
            continue;
        CHECK(information_gain(parent, left, right) >= -1e-12);
    }
}

TEST_CASE("best_split: identical rows give no split") {
    const auto x = Matrix::from_rows({{1, 1}, {1, 1}, {1, 1}});
    const std::vector<double> y{0, 1, 0};
    CHECK_FALSE(
        best_split(x, y, all_rows(3), kBothFeatures, SplitCriterion::entropy).has_value());
}

TEST_CASE("best_split: 1-D example picks the 6.0 midpoint at gain 1") {
    const auto x = Matrix::from_rows({{1}, {2}, {10}, {11}});
    const std::vector<double> y{0, 0, 1, 1};
    const auto choice = best_split(x, y, all_rows(4), kOneFeature, SplitCriterion::entropy);
    REQUIRE(choice.has_value());
    CHECK(choice->feature_index == 0);
    CHECK(choice->threshold == 6.0);
    CHECK(choice->gain == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fit_tree: single-class set produces one pure leaf") {
    const auto x = Matrix::from_rows({{0}, {1}, {2}});
    const std::vector<int> y{1, 1, 1};
    const auto tree = fit_tree(x, y, {});
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].is_leaf());
    CHECK(predict_tree(tree, std::vector<double>{5.0}).label == 1);
}

TEST_CASE("fit_tree learns XOR exactly at depth 2") {
    TreeConfig cfg;
    cfg.max_depth = 2;
    const auto tree = fit_tree(kXorX, kXorY, cfg);
    CHECK(tree_depth(tree) <= 2);
    for (std::size_t r = 0; r < 4; ++r)
        CHECK(predict_tree(tree, kXorX.row(r)).label == kXorY[r]);
    CHECK(predict_tree(tree, std::vector<double>{1, 0}).label == 1);
}

TEST_CASE("leaf probabilities sum to one") {
    TreeConfig cfg;
    cfg.max_depth = 1;
    const auto x = Matrix::from_rows({{0}, {0}, {1}, {1}, {1}});
    const std::vector<int> y{0, 1, 1, 1, 0};
    const auto tree = fit_tree(x, y, cfg);
    for (const double probe : {-1.0, 0.2, 0.7, 2.0}) {
        const auto p = predict_tree(tree, std::vector<double>{probe});
        CHECK(p.probabilities[0] + p.probabilities[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("corrupt model: feature index beyond the input is rejected") {
    Tree tree;
    tree.nodes.push_back({5, 0.5, 1, 2, {0, 0}, 0.0});
    tree.nodes.push_back({-1, 0, -1, -1, {1, 0}, 0.0});
    tree.nodes.push_back({-1, 0, -1, -1, {0, 1}, 0.0});
    CHECK_THROWS_AS(predict_tree(tree, std::vector<double>{1.0, 2.0}), DataError);
}

TEST_CASE("empty dataset is rejected") {
    const Matrix x;
    CHECK_THROWS_AS(fit_tree(x, std::vector<int>{}, {}), DataError);
}

TEST_CASE("fitted trees match the exhaustive reference on 250 random datasets") {
    Rng rng(4242);
    int nontrivial = 0;
    for (int trial = 0; trial < 250; ++trial) {
        const std::size_t n = 2 + rng.below(7);   // up to 8 rows
        const std::size_t d = 1 + rng.below(3);   // up to 3 features
        std::vector<std::vector<double>> rows(n);
        std::vector<int> labels(n);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t j = 0; j < d; ++j)
                rows[r].push_back(static_cast<double>(rng.below(4)));  // duplicates likely
            labels[r] = static_cast<int>(rng.below(2));
        }
        TreeConfig cfg;
        cfg.max_depth = 1 + static_cast<int>(rng.below(4));
        const auto x = Matrix::from_rows(rows);
        const auto tree = fit_tree(x, labels, cfg);
        const auto ref = oracles::ref_fit_tree(rows, labels, cfg.max_depth);
        if (tree.nodes.size() > 1) ++nontrivial;
        for (std::size_t r = 0; r < n; ++r)
            CHECK(predict_tree(tree, std::span<const double>(rows[r])).label ==
                  oracles::ref_predict(ref.get(), rows[r]));

        // root split choice itself must match the exhaustive enumeration
        std::vector<std::size_t> root_rows(n);
        std::vector<int> features(d);
        std::vector<double> values(n);
        for (std::size_t r = 0; r < n; ++r) {
            root_rows[r] = r;
            values[r] = labels[r];
        }
        for (std::size_t j = 0; j < d; ++j) features[j] = static_cast<int>(j);
        const auto mine = best_split(x, values, root_rows, features, SplitCriterion::entropy);
        const auto theirs = oracles::ref_best_split(rows, labels, root_rows, 0.0);
        REQUIRE(mine.has_value() == theirs.has_value());
        if (mine) {
            CHECK(mine->feature_index == theirs->feature);
            CHECK(mine->threshold == theirs->threshold);
            CHECK(mine->gain == doctest::Approx(theirs->gain).epsilon(1e-12));
        }
    }
    CHECK(nontrivial > 100);  // the family must actually exercise split search
}

TEST_CASE("depth cap holds and every leaf is reachable by a training row") {
    Rng rng(515);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 10 + rng.below(40);
        std::vector<std::vector<double>> rows(n);
        std::vector<int> labels(n);
        for (std::size_t r = 0; r < n; ++r) {
            rows[r] = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
            labels[r] = rng.uniform() < 0.5 ? 1 : 0;
        }
        TreeConfig cfg;
        cfg.max_depth = 1 + static_cast<int>(rng.below(5));
        const auto x = Matrix::from_rows(rows);
        const auto tree = fit_tree(x, labels, cfg);
        CHECK(tree_depth(tree) <= cfg.max_depth);

        std::set<std::size_t> visited_leaves;
        for (std::size_t r = 0; r < n; ++r) {
            std::size_t idx = 0;
            while (!tree.nodes[idx].is_leaf()) {
                const auto& node = tree.nodes[idx];
                idx = static_cast<std::size_t>(
                    x(r, static_cast<std::size_t>(node.feature_index)) <= node.threshold
                        ? node.left
                        : node.right);
            }
            visited_leaves.insert(idx);
        }
        std::size_t leaf_count = 0;
        for (const auto& node : tree.nodes)
            if (node.is_leaf()) ++leaf_count;
        CHECK(visited_leaves.size() == leaf_count);
    }
}

TEST_CASE("unrestricted tree drives training accuracy to 100% without conflicts") {
    Rng rng(616);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 5 + rng.below(30);
        std::set<std::vector<double>> seen;
        std::vector<std::vector<double>> rows;
        std::vector<int> labels;
        while (rows.size() < n) {
            std::vector<double> row{rng.uniform(-1, 1), rng.uniform(-1, 1)};
            if (!seen.insert(row).second) continue;  // no duplicate x
            rows.push_back(row);
            labels.push_back(rng.uniform() < 0.5 ? 1 : 0);
        }
        TreeConfig cfg;
        cfg.max_depth = 64;
        const auto tree = fit_tree(Matrix::from_rows(rows), labels, cfg);
        for (std::size_t r = 0; r < n; ++r)
            CHECK(predict_tree(tree, std::span<const double>(rows[r])).label == labels[r]);
    }
}

TEST_CASE("regression leaves hold the mean of their targets") {
    Rng rng(717);
    const std::size_t n = 50;
    std::vector<std::vector<double>> rows(n);
    std::vector<double> targets(n);
    for (std::size_t r = 0; r < n; ++r) {
        rows[r] = {rng.uniform(0, 1)};
        targets[r] = rng.uniform(-2, 2);
    }
    TreeConfig cfg;
    cfg.max_depth = 3;
    const auto x = Matrix::from_rows(rows);
    const auto tree = fit_regression_tree(x, targets, cfg);

    std::vector<double> leaf_sum(tree.nodes.size(), 0.0);
    std::vector<std::size_t> leaf_n(tree.nodes.size(), 0);
    for (std::size_t r = 0; r < n; ++r) {
        std::size_t idx = 0;
        while (!tree.nodes[idx].is_leaf()) {
            const auto& node = tree.nodes[idx];
            idx = static_cast<std::size_t>(
                x(r, static_cast<std::size_t>(node.feature_index)) <= node.threshold ? node.left
                                                                                     : node.right);
        }
        leaf_sum[idx] += targets[r];
        ++leaf_n[idx];
    }
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        if (!tree.nodes[i].is_leaf()) continue;
        REQUIRE(leaf_n[i] > 0);
        CHECK(tree.nodes[i].value ==
              doctest::Approx(leaf_sum[i] / static_cast<double>(leaf_n[i])).epsilon(1e-12));
    }
}

}  // TEST_SUITE
