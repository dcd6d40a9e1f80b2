// Independent reference implementations used as test oracles. These stay
// deliberately naive (separate code paths from the library) so they can
// arbitrate correctness: brute-force enumeration, raw-moment formulas,
// finite differences.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mortml/matrix.hpp"
#include "mortml/mlp.hpp"
#include "mortml/svm.hpp"

namespace oracles {

// Pearson via the one-pass raw-moment identity (different arithmetic route
// from the library's two-pass centered sums).
inline double pearson_raw_moments(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

// Brute-force k nearest neighbors by squared distance, ties to lower index.
inline std::vector<std::size_t> knn_bruteforce(const std::vector<std::vector<double>>& points,
                                               std::size_t query, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i == query) continue;
        double sq = 0;
        for (std::size_t j = 0; j < points[i].size(); ++j) {
            const double d = points[i][j] - points[query][j];
            sq += d * d;
        }
        dist.emplace_back(sq, i);
    }
    std::sort(dist.begin(), dist.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back(dist[i].second);
    return out;
}

// ---------------------------------------------------------------------------
// Exhaustive-search reference classification tree. Same contract as the
// library (entropy gain, midpoint thresholds, lowest-feature/lowest-threshold
// tie break, identical stopping rules) but grown by plain enumeration over
// nested vectors.
struct RefTreeNode {
    bool leaf = true;
    int feature = -1;
    double threshold = 0;
    std::unique_ptr<RefTreeNode> left, right;
    std::int64_t c0 = 0, c1 = 0;
};

inline double ref_entropy(std::int64_t c0, std::int64_t c1) {
    const double n = static_cast<double>(c0 + c1);
    double h = 0;
    if (c0 > 0) {
        const double p = static_cast<double>(c0) / n;
        h -= p * std::log2(p);
    }
    if (c1 > 0) {
        const double p = static_cast<double>(c1) / n;
        h -= p * std::log2(p);
    }
    return h;
}

struct RefSplit {
    int feature;
    double threshold;
    double gain;
};

inline std::optional<RefSplit> ref_best_split(const std::vector<std::vector<double>>& x,
                                              const std::vector<int>& y,
                                              const std::vector<std::size_t>& rows,
                                              double min_gain) {
    std::int64_t p0 = 0, p1 = 0;
    for (const auto r : rows) (y[r] == 0 ? p0 : p1)++;
    const double parent = ref_entropy(p0, p1);
    const double n = static_cast<double>(rows.size());

    std::optional<RefSplit> best;
    const std::size_t d = x[0].size();
    for (std::size_t f = 0; f < d; ++f) {
        std::vector<double> values;
        for (const auto r : rows) values.push_back(x[r][f]);
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            const double t = (values[i] + values[i + 1]) / 2.0;
            std::int64_t l0 = 0, l1 = 0, r0 = 0, r1 = 0;
            for (const auto r : rows)
                if (x[r][f] <= t)
                    (y[r] == 0 ? l0 : l1)++;
                else
                    (y[r] == 0 ? r0 : r1)++;
            const double wl = static_cast<double>(l0 + l1) / n;
            const double wr = static_cast<double>(r0 + r1) / n;
            const double gain = parent - wl * ref_entropy(l0, l1) - wr * ref_entropy(r0, r1);
            if (gain >= min_gain && (!best || gain > best->gain))
                best = RefSplit{static_cast<int>(f), t, gain};
        }
    }
    return best;
}

inline std::unique_ptr<RefTreeNode> ref_grow(const std::vector<std::vector<double>>& x,
                                             const std::vector<int>& y,
                                             const std::vector<std::size_t>& rows, int depth,
                                             int max_depth, int min_samples_split,
                                             double min_gain) {
    auto node = std::make_unique<RefTreeNode>();
    for (const auto r : rows) (y[r] == 0 ? node->c0 : node->c1)++;
    const bool pure = node->c0 == 0 || node->c1 == 0;
    if (depth >= max_depth || rows.size() < static_cast<std::size_t>(min_samples_split) || pure)
        return node;
    const auto split = ref_best_split(x, y, rows, min_gain);
    if (!split) return node;
    std::vector<std::size_t> lrows, rrows;
    for (const auto r : rows)
        (x[r][static_cast<std::size_t>(split->feature)] <= split->threshold ? lrows : rrows)
            .push_back(r);
    node->leaf = false;
    node->feature = split->feature;
    node->threshold = split->threshold;
    node->left = ref_grow(x, y, lrows, depth + 1, max_depth, min_samples_split, min_gain);
    node->right = ref_grow(x, y, rrows, depth + 1, max_depth, min_samples_split, min_gain);
    return node;
}

inline std::unique_ptr<RefTreeNode> ref_fit_tree(const std::vector<std::vector<double>>& x,
                                                 const std::vector<int>& y, int max_depth,
                                                 int min_samples_split = 2, double min_gain = 0.0) {
    std::vector<std::size_t> rows(x.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    return ref_grow(x, y, rows, 0, max_depth, min_samples_split, min_gain);
}

inline int ref_predict(const RefTreeNode* node, const std::vector<double>& row) {
    while (!node->leaf)
        node = row[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left.get()
                                                                               : node->right.get();
    return node->c1 > node->c0 ? 1 : 0;
}

// ---------------------------------------------------------------------------
// KKT verification of an SVM solution against the full training set. Alphas
// for non-support rows are zero by construction; support rows are matched by
// value (test sets are continuous draws, so rows are unique).
struct KktReport {
    double worst_violation = 0;
    double dual_balance = 0;  // |sum alpha_i y_i|
    bool alphas_in_box = true;
};

inline KktReport kkt_check(const mortml::Dataset& ds, const mortml::SvmModel& model, double C,
                           double tol) {
    (void)tol;
    KktReport report;
    double balance = 0;
    for (std::size_t i = 0; i < model.alphas.size(); ++i) {
        balance += model.alphas[i] * model.labels_pm[i];
        if (model.alphas[i] < -1e-12 || model.alphas[i] > C + 1e-9) report.alphas_in_box = false;
    }
    report.dual_balance = std::abs(balance);

    const auto alpha_of_row = [&](std::span<const double> row) -> double {
        for (std::size_t s = 0; s < model.support_vectors.rows(); ++s) {
            const auto sv = model.support_vectors.row(s);
            bool same = true;
            for (std::size_t j = 0; j < sv.size(); ++j)
                if (sv[j] != row[j]) {
                    same = false;
                    break;
                }
            if (same) return model.alphas[s];
        }
        return 0.0;
    };

    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        const auto row = ds.features.row(i);
        const double y = ds.labels[i] == 1 ? 1.0 : -1.0;
        const double margin = y * mortml::decision_function(model, row);
        const double alpha = alpha_of_row(row);
        double violation = 0;
        if (alpha <= 1e-12)
            violation = std::max(0.0, 1.0 - margin);
        else if (alpha >= C - 1e-9)
            violation = std::max(0.0, margin - 1.0);
        else
            violation = std::abs(margin - 1.0);
        report.worst_violation = std::max(report.worst_violation, violation);
    }
    return report;
}

// Exact hard-margin solution for small separable 2-D sets: enumerate the
// support candidates (opposite-class pairs and two-plus-one triples), keep
// the best feasible hyperplane. Returns the geometric margin.
inline double max_margin_2d(const std::vector<std::array<double, 2>>& points,
                            const std::vector<int>& labels_pm) {
    const auto feasible = [&](const std::array<double, 2>& w, double b) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double v = labels_pm[i] * (w[0] * points[i][0] + w[1] * points[i][1] + b);
            if (v < 1.0 - 1e-9) return false;
        }
        return true;
    };
    double best = 0;
    const auto consider = [&](const std::array<double, 2>& w, double b) {
        const double norm = std::hypot(w[0], w[1]);
        if (norm < 1e-300) return;
        if (feasible(w, b)) best = std::max(best, 1.0 / norm);
    };

    const std::size_t n = points.size();
    for (std::size_t p = 0; p < n; ++p) {
        if (labels_pm[p] != 1) continue;
        for (std::size_t m = 0; m < n; ++m) {
            if (labels_pm[m] != -1) continue;
            // pair candidate: midline of (p, m)
            const double dx = points[p][0] - points[m][0];
            const double dy = points[p][1] - points[m][1];
            const double sq = dx * dx + dy * dy;
            if (sq < 1e-300) continue;
            const std::array<double, 2> w{2 * dx / sq, 2 * dy / sq};
            consider(w, 1.0 - (w[0] * points[p][0] + w[1] * points[p][1]));
        }
    }
    // triples: two same-class anchors plus one opposite point
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            if (labels_pm[a] != labels_pm[b]) continue;
            const double ux = points[b][0] - points[a][0];
            const double uy = points[b][1] - points[a][1];
            const double ulen = std::hypot(ux, uy);
            if (ulen < 1e-300) continue;
            for (std::size_t c = 0; c < n; ++c) {
                if (labels_pm[c] == labels_pm[a]) continue;
                const double vx = points[a][0] - points[c][0];
                const double vy = points[a][1] - points[c][1];
                const double proj = (vx * ux + vy * uy) / (ulen * ulen);
                const double px = vx - proj * ux;  // perpendicular from c to line ab
                const double py = vy - proj * uy;
                const double sq = px * px + py * py;
                if (sq < 1e-300) continue;
                std::array<double, 2> w{2 * px / sq, 2 * py / sq};
                double bias = 1.0 - (w[0] * points[a][0] + w[1] * points[a][1]);
                if (labels_pm[a] == -1) {
                    w = {-w[0], -w[1]};
                    bias = -bias;
                }
                consider(w, bias);
            }
        }
    return best;
}

// ---------------------------------------------------------------------------
// Central finite differences of the MLP training loss (dropout disabled).
inline double mlp_loss_at(const mortml::NetParams& params, const mortml::Matrix& batch,
                          const std::vector<int>& labels) {
    const auto cache =
        mortml::mlp_forward(params, batch, 0.0, mortml::DropoutMode::eval, nullptr);
    return mortml::sparse_ce_loss(cache.probs, labels);
}

struct GradCheckResult {
    double max_rel_error = 0;
    std::size_t checked = 0;
};

// `block` must alias one of `params`' own storage vectors; entries are
// perturbed in place and restored.
inline void fd_check_block(mortml::NetParams& params, std::vector<double>& block,
                           const std::vector<double>& grad_block, const mortml::Matrix& batch,
                           const std::vector<int>& labels, double h, GradCheckResult& result,
                           const std::vector<std::size_t>* subsample = nullptr) {
    const auto check_index = [&](std::size_t i) {
        const double saved = block[i];
        block[i] = saved + h;
        const double up = mlp_loss_at(params, batch, labels);
        block[i] = saved - h;
        const double down = mlp_loss_at(params, batch, labels);
        block[i] = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double analytic = grad_block[i];
        const double rel = std::abs(analytic - numeric) /
                           std::max({std::abs(analytic), std::abs(numeric), 1e-6});
        result.max_rel_error = std::max(result.max_rel_error, rel);
        ++result.checked;
    };
    if (subsample) {
        for (const auto i : *subsample)
            if (i < block.size()) check_index(i);
    } else {
        for (std::size_t i = 0; i < block.size(); ++i) check_index(i);
    }
}

}  // namespace oracles
