#include "mortml/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "mortml/rng.hpp"

namespace mortml {

double kernel_eval(const Kernel& kernel, std::span<const double> x, std::span<const double> z) {
    if (x.size() != z.size()) throw DataError("kernel: dimension mismatch");
    if (kernel.kind == KernelKind::linear) {
        double dot = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * z[i];
        return dot;
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - z[i];
        sq += d * d;
    }
    return std::exp(-kernel.gamma * sq);
}

namespace {

class SmoSolver {
public:
    SmoSolver(const Dataset& ds, const SvmConfig& cfg, Kernel kernel)
        : features_(ds.features), cfg_(cfg), kernel_(kernel), n_(ds.n_rows()), rng_(cfg.seed) {
        labels_.reserve(n_);
        for (const int y : ds.labels) labels_.push_back(y == 1 ? 1 : -1);
        alphas_.assign(n_, 0.0);
        if (n_ <= 2048) {
            gram_ = Matrix(n_, n_);
            for (std::size_t i = 0; i < n_; ++i)
                for (std::size_t j = i; j < n_; ++j) {
                    const double k = kernel_eval(kernel_, features_.row(i), features_.row(j));
                    (*gram_)(i, j) = k;
                    (*gram_)(j, i) = k;
                }
        }
    }

    SvmModel solve() {
        long sweeps = 0;
        int quiet_passes = 0;
        double best_violation = std::numeric_limits<double>::infinity();
        std::vector<double> best_alphas = alphas_;
        double best_bias = bias_;

        while (true) {
            if (sweeps >= cfg_.max_sweeps) {
                const double violation = max_kkt_violation();
                if (violation < best_violation) {
                    best_alphas = alphas_;
                    best_bias = bias_;
                }
                alphas_ = std::move(best_alphas);
                bias_ = best_bias;
                throw SvmConvergenceError("svm: SMO did not converge within " +
                                              std::to_string(cfg_.max_sweeps) +
                                              " sweeps (max KKT violation " +
                                              std::to_string(violation) + ")",
                                          extract_model());
            }
            ++sweeps;
            const int changed = sweep();
            quiet_passes = changed == 0 ? quiet_passes + 1 : 0;
            if (quiet_passes >= cfg_.max_passes) {
                const double violation = max_kkt_violation();
                if (violation <= cfg_.tol) break;
                if (violation < best_violation) {
                    best_violation = violation;
                    best_alphas = alphas_;
                    best_bias = bias_;
                }
                quiet_passes = 0;  // not there yet; random second choices will differ
            }
        }
        return extract_model();
    }

private:
    double gram(std::size_t i, std::size_t j) const {
        if (gram_) return (*gram_)(i, j);
        return kernel_eval(kernel_, features_.row(i), features_.row(j));
    }

    double decision(std::size_t i) const {
        double sum = bias_;
        for (std::size_t j = 0; j < n_; ++j)
            if (alphas_[j] > 0.0) sum += alphas_[j] * labels_[j] * gram(j, i);
        return sum;
    }

    int sweep() {
        int changed = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double err_i = decision(i) - labels_[i];
            const double margin = labels_[i] * err_i;
            const bool violates = (margin < -cfg_.tol && alphas_[i] < cfg_.C) ||
                                  (margin > cfg_.tol && alphas_[i] > 0.0);
            if (!violates) continue;
            // a fresh random partner per attempt; a deterministic rotation
            // can lock into a step-reversing pair on degenerate geometries
            for (std::size_t attempt = 0; attempt < n_; ++attempt) {
                const auto j = static_cast<std::size_t>(rng_.below(n_));
                if (j == i) continue;
                if (take_step(i, j, err_i)) {
                    ++changed;
                    break;
                }
            }
        }
        return changed;
    }

    bool take_step(std::size_t i, std::size_t j, double err_i) {
        const double err_j = decision(j) - labels_[j];
        const double alpha_i = alphas_[i];
        const double alpha_j = alphas_[j];
        const int yi = labels_[i];
        const int yj = labels_[j];

        double lo, hi;
        if (yi != yj) {
            lo = std::max(0.0, alpha_j - alpha_i);
            hi = std::min(cfg_.C, cfg_.C + alpha_j - alpha_i);
        } else {
            lo = std::max(0.0, alpha_i + alpha_j - cfg_.C);
            hi = std::min(cfg_.C, alpha_i + alpha_j);
        }
        if (lo >= hi) return false;

        const double k_ii = gram(i, i);
        const double k_jj = gram(j, j);
        const double k_ij = gram(i, j);
        const double eta = 2.0 * k_ij - k_ii - k_jj;
        if (eta >= 0.0) return false;

        double alpha_j_new = alpha_j - yj * (err_i - err_j) / eta;
        alpha_j_new = std::clamp(alpha_j_new, lo, hi);
        if (std::abs(alpha_j_new - alpha_j) < 1e-5) return false;

        const double alpha_i_new = alpha_i + yi * yj * (alpha_j - alpha_j_new);

        const double b1 = bias_ - err_i - yi * (alpha_i_new - alpha_i) * k_ii -
                          yj * (alpha_j_new - alpha_j) * k_ij;
        const double b2 = bias_ - err_j - yi * (alpha_i_new - alpha_i) * k_ij -
                          yj * (alpha_j_new - alpha_j) * k_jj;
        if (alpha_i_new > 0.0 && alpha_i_new < cfg_.C)
            bias_ = b1;
        else if (alpha_j_new > 0.0 && alpha_j_new < cfg_.C)
            bias_ = b2;
        else
            bias_ = (b1 + b2) / 2.0;

        alphas_[i] = alpha_i_new;
        alphas_[j] = alpha_j_new;
        return true;
    }

    double max_kkt_violation() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double v = labels_[i] * decision(i);
            const double a = alphas_[i];
            double violation = 0.0;
            if (a <= 1e-12)
                violation = std::max(0.0, 1.0 - v);
            else if (a >= cfg_.C - 1e-12)
                violation = std::max(0.0, v - 1.0);
            else
                violation = std::abs(v - 1.0);
            worst = std::max(worst, violation);
        }
        return worst;
    }

    SvmModel extract_model() const {
        SvmModel model;
        model.kernel = kernel_;
        model.bias = bias_;
        for (std::size_t i = 0; i < n_; ++i) {
            if (alphas_[i] <= 0.0) continue;
            model.support_vectors.append_row(features_.row(i));
            model.alphas.push_back(alphas_[i]);
            model.labels_pm.push_back(labels_[i]);
        }
        return model;
    }

    const Matrix& features_;
    const SvmConfig& cfg_;
    Kernel kernel_;
    std::size_t n_;
    Rng rng_;
    std::vector<int> labels_;
    std::vector<double> alphas_;
    double bias_ = 0.0;
    std::optional<Matrix> gram_;
};

}  // namespace

SvmModel fit_svm(const Dataset& ds, const SvmConfig& cfg) {
    ds.validate();
    if (cfg.C <= 0.0) throw ConfigError("svm: C must be positive");
    if (cfg.tol <= 0.0) throw ConfigError("svm: tol must be positive");
    if (cfg.max_passes < 1) throw ConfigError("svm: max_passes must be at least 1");
    if (cfg.kernel.gamma < 0.0) throw ConfigError("svm: gamma must be non-negative");
    const auto counts = ds.class_counts();
    if (counts[0] == 0 || counts[1] == 0) throw TrainError("svm: both classes must be present");

    Kernel kernel = cfg.kernel;
    if (kernel.kind == KernelKind::rbf && kernel.gamma == 0.0)
        kernel.gamma = 1.0 / static_cast<double>(ds.n_features());
    if (kernel.kind == KernelKind::linear) kernel.gamma = 0.0;

    return SmoSolver(ds, cfg, kernel).solve();
}

double decision_function(const SvmModel& model, std::span<const double> x) {
    if (model.alphas.empty()) throw DataError("svm: empty model");
    double sum = model.bias;
    for (std::size_t i = 0; i < model.alphas.size(); ++i)
        sum += model.alphas[i] * model.labels_pm[i] *
               kernel_eval(model.kernel, model.support_vectors.row(i), x);
    return sum;
}

int predict_svm(const SvmModel& model, std::span<const double> x) {
    return decision_function(model, x) >= 0.0 ? 1 : 0;
}

}  // namespace mortml
