#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mortml/dataset.hpp"
#include "mortml/errors.hpp"

namespace mortml {

enum class KernelKind { linear, rbf };

struct Kernel {
    KernelKind kind = KernelKind::rbf;
    double gamma = 0.0;  // rbf width; 0 resolves to 1/d at fit time

    bool operator==(const Kernel&) const = default;
};

struct SvmConfig {
    double C = 1.0;
    Kernel kernel;
    double tol = 1e-3;        // KKT tolerance
    int max_passes = 10;      // consecutive sweeps without an update before stopping
    long max_sweeps = 20000;  // hard cap; exceeding it raises SvmConvergenceError
    std::uint64_t seed = 0;

    bool operator==(const SvmConfig&) const = default;
};

/// Dual solution. Only rows with alpha > 0 are retained.
struct SvmModel {
    Matrix support_vectors;
    std::vector<double> alphas;
    std::vector<int> labels_pm;  // +1 / -1
    double bias = 0.0;
    Kernel kernel;

    bool operator==(const SvmModel&) const = default;
};

/// Raised when SMO hits the sweep cap; carries the best model seen so far.
class SvmConvergenceError : public TrainError {
public:
    SvmConvergenceError(const std::string& what, SvmModel best)
        : TrainError(what), best_model(std::move(best)) {}

    SvmModel best_model;
};

/// linear: dot(x, z); rbf: exp(-gamma * ||x - z||^2).
double kernel_eval(const Kernel& kernel, std::span<const double> x, std::span<const double> z);

/// Platt-style sequential minimal optimization with seeded random
/// second-index selection. Labels map {0 -> -1, 1 -> +1}. Terminates when
/// every example satisfies the KKT conditions within tol for max_passes
/// consecutive sweeps.
SvmModel fit_svm(const Dataset& ds, const SvmConfig& cfg);

/// sum_i alpha_i y_i K(x_i, x) + b.
double decision_function(const SvmModel& model, std::span<const double> x);

/// 1 iff the decision value is >= 0.
int predict_svm(const SvmModel& model, std::span<const double> x);

}  // namespace mortml
