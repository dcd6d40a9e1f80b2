#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace mortml {

/// 2x2 counts with mortality (label 1) as the positive class.
struct ConfusionMatrix {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;

    std::int64_t total() const { return tp + fp + fn + tn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

/// Counts from paired 0/1 label vectors.
ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred);

/// Fractions in [0, 1]. A metric whose denominator is zero reports 0 with
/// its degenerate flag set, so "0 earned" and "0 undefined" stay distinct.
struct MetricsReport {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool precision_degenerate = false;
    bool recall_degenerate = false;
    bool f1_degenerate = false;

    bool operator==(const MetricsReport&) const = default;
};

MetricsReport metrics(const ConfusionMatrix& cm);

/// Fraction rendered as a percentage with two decimals, e.g. "94.29".
std::string format_percent(double fraction);

}  // namespace mortml
