#include "mortml/metrics.hpp"

#include <cstdio>

#include "mortml/errors.hpp"

namespace mortml {

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred) {
    if (y_true.size() != y_pred.size()) throw DataError("confusion: length mismatch");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const int t = y_true[i];
        const int p = y_pred[i];
        if ((t != 0 && t != 1) || (p != 0 && p != 1))
            throw DataError("confusion: labels must be 0 or 1");
        if (t == 1 && p == 1)
            ++cm.tp;
        else if (t == 0 && p == 1)
            ++cm.fp;
        else if (t == 1 && p == 0)
            ++cm.fn;
        else
            ++cm.tn;
    }
    return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
    const auto n = cm.total();
    if (n <= 0) throw DataError("metrics: empty confusion matrix");
    if (cm.tp < 0 || cm.fp < 0 || cm.fn < 0 || cm.tn < 0)
        throw DataError("metrics: negative count");

    MetricsReport r;
    r.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(n);

    if (cm.tp + cm.fp > 0)
        r.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
    else
        r.precision_degenerate = true;

    if (cm.tp + cm.fn > 0)
        r.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    else
        r.recall_degenerate = true;

    if (!r.precision_degenerate && !r.recall_degenerate && r.precision + r.recall > 0.0)
        r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    else
        r.f1_degenerate = true;  // harmonic mean has a zero denominator
    return r;
}

std::string format_percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
    return buf;
}

}  // namespace mortml
