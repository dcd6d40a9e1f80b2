#include "mortml/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mortml/errors.hpp"

namespace mortml {

namespace {

void check_shape(const NetShape& shape) {
    if (shape.input == 0 || shape.hidden1 == 0 || shape.hidden2 == 0 || shape.classes < 2)
        throw ConfigError("net: degenerate layer width");
}

Matrix glorot_matrix(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Matrix w(fan_in, fan_out);
    for (auto& v : w.storage()) v = rng.uniform(-limit, limit);
    return w;
}

}  // namespace

NetParams NetParams::zeros(const NetShape& shape) {
    check_shape(shape);
    NetParams p;
    p.shape = shape;
    p.w1 = Matrix(shape.input, shape.hidden1);
    p.w2 = Matrix(shape.hidden1, shape.hidden2);
    p.w3 = Matrix(shape.hidden2, shape.classes);
    p.b1.assign(shape.hidden1, 0.0);
    p.b2.assign(shape.hidden2, 0.0);
    p.b3.assign(shape.classes, 0.0);
    return p;
}

NetParams NetParams::glorot(const NetShape& shape, Rng& rng) {
    NetParams p = zeros(shape);
    p.w1 = glorot_matrix(shape.input, shape.hidden1, rng);
    p.w2 = glorot_matrix(shape.hidden1, shape.hidden2, rng);
    p.w3 = glorot_matrix(shape.hidden2, shape.classes, rng);
    return p;
}

void NetParams::validate() const {
    check_shape(shape);
    if (w1.rows() != shape.input || w1.cols() != shape.hidden1 || b1.size() != shape.hidden1 ||
        w2.rows() != shape.hidden1 || w2.cols() != shape.hidden2 || b2.size() != shape.hidden2 ||
        w3.rows() != shape.hidden2 || w3.cols() != shape.classes || b3.size() != shape.classes)
        throw DataError("net: parameter tensor shapes disagree with the declared shape");
    const auto all_finite = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    if (!all_finite(w1.storage()) || !all_finite(w2.storage()) || !all_finite(w3.storage()) ||
        !all_finite(b1) || !all_finite(b2) || !all_finite(b3))
        throw DataError("net: non-finite parameter");
}

AdamState AdamState::zeros(const NetShape& shape) {
    AdamState st;
    st.m = NetParams::zeros(shape);
    st.v = NetParams::zeros(shape);
    st.timestep = 0;
    return st;
}

Matrix dense_forward(const Matrix& w, std::span<const double> b, const Matrix& x) {
    if (x.cols() != w.rows() || b.size() != w.cols())
        throw DataError("dense: shape mismatch (" + std::to_string(x.cols()) + " inputs vs " +
                        std::to_string(w.rows()) + " weights)");
    Matrix out(x.rows(), w.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto row = x.row(r);
        auto out_row = out.row(r);
        for (std::size_t c = 0; c < w.cols(); ++c) out_row[c] = b[c];
        for (std::size_t k = 0; k < w.rows(); ++k) {
            const double v = row[k];
            if (v == 0.0) continue;
            for (std::size_t c = 0; c < w.cols(); ++c) out_row[c] += v * w(k, c);
        }
    }
    return out;
}

Matrix relu(const Matrix& x) {
    Matrix out = x;
    for (auto& v : out.storage()) v = v > 0.0 ? v : 0.0;
    return out;
}

Matrix dropout(const Matrix& x, double rate, DropoutMode mode, Rng& rng, Matrix* mask_out) {
    if (rate < 0.0 || rate >= 1.0) throw ConfigError("dropout: rate must lie in [0, 1)");
    if (mode == DropoutMode::eval || rate == 0.0) {
        if (mask_out) *mask_out = Matrix(x.rows(), x.cols(), 1.0);
        return x;
    }
    const double scale = 1.0 / (1.0 - rate);
    Matrix mask(x.rows(), x.cols());
    Matrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.storage().size(); ++i) {
        const double keep = rng.uniform() < rate ? 0.0 : scale;
        mask.storage()[i] = keep;
        out.storage()[i] = x.storage()[i] * keep;
    }
    if (mask_out) *mask_out = std::move(mask);
    return out;
}

Matrix softmax(const Matrix& logits) {
    Matrix out(logits.rows(), logits.cols());
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        const auto row = logits.row(r);
        auto out_row = out.row(r);
        const double peak = *std::max_element(row.begin(), row.end());
        double sum = 0.0;
        for (std::size_t c = 0; c < row.size(); ++c) {
            out_row[c] = std::exp(row[c] - peak);
            sum += out_row[c];
        }
        for (std::size_t c = 0; c < row.size(); ++c) out_row[c] /= sum;
    }
    return out;
}

double sparse_ce_loss(const Matrix& probabilities, std::span<const int> labels) {
    if (probabilities.rows() != labels.size()) throw DataError("loss: batch size mismatch");
    if (probabilities.rows() == 0) throw DataError("loss: empty batch");
    double sum = 0.0;
    for (std::size_t r = 0; r < probabilities.rows(); ++r) {
        const int label = labels[r];
        if (label < 0 || static_cast<std::size_t>(label) >= probabilities.cols())
            throw DataError("loss: label " + std::to_string(label) + " out of range");
        const double p =
            std::clamp(probabilities(r, static_cast<std::size_t>(label)), 1e-12, 1.0);
        sum -= std::log(p);
    }
    return sum / static_cast<double>(probabilities.rows());
}

ForwardCache mlp_forward(const NetParams& params, const Matrix& x, double dropout_rate,
                         DropoutMode mode, Rng* rng) {
    if (x.cols() != params.shape.input) throw DataError("forward: input width mismatch");
    if (mode == DropoutMode::train && dropout_rate > 0.0 && rng == nullptr)
        throw ConfigError("forward: train-mode dropout needs an rng");
    Rng unused(0);
    Rng& r = rng ? *rng : unused;

    ForwardCache c;
    c.input = x;
    c.z1 = dense_forward(params.w1, params.b1, x);
    c.h1 = relu(c.z1);
    c.d1 = dropout(c.h1, dropout_rate, mode, r, &c.mask1);
    c.z2 = dense_forward(params.w2, params.b2, c.d1);
    c.h2 = relu(c.z2);
    c.d2 = dropout(c.h2, dropout_rate, mode, r, &c.mask2);
    c.logits = dense_forward(params.w3, params.b3, c.d2);
    c.probs = softmax(c.logits);
    return c;
}

namespace {

// grad_out: batch x out; input: batch x in. Accumulates input^T * grad_out
// and the column sums into the layer gradients.
void dense_backward(const Matrix& input, const Matrix& grad_out, Matrix& w_grad,
                    std::vector<double>& b_grad) {
    for (std::size_t r = 0; r < input.rows(); ++r) {
        const auto in_row = input.row(r);
        const auto g_row = grad_out.row(r);
        for (std::size_t c = 0; c < g_row.size(); ++c) b_grad[c] += g_row[c];
        for (std::size_t k = 0; k < in_row.size(); ++k) {
            const double v = in_row[k];
            if (v == 0.0) continue;
            for (std::size_t c = 0; c < g_row.size(); ++c) w_grad(k, c) += v * g_row[c];
        }
    }
}

// grad_out * w^T, masked by dropout factors and the relu gate of z.
Matrix backprop_through(const Matrix& grad_out, const Matrix& w, const Matrix& mask,
                        const Matrix& z) {
    Matrix grad_in(grad_out.rows(), w.rows(), 0.0);
    for (std::size_t r = 0; r < grad_out.rows(); ++r) {
        const auto g_row = grad_out.row(r);
        auto in_row = grad_in.row(r);
        for (std::size_t k = 0; k < w.rows(); ++k) {
            double sum = 0.0;
            for (std::size_t c = 0; c < w.cols(); ++c) sum += g_row[c] * w(k, c);
            const double gate = z(r, k) > 0.0 ? mask(r, k) : 0.0;
            in_row[k] = sum * gate;
        }
    }
    return grad_in;
}

}  // namespace

NetGrads mlp_backward(const NetParams& params, const ForwardCache& cache,
                      std::span<const int> labels) {
    const std::size_t batch = cache.input.rows();
    if (labels.size() != batch) throw DataError("backward: label count mismatch");

    NetGrads grads = NetParams::zeros(params.shape);

    // fused softmax + cross-entropy gradient
    Matrix d_logits = cache.probs;
    for (std::size_t r = 0; r < batch; ++r)
        d_logits(r, static_cast<std::size_t>(labels[r])) -= 1.0;
    for (auto& v : d_logits.storage()) v /= static_cast<double>(batch);

    dense_backward(cache.d2, d_logits, grads.w3, grads.b3);
    const Matrix d_h2 = backprop_through(d_logits, params.w3, cache.mask2, cache.z2);
    dense_backward(cache.d1, d_h2, grads.w2, grads.b2);
    const Matrix d_h1 = backprop_through(d_h2, params.w2, cache.mask1, cache.z1);
    dense_backward(cache.input, d_h1, grads.w1, grads.b1);
    return grads;
}

void adam_update(std::span<double> params, std::span<const double> grads, std::span<double> m,
                 std::span<double> v, long timestep, const TrainConfig& cfg) {
    const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(timestep));
    const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(timestep));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grads[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
        const double m_hat = m[i] / bias1;
        const double v_hat = v[i] / bias2;
        params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
}

void adam_step(NetParams& params, const NetGrads& grads, AdamState& state, const TrainConfig& cfg) {
    if (!(params.shape == grads.shape) || !(params.shape == state.m.shape))
        throw DataError("adam: shape mismatch");
    ++state.timestep;
    const auto update = [&](std::vector<double>& p, const std::vector<double>& g,
                            std::vector<double>& m, std::vector<double>& v) {
        adam_update(p, g, m, v, state.timestep, cfg);
    };
    update(params.w1.storage(), grads.w1.storage(), state.m.w1.storage(), state.v.w1.storage());
    update(params.b1, grads.b1, state.m.b1, state.v.b1);
    update(params.w2.storage(), grads.w2.storage(), state.m.w2.storage(), state.v.w2.storage());
    update(params.b2, grads.b2, state.m.b2, state.v.b2);
    update(params.w3.storage(), grads.w3.storage(), state.m.w3.storage(), state.v.w3.storage());
    update(params.b3, grads.b3, state.m.b3, state.v.b3);
}

MlpFitResult train_mlp(const Dataset& ds, const TrainConfig& cfg) {
    ds.validate();
    if (cfg.epochs < 0) throw ConfigError("mlp: epochs must be non-negative");
    if (cfg.batch_size < 1) throw ConfigError("mlp: batch_size must be at least 1");
    if (cfg.dropout_rate < 0.0 || cfg.dropout_rate >= 1.0)
        throw ConfigError("mlp: dropout_rate must lie in [0, 1)");
    if (cfg.learning_rate <= 0.0) throw ConfigError("mlp: learning_rate must be positive");

    const NetShape shape{ds.n_features(), cfg.hidden1, cfg.hidden2, 2};
    Rng rng(cfg.seed);
    MlpFitResult result;
    result.params = NetParams::glorot(shape, rng);
    AdamState state = AdamState::zeros(shape);

    const std::size_t n = ds.n_rows();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t stop = std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
            const std::size_t rows = stop - start;
            Matrix batch(rows, ds.n_features());
            std::vector<int> labels(rows);
            for (std::size_t i = 0; i < rows; ++i) {
                const auto src = ds.features.row(order[start + i]);
                std::copy(src.begin(), src.end(), batch.row(i).begin());
                labels[i] = ds.labels[order[start + i]];
            }
            const ForwardCache cache =
                mlp_forward(result.params, batch, cfg.dropout_rate, DropoutMode::train, &rng);
            epoch_loss += sparse_ce_loss(cache.probs, labels) * static_cast<double>(rows);
            const NetGrads grads = mlp_backward(result.params, cache, labels);
            adam_step(result.params, grads, state, cfg);
        }
        result.epoch_losses.push_back(epoch_loss / static_cast<double>(n));
    }
    return result;
}

MlpPrediction predict_mlp(const NetParams& params, const Matrix& x) {
    params.validate();
    Rng unused(0);
    const ForwardCache cache = mlp_forward(params, x, 0.0, DropoutMode::eval, nullptr);
    MlpPrediction out;
    out.probabilities = cache.probs;
    out.labels.reserve(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto row = cache.probs.row(r);
        const auto best = std::max_element(row.begin(), row.end());  // first max: low index wins ties
        out.labels.push_back(static_cast<int>(best - row.begin()));
    }
    return out;
}

}  // namespace mortml
