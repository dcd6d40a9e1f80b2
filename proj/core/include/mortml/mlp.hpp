#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mortml/dataset.hpp"
#include "mortml/matrix.hpp"
#include "mortml/rng.hpp"

namespace mortml {

/// Layer widths. Hidden sizes default to the 128/64 architecture; anything
/// else is an explicit override (used by gradient tests).
struct NetShape {
    std::size_t input = 0;
    std::size_t hidden1 = 128;
    std::size_t hidden2 = 64;
    std::size_t classes = 2;

    bool operator==(const NetShape&) const = default;
};

/// input -> dense(h1) -> dense(h2) -> dense(classes) parameters.
struct NetParams {
    NetShape shape;
    Matrix w1, w2, w3;  // input x h1, h1 x h2, h2 x classes
    std::vector<double> b1, b2, b3;

    static NetParams zeros(const NetShape& shape);
    /// Uniform +-sqrt(6 / (fan_in + fan_out)) weights, zero biases.
    static NetParams glorot(const NetShape& shape, Rng& rng);

    /// Shape consistency and finiteness of every entry.
    void validate() const;

    bool operator==(const NetParams&) const = default;
};

using NetGrads = NetParams;

struct TrainConfig {
    int epochs = 100;
    int batch_size = 32;
    double dropout_rate = 0.2;
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 0;
    std::size_t hidden1 = 128;  // override only for experiments
    std::size_t hidden2 = 64;

    bool operator==(const TrainConfig&) const = default;
};

struct AdamState {
    NetParams m;
    NetParams v;
    long timestep = 0;

    static AdamState zeros(const NetShape& shape);
};

enum class DropoutMode { train, eval };

/// x * w + b, b broadcast over rows.
Matrix dense_forward(const Matrix& w, std::span<const double> b, const Matrix& x);

Matrix relu(const Matrix& x);

/// Inverted dropout: eval mode is the identity; train mode zeroes each
/// entry with probability rate and scales survivors by 1/(1-rate). When
/// mask is non-null it receives the applied factors (0 or 1/(1-rate)).
Matrix dropout(const Matrix& x, double rate, DropoutMode mode, Rng& rng, Matrix* mask = nullptr);

/// Row-wise softmax with max-subtraction.
Matrix softmax(const Matrix& logits);

/// Mean over the batch of -ln(prob of the true class), probability clamped
/// to [1e-12, 1].
double sparse_ce_loss(const Matrix& probabilities, std::span<const int> labels);

/// Activations and dropout masks kept for the backward pass.
struct ForwardCache {
    Matrix input;
    Matrix z1, h1, d1, mask1;  // pre-activation, relu, dropout output, mask
    Matrix z2, h2, d2, mask2;
    Matrix logits, probs;
};

/// Full forward pass; rng is only consumed in train mode with rate > 0.
ForwardCache mlp_forward(const NetParams& params, const Matrix& x, double dropout_rate,
                         DropoutMode mode, Rng* rng);

/// Exact gradients of sparse_ce_loss(softmax(...)) with respect to every
/// parameter, using the fused output gradient (probs - onehot) / batch.
NetGrads mlp_backward(const NetParams& params, const ForwardCache& cache,
                      std::span<const int> labels);

/// One Adam update over a flat parameter block. timestep is the 1-based
/// step (t' = t + 1 already applied by the caller).
void adam_update(std::span<double> params, std::span<const double> grads, std::span<double> m,
                 std::span<double> v, long timestep, const TrainConfig& cfg);

void adam_step(NetParams& params, const NetGrads& grads, AdamState& state,
               const TrainConfig& cfg);

struct MlpFitResult {
    NetParams params;
    std::vector<double> epoch_losses;
};

/// Seeded Glorot init, then epochs x shuffled mini-batches of
/// forward/backward/adam_step. Epoch loss is the row-weighted mean of the
/// minibatch training losses. Deterministic under cfg.seed.
MlpFitResult train_mlp(const Dataset& ds, const TrainConfig& cfg);

struct MlpPrediction {
    std::vector<int> labels;
    Matrix probabilities;  // batch x classes
};

/// Eval-mode forward; class = argmax (ties to the lower index).
MlpPrediction predict_mlp(const NetParams& params, const Matrix& x);

}  // namespace mortml
