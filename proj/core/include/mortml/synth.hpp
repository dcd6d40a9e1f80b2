#pragma once

#include <cstdint>
#include <vector>

#include "mortml/dataset.hpp"

namespace mortml {

/// Class-conditional Bernoulli rates for one binary feature.
struct BernoulliPair {
    double p_negative = 0.0;  // P(x = 1 | label = 0)
    double p_positive = 0.0;  // P(x = 1 | label = 1)

    bool operator==(const BernoulliPair&) const = default;
};

/// Generator description for a synthetic mortality table: a class prior
/// plus one rate pair per schema feature.
struct SyntheticSpec {
    FeatureSchema schema;
    double positive_prior = 0.5;  // P(label = 1)
    std::vector<BernoulliPair> features;

    void validate() const;

    bool operator==(const SyntheticSpec&) const = default;
};

/// Rate pair giving a binary feature the requested Pearson correlation
/// (phi) with the label while holding the feature's marginal P(x = 1) at
/// base_rate. Errors if the implied rates leave [0, 1].
BernoulliPair rates_for_phi(double phi, double positive_prior, double base_rate = 0.5);

/// n independent rows: label ~ Bernoulli(prior), then each feature from its
/// class-conditional rate, in schema order. Deterministic under seed.
Dataset synthesize(const SyntheticSpec& spec, std::size_t n, std::uint64_t seed);

}  // namespace mortml
