#include "mortml/synth.hpp"

#include <cmath>
#include <string>

#include "mortml/errors.hpp"
#include "mortml/rng.hpp"

namespace mortml {

void SyntheticSpec::validate() const {
    schema.validate();
    if (!(positive_prior > 0.0 && positive_prior < 1.0))
        throw ConfigError("synth: positive_prior must lie strictly between 0 and 1");
    if (features.size() != schema.size())
        throw ConfigError("synth: " + std::to_string(features.size()) + " rate pairs for " +
                          std::to_string(schema.size()) + " schema features");
    for (std::size_t j = 0; j < features.size(); ++j) {
        const auto& f = features[j];
        if (f.p_negative < 0.0 || f.p_negative > 1.0 || f.p_positive < 0.0 || f.p_positive > 1.0)
            throw ConfigError("synth: probability outside [0,1] for feature '" +
                              schema.feature_names[j] + "'");
    }
}

BernoulliPair rates_for_phi(double phi, double positive_prior, double base_rate) {
    if (!(positive_prior > 0.0 && positive_prior < 1.0))
        throw ConfigError("rates_for_phi: prior must lie strictly between 0 and 1");
    if (!(base_rate > 0.0 && base_rate < 1.0))
        throw ConfigError("rates_for_phi: base_rate must lie strictly between 0 and 1");
    // For binary x,y: phi = (p1 - p0) * sqrt(pi(1-pi) / q(1-q)) with q the
    // marginal P(x=1). Holding q = base_rate and splitting the gap so the
    // marginal stays put gives the pair below.
    const double gap = phi * std::sqrt(base_rate * (1.0 - base_rate) /
                                       (positive_prior * (1.0 - positive_prior)));
    BernoulliPair pair;
    pair.p_positive = base_rate + (1.0 - positive_prior) * gap;
    pair.p_negative = base_rate - positive_prior * gap;
    if (pair.p_positive < 0.0 || pair.p_positive > 1.0 || pair.p_negative < 0.0 ||
        pair.p_negative > 1.0)
        throw ConfigError("rates_for_phi: phi " + std::to_string(phi) +
                          " is unreachable at this prior/base rate");
    return pair;
}

Dataset synthesize(const SyntheticSpec& spec, std::size_t n, std::uint64_t seed) {
    spec.validate();
    if (n == 0) throw ConfigError("synthesize: n must be at least 1");

    Rng rng(seed);
    Dataset ds;
    ds.schema = spec.schema;
    ds.features = Matrix(n, spec.schema.size());
    ds.labels.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        const int label = rng.uniform() < spec.positive_prior ? 1 : 0;
        ds.labels.push_back(label);
        for (std::size_t j = 0; j < spec.features.size(); ++j) {
            const double p = label == 1 ? spec.features[j].p_positive : spec.features[j].p_negative;
            ds.features(r, j) = rng.uniform() < p ? 1.0 : 0.0;
        }
    }
    return ds;
}

}  // namespace mortml
