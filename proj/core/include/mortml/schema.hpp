#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mortml {

/// Ordered column naming for the mortality table: the nine binary
/// symptom/status features plus the mortality label.
struct FeatureSchema {
    std::vector<std::string> feature_names;
    std::string label_name = "mortality";

    /// The canonical clinical schema (nine features, label "mortality").
    static FeatureSchema clinical_default();

    /// Anonymous schema f0..f{n-1} for in-memory datasets.
    static FeatureSchema generic(std::size_t n_features);

    std::size_t size() const { return feature_names.size(); }

    /// Names non-empty and unique, label not among the features.
    void validate() const;

    /// validate() plus the clinical shape: exactly nine features.
    void validate_clinical() const;

    bool operator==(const FeatureSchema&) const = default;
};

}  // namespace mortml
