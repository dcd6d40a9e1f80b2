#include "mortml/schema.hpp"

#include <unordered_set>

#include "mortml/errors.hpp"

namespace mortml {

FeatureSchema FeatureSchema::clinical_default() {
    FeatureSchema s;
    s.feature_names = {"covid_diagnosis", "odynophagia", "chills",  "arthralgia",  "rhinorrhea",
                       "pneumonia",       "cough",       "dyspnea", "patient_type"};
    s.label_name = "mortality";
    return s;
}

FeatureSchema FeatureSchema::generic(std::size_t n_features) {
    FeatureSchema s;
    s.feature_names.reserve(n_features);
    for (std::size_t i = 0; i < n_features; ++i) s.feature_names.push_back("f" + std::to_string(i));
    s.label_name = "label";
    return s;
}

void FeatureSchema::validate() const {
    if (feature_names.empty()) throw ConfigError("schema: no feature names");
    if (label_name.empty()) throw ConfigError("schema: empty label name");
    std::unordered_set<std::string> seen;
    for (const auto& name : feature_names) {
        if (name.empty()) throw ConfigError("schema: empty feature name");
        if (!seen.insert(name).second) throw ConfigError("schema: duplicate feature name '" + name + "'");
        if (name == label_name)
            throw ConfigError("schema: label '" + label_name + "' listed among the features");
    }
}

void FeatureSchema::validate_clinical() const {
    validate();
    if (feature_names.size() != 9)
        throw ConfigError("schema: expected exactly 9 features, got " +
                          std::to_string(feature_names.size()));
}

}  // namespace mortml
