#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mortml/config_file.hpp"
#include "mortml/dataset.hpp"
#include "mortml/forest.hpp"
#include "mortml/gboost.hpp"
#include "mortml/metrics.hpp"
#include "mortml/mlp.hpp"
#include "mortml/model_io.hpp"
#include "mortml/smote.hpp"
#include "mortml/stats.hpp"
#include "mortml/svm.hpp"
#include "mortml/synth.hpp"
#include "mortml/tree.hpp"

namespace mortml {

enum class DataSource { csv, synthetic };
enum class SmotePlacement { train_only, before_split };

/// Fixed report/registry order for the five classifiers.
extern const std::vector<std::string> kModelOrder;

/// Full declarative description of one pipeline run. Every default is
/// echoed into the report so assumed hyperparameters stay visible.
struct ExperimentConfig {
    DataSource source = DataSource::synthetic;
    std::filesystem::path csv_path;
    SyntheticSpec synth;
    std::size_t synth_rows = 470;

    bool impute = true;
    FeatureSchema schema = FeatureSchema::clinical_default();

    bool smote_enabled = true;
    SmoteConfig smote;
    SmotePlacement smote_placement = SmotePlacement::train_only;

    double split_ratio = 0.7;
    bool stratified_split = false;

    std::vector<std::string> enabled_models = kModelOrder;
    TreeConfig decision_tree;
    ForestConfig random_forest;
    GbConfig gradient_boosting;
    SvmConfig svm;
    TrainConfig mlp;

    std::uint64_t seed = 42;
    std::filesystem::path out_dir = "out";

    /// Built-in synthetic experiment (no config file needed).
    static ExperimentConfig defaults();
    static ExperimentConfig from_ini(const IniFile& ini);

    void validate() const;
};

struct DatasetSummary {
    std::size_t rows_total = 0;
    std::array<std::int64_t, 2> class_counts{0, 0};
    std::size_t train_rows_before_smote = 0;
    std::size_t train_rows_after_smote = 0;
    std::array<std::int64_t, 2> train_class_counts{0, 0};
    double post_smote_class_ratio = 0.0;  // minority / majority over the trained-on rows
    std::size_t test_rows = 0;
    std::array<std::int64_t, 2> test_class_counts{0, 0};
};

struct ModelOutcome {
    std::string name;
    ConfusionMatrix cm;
    MetricsReport metrics;
    double wall_seconds = 0.0;  // logged, never serialized
    TrainedModel model;
};

struct RunReport {
    std::string config_hash;
    std::string config_json;  // canonical effective config
    DatasetSummary dataset;
    CorrelationMatrix correlation;
    std::vector<ModelOutcome> models;  // in kModelOrder
    std::vector<std::string> stages;   // executed pipeline stages, in order
};

/// Canonical JSON of the effective config (sorted keys, round-trip doubles).
std::string config_to_json(const ExperimentConfig& cfg);

/// FNV-1a 64 hex digest of the canonical config JSON.
std::string config_hash(const ExperimentConfig& cfg);

/// load/synthesize -> impute -> select -> (SMOTE per placement) -> split
/// -> train -> evaluate -> report. Stage names are logged and recorded;
/// errors are rethrown with the failing stage named. Deterministic under
/// cfg.seed.
RunReport run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

/// Deterministic report JSON (timings excluded).
std::string report_to_json(const RunReport& report);

/// report.json plus one model file per trained classifier.
void write_report_files(const RunReport& report, const std::filesystem::path& out_dir);

/// metrics.csv (model x 4 metrics, two-decimal percentages) and
/// correlation.csv (labeled matrix).
void emit_plot_data(const RunReport& report, const std::filesystem::path& out_dir);

}  // namespace mortml
