#include "mortml/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>

#include "json_util.hpp"
#include "mortml/table.hpp"

namespace mortml {

using detail::json;

const std::vector<std::string> kModelOrder = {"decision_tree", "random_forest",
                                              "gradient_boosting", "svm", "mlp"};

namespace {

SyntheticSpec default_synth_spec() {
    SyntheticSpec spec;
    spec.schema = FeatureSchema::clinical_default();
    spec.positive_prior = 0.30;
    // label correlation targets per feature; the first five follow the
    // reported mortality correlations, the rest are set for clear class
    // separation so the generated problem is learnable at desk scale
    const double phi_targets[] = {0.43, 0.31, 0.44, 0.42, 0.45, 0.55, 0.50, 0.55, 0.50};
    for (const double phi : phi_targets)
        spec.features.push_back(rates_for_phi(phi, spec.positive_prior));
    return spec;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (const unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001B3ULL;
    }
    return hash;
}

std::string to_hex(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return out;
}

template <typename F>
auto run_stage(const std::string& name, F&& body) {
    try {
        return body();
    } catch (const SvmConvergenceError& e) {
        throw TrainError("stage '" + name + "': " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError("stage '" + name + "': " + e.what());
    } catch (const DataError& e) {
        throw DataError("stage '" + name + "': " + e.what());
    } catch (const TrainError& e) {
        throw TrainError("stage '" + name + "': " + e.what());
    }
}

bool model_enabled(const ExperimentConfig& cfg, const std::string& name) {
    return std::find(cfg.enabled_models.begin(), cfg.enabled_models.end(), name) !=
           cfg.enabled_models.end();
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults() {
    ExperimentConfig cfg;
    cfg.synth = default_synth_spec();
    return cfg;
}

void ExperimentConfig::validate() const {
    if (enabled_models.empty()) throw ConfigError("config: no models enabled");
    for (const auto& name : enabled_models)
        if (std::find(kModelOrder.begin(), kModelOrder.end(), name) == kModelOrder.end())
            throw ConfigError("config: unknown model '" + name + "'");
    if (!(split_ratio > 0.0 && split_ratio < 1.0))
        throw ConfigError("config: split ratio must lie strictly between 0 and 1");
    if (source == DataSource::csv && csv_path.empty())
        throw ConfigError("config: source = csv requires a csv_path");
    schema.validate_clinical();
    if (source == DataSource::synthetic) {
        synth.validate();
        if (synth_rows == 0) throw ConfigError("config: synth rows must be at least 1");
    }
    if (smote_enabled && smote.k < 1) throw ConfigError("config: smote k must be at least 1");
}

namespace {

BernoulliPair parse_feature_rates(const IniFile& ini, const std::string& key, double prior) {
    const std::string raw = ini.get_string("synth", key, "");
    // either "phi <target>" or the explicit pair "<p_neg>, <p_pos>"
    if (raw.rfind("phi", 0) == 0) {
        const std::string arg = raw.substr(3);
        try {
            return rates_for_phi(std::stod(arg), prior);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("config: [synth] " + key + ": cannot parse phi target '" + arg + "'");
        }
    }
    std::stringstream ss(raw);
    std::string first, second;
    if (!std::getline(ss, first, ',') || !std::getline(ss, second))
        throw ConfigError("config: [synth] " + key + ": expected 'phi T' or 'p_neg, p_pos'");
    try {
        return BernoulliPair{std::stod(first), std::stod(second)};
    } catch (const std::exception&) {
        throw ConfigError("config: [synth] " + key + ": cannot parse rate pair '" + raw + "'");
    }
}

void reject_unknown_keys(const IniFile& ini, const std::string& section,
                         const std::vector<std::string>& known) {
    for (const auto& key : ini.keys(section))
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("config: [" + section + "] unknown key '" + key + "'");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_ini(const IniFile& ini) {
    ExperimentConfig cfg = defaults();

    static const std::vector<std::string> known_sections = {
        "data", "schema", "synth",           "smote", "split",
        "models", "decision_tree", "random_forest", "gradient_boosting", "svm",
        "mlp",  "run"};
    for (const auto& section : ini.section_names())
        if (std::find(known_sections.begin(), known_sections.end(), section) ==
            known_sections.end())
            throw ConfigError("config: unknown section [" + section + "]");

    reject_unknown_keys(ini, "data", {"source", "csv_path", "impute"});
    const std::string source = ini.get_string("data", "source", "synth");
    if (source == "synth")
        cfg.source = DataSource::synthetic;
    else if (source == "csv")
        cfg.source = DataSource::csv;
    else
        throw ConfigError("config: [data] source must be 'synth' or 'csv'");
    cfg.csv_path = ini.get_string("data", "csv_path", "");
    cfg.impute = ini.get_bool("data", "impute", cfg.impute);

    reject_unknown_keys(ini, "schema", {"features", "label"});
    if (ini.has("schema", "features"))
        cfg.schema.feature_names = ini.get_list("schema", "features", {});
    cfg.schema.label_name = ini.get_string("schema", "label", cfg.schema.label_name);
    cfg.schema.validate_clinical();

    // [synth]: rows, positive_prior, plus one optional key per feature
    std::vector<std::string> synth_keys = {"rows", "positive_prior"};
    synth_keys.insert(synth_keys.end(), cfg.schema.feature_names.begin(),
                      cfg.schema.feature_names.end());
    reject_unknown_keys(ini, "synth", synth_keys);
    cfg.synth_rows = static_cast<std::size_t>(
        ini.get_int("synth", "rows", static_cast<std::int64_t>(cfg.synth_rows)));
    const double prior = ini.get_double("synth", "positive_prior", cfg.synth.positive_prior);
    cfg.synth.positive_prior = prior;
    cfg.synth.schema = cfg.schema;
    bool any_feature_key = false;
    for (const auto& name : cfg.schema.feature_names)
        if (ini.has("synth", name)) any_feature_key = true;
    if (any_feature_key) {
        cfg.synth.features.clear();
        for (const auto& name : cfg.schema.feature_names) {
            if (!ini.has("synth", name))
                throw ConfigError("config: [synth] missing rates for feature '" + name + "'");
            cfg.synth.features.push_back(parse_feature_rates(ini, name, prior));
        }
    } else if (cfg.schema == FeatureSchema::clinical_default()) {
        cfg.synth = default_synth_spec();
        cfg.synth.positive_prior = prior;
        cfg.synth.features.clear();
        const double phi_targets[] = {0.43, 0.31, 0.44, 0.42, 0.45, 0.55, 0.50, 0.55, 0.50};
        for (const double phi : phi_targets) cfg.synth.features.push_back(rates_for_phi(phi, prior));
    } else if (cfg.source == DataSource::synthetic) {
        throw ConfigError("config: [synth] needs per-feature rates for a custom schema");
    }

    reject_unknown_keys(ini, "smote", {"enabled", "k", "placement", "target_ratio"});
    cfg.smote_enabled = ini.get_bool("smote", "enabled", cfg.smote_enabled);
    cfg.smote.k = static_cast<int>(ini.get_int("smote", "k", cfg.smote.k));
    cfg.smote.target_ratio = ini.get_double("smote", "target_ratio", cfg.smote.target_ratio);
    const std::string placement = ini.get_string("smote", "placement", "train_only");
    if (placement == "train_only")
        cfg.smote_placement = SmotePlacement::train_only;
    else if (placement == "before_split")
        cfg.smote_placement = SmotePlacement::before_split;
    else
        throw ConfigError("config: [smote] placement must be 'train_only' or 'before_split'");

    reject_unknown_keys(ini, "split", {"ratio", "stratified"});
    cfg.split_ratio = ini.get_double("split", "ratio", cfg.split_ratio);
    cfg.stratified_split = ini.get_bool("split", "stratified", cfg.stratified_split);

    reject_unknown_keys(ini, "models", {"enabled"});
    cfg.enabled_models = ini.get_list("models", "enabled", cfg.enabled_models);

    reject_unknown_keys(ini, "decision_tree", {"max_depth", "min_samples_split", "min_gain"});
    cfg.decision_tree.max_depth =
        static_cast<int>(ini.get_int("decision_tree", "max_depth", cfg.decision_tree.max_depth));
    cfg.decision_tree.min_samples_split = static_cast<int>(
        ini.get_int("decision_tree", "min_samples_split", cfg.decision_tree.min_samples_split));
    cfg.decision_tree.min_gain =
        ini.get_double("decision_tree", "min_gain", cfg.decision_tree.min_gain);

    reject_unknown_keys(ini, "random_forest",
                        {"n_trees", "max_features", "bootstrap", "max_depth", "min_samples_split"});
    cfg.random_forest.n_trees =
        static_cast<int>(ini.get_int("random_forest", "n_trees", cfg.random_forest.n_trees));
    cfg.random_forest.max_features = static_cast<int>(
        ini.get_int("random_forest", "max_features", cfg.random_forest.max_features));
    cfg.random_forest.bootstrap =
        ini.get_bool("random_forest", "bootstrap", cfg.random_forest.bootstrap);
    cfg.random_forest.tree.max_depth = static_cast<int>(
        ini.get_int("random_forest", "max_depth", cfg.random_forest.tree.max_depth));
    cfg.random_forest.tree.min_samples_split = static_cast<int>(ini.get_int(
        "random_forest", "min_samples_split", cfg.random_forest.tree.min_samples_split));

    reject_unknown_keys(ini, "gradient_boosting", {"n_estimators", "learning_rate", "max_depth"});
    cfg.gradient_boosting.n_estimators = static_cast<int>(
        ini.get_int("gradient_boosting", "n_estimators", cfg.gradient_boosting.n_estimators));
    cfg.gradient_boosting.learning_rate =
        ini.get_double("gradient_boosting", "learning_rate", cfg.gradient_boosting.learning_rate);
    cfg.gradient_boosting.max_depth = static_cast<int>(
        ini.get_int("gradient_boosting", "max_depth", cfg.gradient_boosting.max_depth));

    reject_unknown_keys(ini, "svm", {"C", "kernel", "gamma", "tol", "max_passes", "max_sweeps"});
    cfg.svm.C = ini.get_double("svm", "C", cfg.svm.C);
    const std::string kernel = ini.get_string("svm", "kernel", "rbf");
    if (kernel == "rbf")
        cfg.svm.kernel.kind = KernelKind::rbf;
    else if (kernel == "linear")
        cfg.svm.kernel.kind = KernelKind::linear;
    else
        throw ConfigError("config: [svm] kernel must be 'rbf' or 'linear'");
    cfg.svm.kernel.gamma = ini.get_double("svm", "gamma", cfg.svm.kernel.gamma);
    cfg.svm.tol = ini.get_double("svm", "tol", cfg.svm.tol);
    cfg.svm.max_passes = static_cast<int>(ini.get_int("svm", "max_passes", cfg.svm.max_passes));
    cfg.svm.max_sweeps = ini.get_int("svm", "max_sweeps", cfg.svm.max_sweeps);

    reject_unknown_keys(ini, "mlp", {"epochs", "batch_size", "dropout_rate", "learning_rate"});
    cfg.mlp.epochs = static_cast<int>(ini.get_int("mlp", "epochs", cfg.mlp.epochs));
    cfg.mlp.batch_size = static_cast<int>(ini.get_int("mlp", "batch_size", cfg.mlp.batch_size));
    cfg.mlp.dropout_rate = ini.get_double("mlp", "dropout_rate", cfg.mlp.dropout_rate);
    cfg.mlp.learning_rate = ini.get_double("mlp", "learning_rate", cfg.mlp.learning_rate);

    reject_unknown_keys(ini, "run", {"seed", "out_dir"});
    cfg.seed = static_cast<std::uint64_t>(ini.get_int("run", "seed", static_cast<std::int64_t>(cfg.seed)));
    cfg.out_dir = ini.get_string("run", "out_dir", cfg.out_dir.string());

    cfg.validate();
    return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json synth{{"rows", cfg.synth_rows}, {"positive_prior", cfg.synth.positive_prior}};
    json rates = json::object();
    for (std::size_t j = 0; j < cfg.synth.features.size(); ++j)
        rates[cfg.synth.schema.feature_names[j]] = {cfg.synth.features[j].p_negative,
                                                    cfg.synth.features[j].p_positive};
    synth["rates"] = std::move(rates);

    json doc{
        {"data",
         {{"source", cfg.source == DataSource::csv ? "csv" : "synth"},
          {"csv_path", cfg.csv_path.string()},
          {"impute", cfg.impute}}},
        {"schema", detail::schema_to_json(cfg.schema)},
        {"synth", std::move(synth)},
        {"smote",
         {{"enabled", cfg.smote_enabled},
          {"k", cfg.smote.k},
          {"target_ratio", cfg.smote.target_ratio},
          {"placement",
           cfg.smote_placement == SmotePlacement::before_split ? "before_split" : "train_only"}}},
        {"split", {{"ratio", cfg.split_ratio}, {"stratified", cfg.stratified_split}}},
        {"models", cfg.enabled_models},
        {"decision_tree", detail::tree_config_to_json(cfg.decision_tree)},
        {"random_forest", detail::forest_config_to_json(cfg.random_forest)},
        {"gradient_boosting", detail::gb_config_to_json(cfg.gradient_boosting)},
        {"svm", detail::svm_config_to_json(cfg.svm)},
        {"mlp", detail::train_config_to_json(cfg.mlp)},
        {"seed", cfg.seed},
    };
    // per-model seeds are derived from the global seed inside the pipeline
    doc["random_forest"].erase("seed");
    doc["gradient_boosting"].erase("seed");
    doc["svm"].erase("seed");
    doc["mlp"].erase("seed");
    return doc.dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig& cfg) { return to_hex(fnv1a64(config_to_json(cfg))); }

namespace {

struct FittedClassifiers {
    TrainedModel train(const std::string& name, const ExperimentConfig& cfg, const Dataset& train_set) {
        TrainedModel out;
        out.schema = cfg.schema;
        if (name == "decision_tree") {
            out.classifier = TreeModel{
                fit_tree(train_set.features, train_set.labels, cfg.decision_tree),
                cfg.decision_tree};
        } else if (name == "random_forest") {
            ForestConfig fc = cfg.random_forest;
            fc.seed = Rng::derive(cfg.seed, 3);
            out.classifier = fit_forest(train_set, fc);
        } else if (name == "gradient_boosting") {
            GbConfig gc = cfg.gradient_boosting;
            gc.seed = Rng::derive(cfg.seed, 4);
            out.classifier = fit_gb(train_set, gc);
        } else if (name == "svm") {
            SvmConfig sc = cfg.svm;
            sc.seed = Rng::derive(cfg.seed, 5);
            out.classifier = fit_svm(train_set, sc);
        } else {
            TrainConfig mc = cfg.mlp;
            mc.seed = Rng::derive(cfg.seed, 6);
            out.classifier = MlpModel{train_mlp(train_set, mc).params, mc};
        }
        return out;
    }
};

double class_ratio(const std::array<std::int64_t, 2>& counts) {
    const auto lo = std::min(counts[0], counts[1]);
    const auto hi = std::max(counts[0], counts[1]);
    return hi == 0 ? 0.0 : static_cast<double>(lo) / static_cast<double>(hi);
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
    cfg.validate();

    RunReport report;
    report.config_json = config_to_json(cfg);
    report.config_hash = config_hash(cfg);

    const auto stage = [&](const std::string& name) {
        report.stages.push_back(name);
        if (log) *log << "[stage] " << name << '\n';
    };

    // load / synthesize
    Dataset full = [&] {
        if (cfg.source == DataSource::csv) {
            stage("load");
            RawTable table = run_stage("load", [&] { return load_csv(cfg.csv_path); });
            if (cfg.impute) {
                stage("impute");
                table = run_stage("impute", [&] { return impute_mean(table); });
            }
            stage("select_features");
            return run_stage("select_features", [&] { return select_features(table, cfg.schema); });
        }
        stage("load");
        return run_stage("load",
                         [&] { return synthesize(cfg.synth, cfg.synth_rows, Rng::derive(cfg.seed, 0)); });
    }();

    report.dataset.rows_total = full.n_rows();
    report.dataset.class_counts = full.class_counts();
    if (log)
        *log << "[data] " << full.n_rows() << " rows, class counts " << report.dataset.class_counts[0]
             << "/" << report.dataset.class_counts[1] << '\n';

    std::array<std::int64_t, 2> post_smote_counts{0, 0};
    bool smote_ran = false;

    if (cfg.smote_enabled && cfg.smote_placement == SmotePlacement::before_split) {
        stage("smote");
        SmoteConfig sc = cfg.smote;
        sc.seed = Rng::derive(cfg.seed, 2);
        full = run_stage("smote", [&] { return smote(full, sc); });
        post_smote_counts = full.class_counts();
        smote_ran = true;
    }

    stage("correlate");
    report.correlation = run_stage("correlate", [&] { return correlation_matrix(full); });

    stage("split");
    SplitPair parts = run_stage(
        "split", [&] { return split(full, cfg.split_ratio, Rng::derive(cfg.seed, 1), cfg.stratified_split); });
    report.dataset.train_rows_before_smote = parts.train.n_rows();

    if (cfg.smote_enabled && cfg.smote_placement == SmotePlacement::train_only) {
        stage("smote");
        SmoteConfig sc = cfg.smote;
        sc.seed = Rng::derive(cfg.seed, 2);
        parts.train = run_stage("smote", [&] { return smote(parts.train, sc); });
        post_smote_counts = parts.train.class_counts();
        smote_ran = true;
    }

    report.dataset.train_rows_after_smote = parts.train.n_rows();
    report.dataset.train_class_counts = parts.train.class_counts();
    report.dataset.test_rows = parts.test.n_rows();
    report.dataset.test_class_counts = parts.test.class_counts();
    report.dataset.post_smote_class_ratio =
        smote_ran ? class_ratio(post_smote_counts) : class_ratio(report.dataset.train_class_counts);
    if (log)
        *log << "[data] train " << parts.train.n_rows() << " rows (post-SMOTE ratio "
             << report.dataset.post_smote_class_ratio << "), test " << parts.test.n_rows()
             << " rows\n";

    FittedClassifiers fitter;
    for (const auto& name : kModelOrder) {
        if (!model_enabled(cfg, name)) continue;
        stage("train:" + name);
        const auto started = std::chrono::steady_clock::now();
        ModelOutcome outcome;
        outcome.name = name;
        outcome.model = run_stage("train:" + name, [&] { return fitter.train(name, cfg, parts.train); });
        outcome.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

        stage("evaluate:" + name);
        run_stage("evaluate:" + name, [&] {
            std::vector<int> predicted(parts.test.n_rows());
            for (std::size_t r = 0; r < parts.test.n_rows(); ++r)
                predicted[r] = predict_label(outcome.model, parts.test.features.row(r));
            outcome.cm = confusion(parts.test.labels, predicted);
            outcome.metrics = metrics(outcome.cm);
            return 0;
        });
        if (log)
            *log << "[model] " << name << ": accuracy " << format_percent(outcome.metrics.accuracy)
                 << "%, precision " << format_percent(outcome.metrics.precision) << "%, recall "
                 << format_percent(outcome.metrics.recall) << "%, f1 "
                 << format_percent(outcome.metrics.f1) << "% (" << outcome.wall_seconds << "s)\n";
        report.models.push_back(std::move(outcome));
    }

    stage("report");
    return report;
}

namespace {

json metrics_to_json(const MetricsReport& m) {
    return json{{"accuracy", m.accuracy},
                {"precision", m.precision},
                {"recall", m.recall},
                {"f1", m.f1},
                {"precision_degenerate", m.precision_degenerate},
                {"recall_degenerate", m.recall_degenerate},
                {"f1_degenerate", m.f1_degenerate}};
}

json confusion_to_json(const ConfusionMatrix& cm) {
    return json{{"tp", cm.tp}, {"fp", cm.fp}, {"fn", cm.fn}, {"tn", cm.tn}};
}

}  // namespace

std::string report_to_json(const RunReport& report) {
    json correlation_rows = json::array();
    for (std::size_t i = 0; i < report.correlation.values.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < report.correlation.values.cols(); ++j)
            row.push_back(report.correlation.values(i, j));
        correlation_rows.push_back(std::move(row));
    }

    json models = json::array();
    for (const auto& outcome : report.models)
        models.push_back(json{{"name", outcome.name},
                              {"confusion", confusion_to_json(outcome.cm)},
                              {"metrics", metrics_to_json(outcome.metrics)}});

    const json doc{
        {"config", json::parse(report.config_json)},
        {"config_hash", report.config_hash},
        {"dataset",
         {{"rows_total", report.dataset.rows_total},
          {"class_counts", report.dataset.class_counts},
          {"train_rows_before_smote", report.dataset.train_rows_before_smote},
          {"train_rows_after_smote", report.dataset.train_rows_after_smote},
          {"train_class_counts", report.dataset.train_class_counts},
          {"post_smote_class_ratio", report.dataset.post_smote_class_ratio},
          {"test_rows", report.dataset.test_rows},
          {"test_class_counts", report.dataset.test_class_counts}}},
        {"correlation", {{"labels", report.correlation.labels}, {"values", correlation_rows}}},
        {"models", std::move(models)},
        {"stages", report.stages},
    };
    return doc.dump(2) + "\n";
}

void write_report_files(const RunReport& report, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir / "models");
    {
        std::ofstream out(out_dir / "report.json");
        if (!out) throw DataError("cannot write '" + (out_dir / "report.json").string() + "'");
        out << report_to_json(report);
    }
    for (const auto& outcome : report.models)
        save_model(outcome.model, out_dir / "models" / (outcome.name + ".json"));
}

void emit_plot_data(const RunReport& report, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream out(out_dir / "metrics.csv");
        if (!out) throw DataError("cannot write '" + (out_dir / "metrics.csv").string() + "'");
        out << "model,accuracy,precision,recall,f1\n";
        for (const auto& outcome : report.models)
            out << outcome.name << ',' << format_percent(outcome.metrics.accuracy) << ','
                << format_percent(outcome.metrics.precision) << ','
                << format_percent(outcome.metrics.recall) << ','
                << format_percent(outcome.metrics.f1) << '\n';
    }
    write_correlation_csv(report.correlation, out_dir / "correlation.csv");
}

}  // namespace mortml
