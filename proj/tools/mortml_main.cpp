// mortml command-line front end: dataset synthesis, correlation export,
// model training/evaluation, batch scoring, and the full experiment runner.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mortml/experiment.hpp"
#include "mortml/table.hpp"

namespace fs = std::filesystem;
using namespace mortml;

namespace {

struct GlobalOptions {
    std::string config_path;
    std::int64_t seed = -1;  // -1: keep the config value
    std::string out_dir;
    bool smote_before_split = false;
};

ExperimentConfig effective_config(const GlobalOptions& opts) {
    ExperimentConfig cfg = opts.config_path.empty()
                               ? ExperimentConfig::defaults()
                               : ExperimentConfig::from_ini(IniFile::parse_file(opts.config_path));
    if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    if (opts.smote_before_split) cfg.smote_placement = SmotePlacement::before_split;
    return cfg;
}

Dataset load_input_dataset(const ExperimentConfig& cfg, const std::string& input_csv) {
    if (!input_csv.empty()) {
        RawTable table = load_csv(input_csv);
        if (cfg.impute) table = impute_mean(table);
        return select_features(table, cfg.schema);
    }
    if (cfg.source == DataSource::csv) {
        RawTable table = load_csv(cfg.csv_path);
        if (cfg.impute) table = impute_mean(table);
        return select_features(table, cfg.schema);
    }
    return synthesize(cfg.synth, cfg.synth_rows, Rng::derive(cfg.seed, 0));
}

int cmd_synth(const GlobalOptions& opts, const std::string& output, std::int64_t rows) {
    ExperimentConfig cfg = effective_config(opts);
    if (rows > 0) cfg.synth_rows = static_cast<std::size_t>(rows);
    const Dataset ds = synthesize(cfg.synth, cfg.synth_rows, Rng::derive(cfg.seed, 0));
    fs::path path = output.empty() ? cfg.out_dir / "dataset.csv" : fs::path(output);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_dataset_csv(ds, path);
    const auto counts = ds.class_counts();
    std::cout << "wrote " << ds.n_rows() << " rows (" << counts[0] << " negative, " << counts[1]
              << " positive) to " << path.string() << '\n';
    return 0;
}

int cmd_correlate(const GlobalOptions& opts, const std::string& input) {
    ExperimentConfig cfg = effective_config(opts);
    const Dataset ds = load_input_dataset(cfg, input);
    const CorrelationMatrix m = correlation_matrix(ds);
    fs::create_directories(cfg.out_dir);
    const fs::path path = cfg.out_dir / "correlation.csv";
    write_correlation_csv(m, path);
    std::cout << "wrote " << m.labels.size() << "x" << m.labels.size() << " correlation matrix to "
              << path.string() << '\n';
    const std::size_t label_row = m.labels.size() - 1;
    for (std::size_t j = 0; j + 1 < m.labels.size(); ++j)
        std::cout << "  corr(" << m.labels[label_row] << ", " << m.labels[j]
                  << ") = " << format_number(m.values(label_row, j)) << '\n';
    return 0;
}

int cmd_train(const GlobalOptions& opts, const std::string& model_name, const std::string& input) {
    ExperimentConfig cfg = effective_config(opts);
    if (std::find(kModelOrder.begin(), kModelOrder.end(), model_name) == kModelOrder.end())
        throw ConfigError("unknown model '" + model_name + "'");

    Dataset ds = load_input_dataset(cfg, input);
    if (cfg.smote_enabled) {
        SmoteConfig sc = cfg.smote;
        sc.seed = Rng::derive(cfg.seed, 2);
        ds = smote(ds, sc);
    }

    TrainedModel model;
    model.schema = cfg.schema;
    if (model_name == "decision_tree") {
        model.classifier =
            TreeModel{fit_tree(ds.features, ds.labels, cfg.decision_tree), cfg.decision_tree};
    } else if (model_name == "random_forest") {
        ForestConfig fc = cfg.random_forest;
        fc.seed = Rng::derive(cfg.seed, 3);
        model.classifier = fit_forest(ds, fc);
    } else if (model_name == "gradient_boosting") {
        GbConfig gc = cfg.gradient_boosting;
        gc.seed = Rng::derive(cfg.seed, 4);
        model.classifier = fit_gb(ds, gc);
    } else if (model_name == "svm") {
        SvmConfig sc = cfg.svm;
        sc.seed = Rng::derive(cfg.seed, 5);
        model.classifier = fit_svm(ds, sc);
    } else {
        TrainConfig mc = cfg.mlp;
        mc.seed = Rng::derive(cfg.seed, 6);
        model.classifier = MlpModel{train_mlp(ds, mc).params, mc};
    }

    fs::create_directories(cfg.out_dir);
    const fs::path path = cfg.out_dir / (model_name + ".model.json");
    save_model(model, path);
    std::cout << "trained " << model_name << " on " << ds.n_rows() << " rows, saved to "
              << path.string() << '\n';
    return 0;
}

int cmd_evaluate(const GlobalOptions& opts, const std::string& model_file,
                 const std::string& input) {
    ExperimentConfig cfg = effective_config(opts);
    const TrainedModel model = load_model(model_file);

    RawTable table = load_csv(input);
    if (cfg.impute) table = impute_mean(table);
    const Dataset ds = select_features(table, model.schema);

    std::vector<int> predicted(ds.n_rows());
    for (std::size_t r = 0; r < ds.n_rows(); ++r)
        predicted[r] = predict_label(model, ds.features.row(r));
    const ConfusionMatrix cm = confusion(ds.labels, predicted);
    const MetricsReport m = metrics(cm);

    std::cout << model.kind() << " on " << ds.n_rows() << " rows:\n"
              << "  confusion tp=" << cm.tp << " fp=" << cm.fp << " fn=" << cm.fn << " tn=" << cm.tn
              << '\n'
              << "  accuracy  " << format_percent(m.accuracy) << "%\n"
              << "  precision " << format_percent(m.precision) << "%"
              << (m.precision_degenerate ? " (degenerate)" : "") << '\n'
              << "  recall    " << format_percent(m.recall) << "%"
              << (m.recall_degenerate ? " (degenerate)" : "") << '\n'
              << "  f1        " << format_percent(m.f1) << "%"
              << (m.f1_degenerate ? " (degenerate)" : "") << '\n';
    return 0;
}

int cmd_predict(const GlobalOptions& opts, const std::string& model_file, const std::string& input,
                const std::string& values, const std::string& output) {
    ExperimentConfig cfg = effective_config(opts);
    const TrainedModel model = load_model(model_file);

    Matrix features;
    if (!values.empty()) {
        std::vector<double> row;
        std::stringstream ss(values);
        std::string token;
        while (std::getline(ss, token, ',')) {
            try {
                row.push_back(std::stod(token));
            } catch (const std::exception&) {
                throw DataError("--values: '" + token + "' is not numeric");
            }
        }
        if (row.size() != model.schema.size())
            throw DataError("--values: expected " + std::to_string(model.schema.size()) +
                            " features (" + std::to_string(row.size()) + " given)");
        features.append_row(row);
    } else if (!input.empty()) {
        RawTable table = load_csv(input);
        if (cfg.impute) table = impute_mean(table);
        features = select_feature_matrix(table, model.schema);
    } else {
        throw ConfigError("predict needs --input CSV or --values");
    }

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!output.empty()) {
        file.open(output);
        if (!file) throw DataError("cannot write '" + output + "'");
        out = &file;
    }
    *out << "row," << (model.kind() == "svm" ? "label,decision_value" : "label,probability") << '\n';
    for (std::size_t r = 0; r < features.rows(); ++r) {
        const Scored scored = predict_scored(model, features.row(r));
        *out << r << ',' << scored.label << ',' << format_number(scored.score) << '\n';
    }
    return 0;
}

int cmd_run(const GlobalOptions& opts) {
    const ExperimentConfig cfg = effective_config(opts);
    const RunReport report = run_experiment(cfg, &std::cerr);
    write_report_files(report, cfg.out_dir);
    emit_plot_data(report, cfg.out_dir);

    std::cout << "config " << report.config_hash << ", " << report.dataset.rows_total
              << " rows, post-SMOTE class ratio " << report.dataset.post_smote_class_ratio << "\n\n";
    std::cout << "model               accuracy  precision  recall   f1\n";
    for (const auto& outcome : report.models) {
        std::cout << outcome.name;
        for (std::size_t pad = outcome.name.size(); pad < 20; ++pad) std::cout << ' ';
        std::cout << format_percent(outcome.metrics.accuracy) << "     "
                  << format_percent(outcome.metrics.precision) << "     "
                  << format_percent(outcome.metrics.recall) << "    "
                  << format_percent(outcome.metrics.f1) << '\n';
    }
    std::cout << "\nreport:      " << (cfg.out_dir / "report.json").string() << '\n'
              << "plot data:   " << (cfg.out_dir / "metrics.csv").string() << ", "
              << (cfg.out_dir / "correlation.csv").string() << '\n'
              << "models:      " << (cfg.out_dir / "models").string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mortml - mortality-prediction toolkit (tabular classifiers from scratch)"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalOptions opts;
    app.add_option("--config", opts.config_path, "INI experiment config")->check(CLI::ExistingFile);
    app.add_option("--seed", opts.seed, "override the experiment seed");
    app.add_option("--out", opts.out_dir, "override the output directory");
    app.add_flag("--smote-before-split", opts.smote_before_split,
                 "apply SMOTE to the whole dataset before splitting");

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset CSV");
    std::string synth_output;
    std::int64_t synth_rows = 0;
    synth->add_option("--output", synth_output, "output CSV path (default <out>/dataset.csv)");
    synth->add_option("--rows", synth_rows, "row count override");

    auto* correlate = app.add_subcommand("correlate", "emit the correlation matrix CSV");
    std::string correlate_input;
    correlate->add_option("--input", correlate_input, "dataset CSV (default: config data source)");

    auto* train = app.add_subcommand("train", "train one model and save it");
    std::string train_model, train_input;
    train->add_option("--model", train_model, "decision_tree|random_forest|gradient_boosting|svm|mlp")
        ->required();
    train->add_option("--input", train_input, "training CSV (default: config data source)");

    auto* evaluate = app.add_subcommand("evaluate", "evaluate a saved model on a labeled CSV");
    std::string eval_model, eval_input;
    evaluate->add_option("--model-file", eval_model, "saved model JSON")->required();
    evaluate->add_option("--input", eval_input, "labeled test CSV")->required();

    auto* predict = app.add_subcommand("predict", "batch-score rows with a saved model");
    std::string pred_model, pred_input, pred_values, pred_output;
    predict->add_option("--model-file", pred_model, "saved model JSON")->required();
    predict->add_option("--input", pred_input, "feature CSV (label column optional)");
    predict->add_option("--values", pred_values, "single comma-separated feature row");
    predict->add_option("--output", pred_output, "write predictions here instead of stdout");

    auto* run = app.add_subcommand("run", "run the full experiment pipeline");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (synth->parsed()) return cmd_synth(opts, synth_output, synth_rows);
        if (correlate->parsed()) return cmd_correlate(opts, correlate_input);
        if (train->parsed()) return cmd_train(opts, train_model, train_input);
        if (evaluate->parsed()) return cmd_evaluate(opts, eval_model, eval_input);
        if (predict->parsed()) return cmd_predict(opts, pred_model, pred_input, pred_values, pred_output);
        if (run->parsed()) return cmd_run(opts);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const TrainError& e) {
        std::cerr << "training error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
