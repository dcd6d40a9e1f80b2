#include "mortml/model_io.hpp"

#include <fstream>
#include <sstream>

#include "json_util.hpp"

namespace mortml {

using detail::json;

namespace {

constexpr const char* kFormatTag = "mortml-model";
constexpr int kFormatVersion = 1;

json mlp_params_to_json(const NetParams& p) {
    return json{{"shape",
                 {{"input", p.shape.input},
                  {"hidden1", p.shape.hidden1},
                  {"hidden2", p.shape.hidden2},
                  {"classes", p.shape.classes}}},
                {"w1", detail::matrix_to_json(p.w1)},
                {"b1", p.b1},
                {"w2", detail::matrix_to_json(p.w2)},
                {"b2", p.b2},
                {"w3", detail::matrix_to_json(p.w3)},
                {"b3", p.b3}};
}

NetParams mlp_params_from_json(const json& j) {
    NetParams p;
    const auto& shape = j.at("shape");
    p.shape.input = shape.at("input").get<std::size_t>();
    p.shape.hidden1 = shape.at("hidden1").get<std::size_t>();
    p.shape.hidden2 = shape.at("hidden2").get<std::size_t>();
    p.shape.classes = shape.at("classes").get<std::size_t>();
    p.w1 = detail::matrix_from_json(j.at("w1"));
    p.b1 = j.at("b1").get<std::vector<double>>();
    p.w2 = detail::matrix_from_json(j.at("w2"));
    p.b2 = j.at("b2").get<std::vector<double>>();
    p.w3 = detail::matrix_from_json(j.at("w3"));
    p.b3 = j.at("b3").get<std::vector<double>>();
    p.validate();
    return p;
}

json classifier_to_json(const TrainedModel& model) {
    return std::visit(
        [](const auto& impl) -> json {
            using T = std::decay_t<decltype(impl)>;
            if constexpr (std::is_same_v<T, TreeModel>) {
                return json{{"config", detail::tree_config_to_json(impl.config)},
                            {"tree", detail::tree_to_json(impl.tree)}};
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                json trees = json::array();
                for (const auto& tree : impl.trees) trees.push_back(detail::tree_to_json(tree));
                return json{{"config", detail::forest_config_to_json(impl.config)},
                            {"trees", std::move(trees)}};
            } else if constexpr (std::is_same_v<T, GbModel>) {
                json stages = json::array();
                for (const auto& tree : impl.stages) stages.push_back(detail::tree_to_json(tree));
                return json{{"f0", impl.f0},
                            {"learning_rate", impl.learning_rate},
                            {"stages", std::move(stages)}};
            } else if constexpr (std::is_same_v<T, SvmModel>) {
                return json{{"support_vectors", detail::matrix_to_json(impl.support_vectors)},
                            {"alphas", impl.alphas},
                            {"labels", impl.labels_pm},
                            {"bias", impl.bias},
                            {"kernel", detail::kernel_to_json(impl.kernel)}};
            } else {
                static_assert(std::is_same_v<T, MlpModel>);
                return json{{"config", detail::train_config_to_json(impl.config)},
                            {"params", mlp_params_to_json(impl.params)}};
            }
        },
        model.classifier);
}

SvmModel svm_from_json(const json& j) {
    SvmModel m;
    m.support_vectors = detail::matrix_from_json(j.at("support_vectors"));
    m.alphas = j.at("alphas").get<std::vector<double>>();
    m.labels_pm = j.at("labels").get<std::vector<int>>();
    m.bias = j.at("bias").get<double>();
    m.kernel = detail::kernel_from_json(j.at("kernel"));
    if (m.alphas.size() != m.support_vectors.rows() || m.labels_pm.size() != m.alphas.size())
        throw DataError("svm payload: vector/alpha/label count mismatch");
    for (const int y : m.labels_pm)
        if (y != 1 && y != -1) throw DataError("svm payload: label outside {-1,+1}");
    return m;
}

}  // namespace

std::string TrainedModel::kind() const {
    switch (classifier.index()) {
        case 0: return "decision_tree";
        case 1: return "random_forest";
        case 2: return "gradient_boosting";
        case 3: return "svm";
        default: return "mlp";
    }
}

Scored predict_scored(const TrainedModel& model, std::span<const double> x) {
    if (x.size() != model.schema.size())
        throw DataError("predict: expected " + std::to_string(model.schema.size()) +
                        " features, got " + std::to_string(x.size()));
    return std::visit(
        [&](const auto& impl) -> Scored {
            using T = std::decay_t<decltype(impl)>;
            if constexpr (std::is_same_v<T, TreeModel>) {
                const auto p = predict_tree(impl.tree, x);
                return {p.label, p.probabilities[1]};
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                const auto p = predict_forest(impl, x);
                return {p.label, p.vote_fractions[1]};
            } else if constexpr (std::is_same_v<T, GbModel>) {
                const auto p = predict_gb(impl, x);
                return {p.label, p.probability};
            } else if constexpr (std::is_same_v<T, SvmModel>) {
                const double score = decision_function(impl, x);
                return {score >= 0.0 ? 1 : 0, score};
            } else {
                Matrix row(1, x.size());
                std::copy(x.begin(), x.end(), row.row(0).begin());
                const auto p = predict_mlp(impl.params, row);
                return {p.labels[0], p.probabilities(0, 1)};
            }
        },
        model.classifier);
}

int predict_label(const TrainedModel& model, std::span<const double> x) {
    return predict_scored(model, x).label;
}

std::string model_to_json(const TrainedModel& model) {
    json envelope{{"format", kFormatTag},
                  {"version", kFormatVersion},
                  {"kind", model.kind()},
                  {"schema", detail::schema_to_json(model.schema)},
                  {"model", classifier_to_json(model)}};
    return envelope.dump(2) + "\n";
}

TrainedModel model_from_json(const std::string& text) {
    json envelope;
    try {
        envelope = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("model payload: ") + e.what());
    }
    try {
        if (envelope.at("format").get<std::string>() != kFormatTag)
            throw DataError("model payload: unknown format tag");
        const int version = envelope.at("version").get<int>();
        if (version != kFormatVersion)
            throw DataError("model payload: unsupported version " + std::to_string(version));

        TrainedModel model;
        model.schema = detail::schema_from_json(envelope.at("schema"));
        const auto kind = envelope.at("kind").get<std::string>();
        const auto& payload = envelope.at("model");
        if (kind == "decision_tree") {
            model.classifier = TreeModel{detail::tree_from_json(payload.at("tree")),
                                         detail::tree_config_from_json(payload.at("config"))};
        } else if (kind == "random_forest") {
            ForestModel m;
            m.config = detail::forest_config_from_json(payload.at("config"));
            for (const auto& t : payload.at("trees")) m.trees.push_back(detail::tree_from_json(t));
            if (m.trees.size() != static_cast<std::size_t>(m.config.n_trees))
                throw DataError("forest payload: tree count disagrees with config");
            model.classifier = std::move(m);
        } else if (kind == "gradient_boosting") {
            GbModel m;
            m.f0 = payload.at("f0").get<double>();
            m.learning_rate = payload.at("learning_rate").get<double>();
            for (const auto& t : payload.at("stages")) m.stages.push_back(detail::tree_from_json(t));
            model.classifier = std::move(m);
        } else if (kind == "svm") {
            model.classifier = svm_from_json(payload);
        } else if (kind == "mlp") {
            model.classifier = MlpModel{mlp_params_from_json(payload.at("params")),
                                        detail::train_config_from_json(payload.at("config"))};
        } else {
            throw DataError("model payload: unknown kind '" + kind + "'");
        }
        return model;
    } catch (const json::exception& e) {
        throw DataError(std::string("model payload: ") + e.what());
    }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << model_to_json(model);
    if (!out) throw DataError("failed writing '" + path.string() + "'");
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return model_from_json(buffer.str());
}

}  // namespace mortml
