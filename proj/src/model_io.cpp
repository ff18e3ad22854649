#include "it2anfis/model_io.hpp"

#include <fstream>

namespace it2anfis {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key)) throw ModelFormatError(std::string("model file: missing field '") + key + "'");
    return obj.at(key);
}

std::vector<double> real_array(const json& obj, const char* key, std::size_t expected, const std::string& where) {
    const auto& arr = require(obj, key);
    if (!arr.is_array() || arr.size() != expected) {
        throw ModelFormatError("model file: " + where + " field '" + key + "' must hold " + std::to_string(expected) +
                               " values");
    }
    std::vector<double> out;
    for (const auto& v : arr) {
        if (!v.is_number()) throw ModelFormatError("model file: " + where + " field '" + key + "' is not numeric");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

json model_to_json(const Model& model) {
    const auto& rb = model.rules;
    json doc;
    doc["format_version"] = kModelFormatVersion;
    doc["mode"] = std::string(to_string(rb.mode));
    doc["q"] = rb.q;
    doc["F"] = rb.n_features();
    doc["R"] = rb.n_rules();
    if (model.seed) doc["seed"] = *model.seed;
    doc["feature_names"] = model.feature_names;
    doc["target_name"] = model.target_name;
    doc["feature_scalers"] = json::array();
    for (const auto& s : model.scaling.features) doc["feature_scalers"].push_back({{"min", s.min}, {"max", s.max}});
    doc["target_scaler"] = {{"mean", model.scaling.target.mean}, {"std", model.scaling.target.std}};
    doc["rules"] = json::array();
    for (const auto& rule : rb.rules) {
        json r;
        std::vector<double> c1, c2, sigma;
        for (const auto& a : rule.antecedents) {
            c1.push_back(a.c1);
            c2.push_back(a.c2);
            sigma.push_back(a.sigma);
        }
        r["c1"] = c1;
        r["c2"] = c2;
        r["sigma"] = sigma;
        r["w"] = rule.consequent.w;
        r["b"] = rule.consequent.b;
        doc["rules"].push_back(std::move(r));
    }
    return doc;
}

Model model_from_json(const json& doc) {
    const auto& version = require(doc, "format_version");
    if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion) {
        throw ModelFormatError("model file: unsupported format_version " + version.dump() + " (expected " +
                               std::to_string(kModelFormatVersion) + ")");
    }
    Model model;
    try {
        model.rules.mode = parse_mode(require(doc, "mode").get<std::string>());
        model.rules.q = require(doc, "q").get<double>();
        const auto F = require(doc, "F").get<std::size_t>();
        const auto R = require(doc, "R").get<std::size_t>();
        if (doc.contains("seed")) model.seed = doc.at("seed").get<std::uint64_t>();
        if (doc.contains("feature_names")) model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
        if (doc.contains("target_name")) model.target_name = doc.at("target_name").get<std::string>();
        if (!model.feature_names.empty() && model.feature_names.size() != F) {
            throw ModelFormatError("model file: feature_names must hold " + std::to_string(F) + " names");
        }

        const auto& scalers = require(doc, "feature_scalers");
        if (!scalers.is_array() || scalers.size() != F) {
            throw ModelFormatError("model file: feature_scalers must hold " + std::to_string(F) + " entries");
        }
        for (const auto& s : scalers) {
            model.scaling.features.push_back({require(s, "min").get<double>(), require(s, "max").get<double>()});
        }
        const auto& ts = require(doc, "target_scaler");
        model.scaling.target = {require(ts, "mean").get<double>(), require(ts, "std").get<double>()};

        const auto& rules = require(doc, "rules");
        if (!rules.is_array() || rules.size() != R) {
            throw ModelFormatError("model file: header declares R=" + std::to_string(R) + " but " +
                                   std::to_string(rules.is_array() ? rules.size() : 0) + " rule blocks are present");
        }
        for (std::size_t j = 0; j < R; ++j) {
            const std::string where = "rule " + std::to_string(j);
            const auto c1 = real_array(rules[j], "c1", F, where);
            const auto c2 = real_array(rules[j], "c2", F, where);
            const auto sigma = real_array(rules[j], "sigma", F, where);
            Rule rule;
            for (std::size_t f = 0; f < F; ++f) rule.antecedents.push_back({c1[f], c2[f], sigma[f]});
            rule.consequent.w = real_array(rules[j], "w", F, where);
            rule.consequent.b = require(rules[j], "b").get<double>();
            model.rules.rules.push_back(std::move(rule));
        }
    } catch (const json::exception& e) {
        throw ModelFormatError(std::string("model file: ") + e.what());
    } catch (const ModelError& e) {
        throw ModelFormatError(std::string("model file: ") + e.what());
    }
    try {
        validate(model.rules);
    } catch (const ModelError& e) {
        throw ModelFormatError(std::string("model file: ") + e.what());
    }
    if (!(model.scaling.target.std > 0.0)) throw ModelFormatError("model file: target_scaler.std must be positive");
    return model;
}

void save_model(const Model& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ModelFormatError("cannot write model file '" + path.string() + "'");
    out << model_to_json(model).dump(2) << '\n';
}

Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ModelFormatError("cannot open model file '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ModelFormatError("model file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return model_from_json(doc);
}

}  // namespace it2anfis
