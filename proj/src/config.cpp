#include "fsp/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fsp/errors.hpp"
#include "fsp/harness.hpp"

namespace fsp {

void PipelineConfig::validate() const {
    if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0))
        throw InputError("holdout_fraction must be in (0,1)");
    if (cv_folds < 2) throw InputError("cv_folds must be at least 2");
    if (threads < 1) throw InputError("threads must be at least 1");
    if (variants.empty()) throw InputError("variant list must not be empty");
    for (const std::string& name : variants) {
        const auto& known = known_variants();
        if (std::find(known.begin(), known.end(), name) == known.end())
            throw InputError("unknown variant: " + name);
    }
    hyperparams.validate();
}

nlohmann::json PipelineConfig::to_json() const {
    nlohmann::json out;
    out["dataset_path"] = dataset_path;
    out["dataset_format"] = dataset_format == DatasetFormat::kCsv ? "csv" : "jsonl";
    out["rules"] = {{"rule1_prior_exit", rules.rule1_prior_exit},
                    {"rule2_elite_stem_founder", rules.rule2_elite_stem_founder},
                    {"rule3_clevel_serial", rules.rule3_clevel_serial}};
    out["hyperparams"] = hyperparams_to_json(hyperparams);
    out["holdout_fraction"] = holdout_fraction;
    out["cv_folds"] = cv_folds;
    out["seed"] = seed;
    out["variants"] = variants;
    out["output_dir"] = output_dir;
    out["side_features_path"] =
        side_features_path ? nlohmann::json(*side_features_path) : nlohmann::json(nullptr);
    out["external_predictions_path"] = external_predictions_path
                                           ? nlohmann::json(*external_predictions_path)
                                           : nlohmann::json(nullptr);
    out["threads"] = threads;
    return out;
}

namespace {

RuleConfig rules_from_json(const nlohmann::json& block) {
    if (!block.is_object()) throw InputError("rules block must be a JSON object");
    RuleConfig rules;
    for (const auto& [key, value] : block.items()) {
        try {
            if (key == "rule1_prior_exit") rules.rule1_prior_exit = value.get<bool>();
            else if (key == "rule2_elite_stem_founder")
                rules.rule2_elite_stem_founder = value.get<bool>();
            else if (key == "rule3_clevel_serial") rules.rule3_clevel_serial = value.get<bool>();
            else throw InputError("unknown rule key: " + key);
        } catch (const nlohmann::json::exception&) {
            throw InputError("rule flags must be booleans: " + key);
        }
    }
    return rules;
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("config must be a JSON object");
    PipelineConfig config;
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "dataset_path") config.dataset_path = value.get<std::string>();
            else if (key == "dataset_format")
                config.dataset_format = dataset_format_from_name(value.get<std::string>());
            else if (key == "rules") config.rules = rules_from_json(value);
            else if (key == "hyperparams") config.hyperparams = hyperparams_from_json(value);
            else if (key == "holdout_fraction") config.holdout_fraction = value.get<double>();
            else if (key == "cv_folds") config.cv_folds = value.get<int>();
            else if (key == "seed") config.seed = value.get<std::uint64_t>();
            else if (key == "variants") config.variants = value.get<std::vector<std::string>>();
            else if (key == "output_dir") config.output_dir = value.get<std::string>();
            else if (key == "side_features_path") {
                if (!value.is_null()) config.side_features_path = value.get<std::string>();
            } else if (key == "external_predictions_path") {
                if (!value.is_null()) config.external_predictions_path = value.get<std::string>();
            } else if (key == "threads") config.threads = value.get<int>();
            else throw InputError("unknown config key: " + key);
        } catch (const nlohmann::json::exception&) {
            throw InputError("bad value for config key: " + key);
        }
    }
    config.validate();
    return config;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("config not found: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    nlohmann::json j = nlohmann::json::parse(buffer.str(), nullptr, false);
    if (j.is_discarded()) throw InputError("config is not valid JSON: " + path.string());
    return from_json(j);
}

}  // namespace fsp
