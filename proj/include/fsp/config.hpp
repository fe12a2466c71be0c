#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fsp/boost.hpp"
#include "fsp/record.hpp"
#include "fsp/rules.hpp"

namespace fsp {

// Resolved pipeline configuration. Defaults reproduce the reference protocol:
// 80/20 stratified split, 5-fold CV, seed 42, the final hyperparameter table.
struct PipelineConfig {
    std::string dataset_path;
    DatasetFormat dataset_format = DatasetFormat::kCsv;
    RuleConfig rules;
    HyperParams hyperparams;
    double holdout_fraction = 0.2;
    int cv_folds = 5;
    std::uint64_t seed = 42;
    std::vector<std::string> variants = {"rule_only", "struct_v2"};
    std::string output_dir = "out";
    std::optional<std::string> side_features_path;
    std::optional<std::string> external_predictions_path;
    int threads = 1;

    void validate() const;
    nlohmann::json to_json() const;
    static PipelineConfig from_json(const nlohmann::json& j);
    static PipelineConfig load(const std::filesystem::path& path);
};

}  // namespace fsp
