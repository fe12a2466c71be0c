#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fsp/boost.hpp"
#include "fsp/features.hpp"
#include "fsp/metrics.hpp"
#include "fsp/pipeline.hpp"

namespace fsp {

inline constexpr std::size_t kSideFeatureCount = 9;

// Names of the prose-extracted side features; files with fewer columns are
// accepted and zero-padded with a warning.
const std::array<std::string, kSideFeatureCount>& side_feature_names();

struct SideFeatureTable {
    std::map<std::string, std::array<double, kSideFeatureCount>> rows;  // row_id -> values
    std::size_t warnings = 0;

    static SideFeatureTable load_csv(const std::filesystem::path& path);
};

// 28 + 9 fixed-layout merge; rows without side features are zero-filled.
// Side rows whose row_id is not in the matrix are ignored with a warning.
FeatureMatrix merge_side_features(const FeatureMatrix& matrix, const SideFeatureTable& side,
                                  double* coverage_out = nullptr, std::size_t* warnings_out = nullptr);

struct RedistributionReport {
    double side_share = 0.0;  // total gain share of side columns in the extended model
    std::map<std::string, double> base_shares;
    std::map<std::string, double> extended_shares;
    std::vector<std::string> extended_rank;          // names by descending extended share
    std::map<std::string, double> base_share_delta;  // extended - base, original 28 only

    nlohmann::json to_json() const;
    std::string to_markdown() const;
};

RedistributionReport importance_redistribution(const StumpEnsemble& base_model,
                                               const StumpEnsemble& extended_model);

struct VariantResult {
    std::string name;
    MetricBundle val;
    CvSummary cv;
    std::optional<double> delta_vs_baseline_pp;  // percentage points of val F0.5
    std::string baseline_name;

    nlohmann::json to_json() const;
    static VariantResult from_json(const nlohmann::json& j);
    bool operator==(const VariantResult&) const = default;
};

struct VariantContext {
    RuleConfig rules;
    HyperParams hyperparams;
    double holdout_fraction = 0.2;
    int cv_folds = 5;
    std::uint64_t seed = 42;
    int n_threads = 1;
    std::optional<SideFeatureTable> side_features;
    // row_id -> 0/1 external predictions for the zero-shot stub.
    std::optional<std::map<std::string, int>> external_predictions;
};

const std::vector<std::string>& known_variants();

// Runs one named pipeline variant over the labeled matrix: holdout metrics on
// the stratified split plus a k-fold CV summary. Unknown names throw
// InputError. Returns the trained holdout model when the variant has one.
VariantResult run_variant(const std::string& name, const FeatureMatrix& matrix,
                          const VariantContext& ctx,
                          std::optional<StumpEnsemble>* model_out = nullptr);

// Computes deltas of val F0.5 against the first result, in percentage points.
void apply_baseline_deltas(std::vector<VariantResult>& results);

struct PopulationStats {
    std::size_t positives = 0;
    double rule_capture_rate = 0.0;  // share of this population's positives with exit_count > 0
    double model_recall = 0.0;       // classifier-only recall, no rule overrides
};

struct TwoPopulationAudit {
    std::size_t total_positives = 0;
    PopulationStats exit_population;
    PopulationStats non_exit_population;
    double non_exit_positive_share = 0.0;
    std::string best_non_exit_feature;  // highest single-feature lift among non-exit rows
    double best_non_exit_lift = 0.0;

    nlohmann::json to_json() const;
    std::string to_markdown() const;
};

// Partitions positives by prior-exit status and measures how much of each
// population the rule layer and the classifier capture.
TwoPopulationAudit two_population_audit(const FeatureMatrix& matrix, const StumpEnsemble& model);

// Model-comparison report in the two mirrored formats. The JSON form parses
// back to equal VariantResults.
std::string emit_report_markdown(const std::vector<VariantResult>& results);
nlohmann::json emit_report_json(const std::vector<VariantResult>& results);
std::vector<VariantResult> parse_report_json(const nlohmann::json& j);

std::map<std::string, int> load_external_predictions(const std::filesystem::path& path);

}  // namespace fsp
