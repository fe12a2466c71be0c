#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fsp/features.hpp"

namespace fsp {

// Gradient-boosted decision stumps with second-order split gain, L1/L2
// regularization, gamma pruning, a hessian-mass minimum per child, class
// reweighting, and row/column subsampling. Split finding is exact: candidate
// thresholds are the midpoints between consecutive distinct sorted feature
// values, no histogram binning.

struct HyperParams {
    int n_estimators = 227;
    double learning_rate = 0.0674;
    int max_depth = 1;  // fixed; anything else is rejected
    double subsample = 0.949;
    double colsample_bytree = 0.413;
    double scale_pos_weight = 10.0;
    double min_child_weight = 14.0;
    double gamma = 4.19;
    double reg_alpha = 0.73;
    double reg_lambda = 15.0;
    double decision_threshold = 0.738;
    std::uint64_t seed = 42;

    // Throws InputError when a value is out of its legal range.
    void validate() const;

    bool operator==(const HyperParams&) const = default;
};

// JSON block used by both the model file and the pipeline config. Reading
// starts from the defaults, overrides the keys present, and rejects unknown
// keys with InputError.
nlohmann::json hyperparams_to_json(const HyperParams& params);
HyperParams hyperparams_from_json(const nlohmann::json& block);

struct Stump {
    std::size_t feature_index = 0;
    double split_threshold = 0.0;
    double left_value = 0.0;   // margin contribution when feature < threshold
    double right_value = 0.0;  // learning rate already folded in
    double gain = 0.0;         // realized split gain before the gamma penalty

    bool operator==(const Stump&) const = default;
};

struct StumpEnsemble {
    double base_margin = 0.0;
    double decision_threshold = 0.738;
    std::size_t n_features = 0;
    std::vector<std::string> feature_names;
    std::vector<Stump> stumps;
    HyperParams params;

    bool operator==(const StumpEnsemble&) const = default;
};

struct SplitCandidate {
    std::size_t feature_index = 0;
    double split_threshold = 0.0;
    double gain = 0.0;  // post-gamma selection gain
    double grad_left = 0.0, grad_right = 0.0;
    double hess_left = 0.0, hess_right = 0.0;
};

// Logistic gradient/hessian at one row. p = sigmoid(margin); the instance
// weight is scale_pos_weight for positives, 1 otherwise:
//   g = w * (p - label),  h = w * p * (1 - p).
std::pair<double, double> grad_hess(double margin, int label, double pos_weight);

// Second-order leaf optimum with L1 soft-thresholding:
//   -soft(G, reg_alpha) / (H + reg_lambda).
// The caller scales by learning_rate when folding into a stump.
double leaf_value(double grad_sum, double hess_sum, const HyperParams& params);

// Split gain with the same soft-thresholded score on both children,
//   0.5 * [score(GL,HL) + score(GR,HR) - score(GL+GR, HL+HR)] - gamma,
// where score(G,H) = soft(G, reg_alpha)^2 / (H + reg_lambda).
double split_gain(double grad_left, double hess_left, double grad_right, double hess_right,
                  const HyperParams& params);

// Presorted column view used by the exact split search. Built once per
// matrix; row order inside a column is ascending by feature value with ties
// kept in row order.
class SortedColumns {
public:
    explicit SortedColumns(const FeatureMatrix& matrix);
    const std::vector<std::uint32_t>& order(std::size_t col) const { return orders_[col]; }

private:
    std::vector<std::vector<std::uint32_t>> orders_;
};

// Best qualifying stump over the given rows/columns, or nullopt when no split
// has positive gain and min_child_weight hessian mass in both children.
// Ties break to the lower feature index, then the lower threshold.
std::optional<SplitCandidate> find_best_stump(std::span<const double> gradients,
                                              std::span<const double> hessians,
                                              const FeatureMatrix& matrix,
                                              const SortedColumns& sorted,
                                              const std::vector<char>& row_mask,
                                              const std::vector<std::size_t>& columns,
                                              const HyperParams& params);

// Boosts until n_estimators rounds or until no split qualifies. Requires both
// classes present; throws PipelineError("degenerate labels") otherwise.
StumpEnsemble train(const FeatureMatrix& matrix, const HyperParams& params);

double predict_margin(const StumpEnsemble& ensemble, std::span<const double> fv);
double predict_proba(const StumpEnsemble& ensemble, std::span<const double> fv);
std::vector<double> predict_proba(const StumpEnsemble& ensemble, const FeatureMatrix& matrix);

// 1 iff prob >= threshold (boundary inclusive).
int classify(double prob, double decision_threshold);

// Per-feature share of realized (pre-gamma) split gain, normalized to sum 1.
// Empty map for an empty ensemble.
std::map<std::string, double> feature_importance(const StumpEnsemble& ensemble);

// Versioned JSON model file; round-trips bit-exact.
void save_model(const StumpEnsemble& ensemble, const std::filesystem::path& path);
StumpEnsemble load_model(const std::filesystem::path& path);
std::string model_to_json_text(const StumpEnsemble& ensemble);
StumpEnsemble model_from_json_text(const std::string& text);

}  // namespace fsp
