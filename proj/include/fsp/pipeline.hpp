#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fsp/boost.hpp"
#include "fsp/features.hpp"
#include "fsp/metrics.hpp"
#include "fsp/rules.hpp"

namespace fsp {

// One executable pipeline configuration: which feature columns the classifier
// sees, which rules run in front of it, and whether a classifier runs at all
// (rule_only disables it).
struct PipelineSettings {
    RuleConfig rules;
    HyperParams hyperparams;
    bool use_classifier = true;
    // Columns of the input matrix the classifier trains on; empty = all.
    std::vector<std::size_t> classifier_columns;
};

struct FittedPipeline {
    PipelineSettings settings;
    std::optional<StumpEnsemble> model;  // absent when the classifier is off
};

// Trains the classifier (when enabled) on the selected columns of the rows in
// train_idx. Rules are stateless, so "fitting" them is a no-op.
FittedPipeline fit_pipeline(const FeatureMatrix& matrix, const std::vector<std::size_t>& train_idx,
                            const PipelineSettings& settings, std::uint64_t seed);

// Rule overrides first, classifier second, all-negative when both are off.
std::vector<int> predict_pipeline(const FittedPipeline& fitted, const FeatureMatrix& matrix,
                                  const std::vector<std::size_t>& rows);

// Fit on train_idx, predict eval_idx, score against the matrix labels.
MetricBundle evaluate_split(const FeatureMatrix& matrix, const std::vector<std::size_t>& train_idx,
                            const std::vector<std::size_t>& eval_idx,
                            const PipelineSettings& settings, std::uint64_t seed);

// k-fold CV of one pipeline over the whole labeled matrix.
CvSummary cv_pipeline(const FeatureMatrix& matrix, int k, std::uint64_t seed,
                      const PipelineSettings& settings, int n_threads = 1);

}  // namespace fsp
