#include "fsp/pipeline.hpp"

#include <algorithm>

#include "fsp/errors.hpp"
#include "fsp/rng.hpp"

namespace fsp {

namespace {

// The classifier may train on a column subset; its stump feature indices then
// refer to that subset, so prediction maps them back through this list.
std::vector<std::size_t> effective_columns(const FeatureMatrix& matrix,
                                           const PipelineSettings& settings) {
    if (!settings.classifier_columns.empty()) return settings.classifier_columns;
    std::vector<std::size_t> all(matrix.n_cols());
    for (std::size_t c = 0; c < all.size(); ++c) all[c] = c;
    return all;
}

}  // namespace

FittedPipeline fit_pipeline(const FeatureMatrix& matrix, const std::vector<std::size_t>& train_idx,
                            const PipelineSettings& settings, std::uint64_t seed) {
    FittedPipeline fitted;
    fitted.settings = settings;
    if (!settings.use_classifier) return fitted;

    FeatureMatrix train_matrix = matrix.select_rows(train_idx);
    if (!settings.classifier_columns.empty())
        train_matrix = train_matrix.select_columns(settings.classifier_columns);
    HyperParams params = settings.hyperparams;
    params.seed = seed;
    fitted.model = train(train_matrix, params);
    return fitted;
}

std::vector<int> predict_pipeline(const FittedPipeline& fitted, const FeatureMatrix& matrix,
                                  const std::vector<std::size_t>& rows) {
    const RuleFeatureIndex rule_ix = RuleFeatureIndex::from(matrix);
    const std::vector<std::size_t> cols = effective_columns(matrix, fitted.settings);

    std::vector<double> fv(cols.size());
    std::vector<int> preds;
    preds.reserve(rows.size());
    for (std::size_t r : rows) {
        auto row = matrix.row(r);
        if (auto override_pred = apply_rules(fitted.settings.rules, row, rule_ix)) {
            preds.push_back(*override_pred);
            continue;
        }
        if (!fitted.model) {
            preds.push_back(0);
            continue;
        }
        for (std::size_t k = 0; k < cols.size(); ++k) fv[k] = row[cols[k]];
        double prob = predict_proba(*fitted.model, fv);
        preds.push_back(classify(prob, fitted.model->decision_threshold));
    }
    return preds;
}

MetricBundle evaluate_split(const FeatureMatrix& matrix, const std::vector<std::size_t>& train_idx,
                            const std::vector<std::size_t>& eval_idx,
                            const PipelineSettings& settings, std::uint64_t seed) {
    if (!matrix.labels()) throw PipelineError("evaluation requires a labeled matrix");
    FittedPipeline fitted = fit_pipeline(matrix, train_idx, settings, seed);
    std::vector<int> preds = predict_pipeline(fitted, matrix, eval_idx);
    std::vector<int> truth;
    truth.reserve(eval_idx.size());
    for (std::size_t r : eval_idx) truth.push_back((*matrix.labels())[r]);
    return metric_bundle(confusion(preds, truth));
}

CvSummary cv_pipeline(const FeatureMatrix& matrix, int k, std::uint64_t seed,
                      const PipelineSettings& settings, int n_threads) {
    if (!matrix.labels()) throw PipelineError("cross-validation requires a labeled matrix");
    return cross_validate(
        *matrix.labels(), k, seed,
        [&](const std::vector<std::size_t>& train_idx, const std::vector<std::size_t>& eval_idx,
            std::uint64_t fold_seed) {
            return evaluate_split(matrix, train_idx, eval_idx, settings, fold_seed);
        },
        n_threads);
}

}  // namespace fsp
