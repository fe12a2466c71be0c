#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace fsp {

struct ConfusionMatrix {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;

    std::int64_t total() const { return tp + fp + fn + tn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

// Precision/recall/F-beta plus the degenerate-denominator flags. Zero
// denominators report 0 with a flag, never an error: the all-negative model
// must score F0.5 = 0.
struct MetricBundle {
    double precision = 0.0;
    double recall = 0.0;
    double f_beta = 0.0;
    double beta = 0.5;
    ConfusionMatrix confusion;
    bool no_positive_predictions = false;
    bool no_positive_labels = false;

    nlohmann::json to_json() const;
    static MetricBundle from_json(const nlohmann::json& j);
    bool operator==(const MetricBundle&) const = default;
};

struct CvSummary {
    std::vector<MetricBundle> folds;
    double mean_f_beta = 0.0;
    double std_f_beta = 0.0;  // sample (n-1) standard deviation

    nlohmann::json to_json() const;
    static CvSummary from_json(const nlohmann::json& j);
    bool operator==(const CvSummary&) const = default;
};

ConfusionMatrix confusion(const std::vector<int>& preds, const std::vector<int>& labels);

// (precision, recall) with the zero-denominator convention above.
std::pair<double, double> precision_recall(const ConfusionMatrix& cm);

// (1+b^2) P R / (b^2 P + R); 0 when the denominator is 0.
double f_beta(double precision, double recall, double beta);

MetricBundle metric_bundle(const ConfusionMatrix& cm, double beta = 0.5);

// Stratified holdout: per class, round(count * fraction) rows go to eval
// after a seeded in-class shuffle (round = half away from zero). Returns
// (train, eval) index sets, each ascending. Throws PipelineError when only
// one class is present. `degenerate` is set when some class contributes zero
// eval rows.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    const std::vector<int>& labels, double holdout_fraction, std::uint64_t seed,
    bool* degenerate = nullptr);

// Stratified k-fold partition; per-class fold counts differ by at most one.
// Requires k >= 2 and at least k members per class.
std::vector<std::vector<std::size_t>> stratified_kfold(const std::vector<int>& labels, int k,
                                                       std::uint64_t seed);

// Runs a caller-provided fold pipeline over a stratified k-fold of `labels`.
// The runner gets (train indices, eval indices, derived fold seed) and
// returns the fold's metrics. Folds may run in parallel; results are ordered
// by fold index, so parallel and serial runs agree exactly.
using FoldRunner = std::function<MetricBundle(const std::vector<std::size_t>&,
                                              const std::vector<std::size_t>&, std::uint64_t)>;

CvSummary cross_validate(const std::vector<int>& labels, int k, std::uint64_t seed,
                         const FoldRunner& runner, int n_threads = 1);

CvSummary summarize_folds(std::vector<MetricBundle> folds);

}  // namespace fsp
