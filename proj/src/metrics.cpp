#include "fsp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "fsp/errors.hpp"
#include "fsp/parallel.hpp"
#include "fsp/rng.hpp"

namespace fsp {

ConfusionMatrix confusion(const std::vector<int>& preds, const std::vector<int>& labels) {
    if (preds.size() != labels.size())
        throw PipelineError("confusion: prediction/label length mismatch");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] == 1)
            (labels[i] == 1 ? cm.tp : cm.fp) += 1;
        else
            (labels[i] == 1 ? cm.fn : cm.tn) += 1;
    }
    return cm;
}

std::pair<double, double> precision_recall(const ConfusionMatrix& cm) {
    double precision =
        cm.tp + cm.fp > 0 ? static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp) : 0.0;
    double recall =
        cm.tp + cm.fn > 0 ? static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn) : 0.0;
    return {precision, recall};
}

double f_beta(double precision, double recall, double beta) {
    double b2 = beta * beta;
    double denom = b2 * precision + recall;
    if (denom <= 0.0) return 0.0;
    return (1.0 + b2) * precision * recall / denom;
}

MetricBundle metric_bundle(const ConfusionMatrix& cm, double beta) {
    MetricBundle out;
    out.beta = beta;
    out.confusion = cm;
    std::tie(out.precision, out.recall) = precision_recall(cm);
    out.f_beta = f_beta(out.precision, out.recall, beta);
    out.no_positive_predictions = cm.tp + cm.fp == 0;
    out.no_positive_labels = cm.tp + cm.fn == 0;
    return out;
}

nlohmann::json MetricBundle::to_json() const {
    return nlohmann::json{
        {"precision", precision},
        {"recall", recall},
        {"f_beta", f_beta},
        {"beta", beta},
        {"confusion",
         {{"tp", confusion.tp}, {"fp", confusion.fp}, {"fn", confusion.fn}, {"tn", confusion.tn}}},
        {"no_positive_predictions", no_positive_predictions},
        {"no_positive_labels", no_positive_labels}};
}

MetricBundle MetricBundle::from_json(const nlohmann::json& j) {
    MetricBundle out;
    try {
        out.precision = j.at("precision").get<double>();
        out.recall = j.at("recall").get<double>();
        out.f_beta = j.at("f_beta").get<double>();
        out.beta = j.at("beta").get<double>();
        const auto& cm = j.at("confusion");
        out.confusion = {cm.at("tp").get<std::int64_t>(), cm.at("fp").get<std::int64_t>(),
                         cm.at("fn").get<std::int64_t>(), cm.at("tn").get<std::int64_t>()};
        out.no_positive_predictions = j.at("no_positive_predictions").get<bool>();
        out.no_positive_labels = j.at("no_positive_labels").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("bad metrics JSON: ") + e.what());
    }
    return out;
}

nlohmann::json CvSummary::to_json() const {
    nlohmann::json out;
    out["folds"] = nlohmann::json::array();
    for (const MetricBundle& fold : folds) out["folds"].push_back(fold.to_json());
    out["mean_f_beta"] = mean_f_beta;
    out["std_f_beta"] = std_f_beta;
    return out;
}

CvSummary CvSummary::from_json(const nlohmann::json& j) {
    CvSummary out;
    try {
        for (const auto& fold : j.at("folds")) out.folds.push_back(MetricBundle::from_json(fold));
        out.mean_f_beta = j.at("mean_f_beta").get<double>();
        out.std_f_beta = j.at("std_f_beta").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("bad CV summary JSON: ") + e.what());
    }
    return out;
}

namespace {

// Indices grouped per class, classes in ascending label order.
std::map<int, std::vector<std::size_t>> by_class(const std::vector<int>& labels) {
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
    return groups;
}

}  // namespace

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    const std::vector<int>& labels, double holdout_fraction, std::uint64_t seed,
    bool* degenerate) {
    if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0))
        throw InputError("holdout_fraction must be in (0,1)");
    auto groups = by_class(labels);
    if (groups.size() < 2) throw PipelineError("stratified split requires both classes");

    if (degenerate) *degenerate = false;
    std::vector<std::size_t> train;
    std::vector<std::size_t> eval;
    SplitMix64 rng(seed);
    for (auto& [label, members] : groups) {
        rng.shuffle(members);
        auto eval_k = static_cast<std::size_t>(
            std::llround(holdout_fraction * static_cast<double>(members.size())));
        eval_k = std::min(eval_k, members.size());
        if (degenerate && (eval_k == 0 || eval_k == members.size())) *degenerate = true;
        eval.insert(eval.end(), members.begin(), members.begin() + static_cast<long>(eval_k));
        train.insert(train.end(), members.begin() + static_cast<long>(eval_k), members.end());
    }
    std::sort(train.begin(), train.end());
    std::sort(eval.begin(), eval.end());
    return {std::move(train), std::move(eval)};
}

std::vector<std::vector<std::size_t>> stratified_kfold(const std::vector<int>& labels, int k,
                                                       std::uint64_t seed) {
    if (k < 2) throw InputError("k-fold requires k >= 2");
    auto groups = by_class(labels);
    if (groups.size() < 2) throw PipelineError("stratified k-fold requires both classes");
    for (const auto& [label, members] : groups)
        if (members.size() < static_cast<std::size_t>(k))
            throw PipelineError("stratified k-fold: class " + std::to_string(label) +
                                " has fewer than k members");

    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    SplitMix64 rng(seed);
    for (auto& [label, members] : groups) {
        rng.shuffle(members);
        for (std::size_t i = 0; i < members.size(); ++i)
            folds[i % static_cast<std::size_t>(k)].push_back(members[i]);
    }
    for (auto& fold : folds) std::sort(fold.begin(), fold.end());
    return folds;
}

CvSummary cross_validate(const std::vector<int>& labels, int k, std::uint64_t seed,
                         const FoldRunner& runner, int n_threads) {
    const auto folds = stratified_kfold(labels, k, derive_seed(seed, rng_stream::kKfold));
    const std::uint64_t fold_base = derive_seed(seed, rng_stream::kCvFold);

    std::vector<MetricBundle> results = parallel_map<MetricBundle>(
        folds.size(), n_threads, [&](std::size_t i) {
            std::vector<std::size_t> train;
            for (std::size_t j = 0; j < folds.size(); ++j)
                if (j != i) train.insert(train.end(), folds[j].begin(), folds[j].end());
            std::sort(train.begin(), train.end());
            return runner(train, folds[i], derive_seed(fold_base, i));
        });
    return summarize_folds(std::move(results));
}

CvSummary summarize_folds(std::vector<MetricBundle> folds) {
    CvSummary out;
    out.folds = std::move(folds);
    if (out.folds.empty()) return out;
    double sum = 0.0;
    for (const MetricBundle& fold : out.folds) sum += fold.f_beta;
    out.mean_f_beta = sum / static_cast<double>(out.folds.size());
    if (out.folds.size() > 1) {
        double ss = 0.0;
        for (const MetricBundle& fold : out.folds) {
            double d = fold.f_beta - out.mean_f_beta;
            ss += d * d;
        }
        out.std_f_beta = std::sqrt(ss / static_cast<double>(out.folds.size() - 1));
    }
    return out;
}

}  // namespace fsp
