#include "fsp/boost.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fsp/errors.hpp"
#include "fsp/rng.hpp"

namespace fsp {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double soft_threshold(double g, double alpha) {
    if (g > alpha) return g - alpha;
    if (g < -alpha) return g + alpha;
    return 0.0;
}

double score(double g, double h, const HyperParams& params) {
    double s = soft_threshold(g, params.reg_alpha);
    return s * s / (h + params.reg_lambda);
}

}  // namespace

void HyperParams::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw InputError(std::string("invalid hyperparameter: ") + what);
    };
    require(n_estimators > 0, "n_estimators must be positive");
    require(learning_rate > 0.0 && std::isfinite(learning_rate), "learning_rate must be positive");
    require(max_depth == 1, "max_depth is fixed at 1");
    require(subsample > 0.0 && subsample <= 1.0, "subsample must be in (0,1]");
    require(colsample_bytree > 0.0 && colsample_bytree <= 1.0, "colsample_bytree must be in (0,1]");
    require(scale_pos_weight > 0.0 && std::isfinite(scale_pos_weight),
            "scale_pos_weight must be positive");
    require(min_child_weight >= 0.0 && std::isfinite(min_child_weight),
            "min_child_weight must be non-negative");
    require(gamma >= 0.0 && std::isfinite(gamma), "gamma must be non-negative");
    require(reg_alpha >= 0.0 && std::isfinite(reg_alpha), "reg_alpha must be non-negative");
    require(reg_lambda >= 0.0 && std::isfinite(reg_lambda), "reg_lambda must be non-negative");
    require(decision_threshold > 0.0 && decision_threshold <= 1.0,
            "decision_threshold must be in (0,1]");
}

nlohmann::json hyperparams_to_json(const HyperParams& params) {
    return nlohmann::json{{"n_estimators", params.n_estimators},
                          {"learning_rate", params.learning_rate},
                          {"max_depth", params.max_depth},
                          {"subsample", params.subsample},
                          {"colsample_bytree", params.colsample_bytree},
                          {"scale_pos_weight", params.scale_pos_weight},
                          {"min_child_weight", params.min_child_weight},
                          {"gamma", params.gamma},
                          {"reg_alpha", params.reg_alpha},
                          {"reg_lambda", params.reg_lambda},
                          {"decision_threshold", params.decision_threshold},
                          {"seed", params.seed}};
}

HyperParams hyperparams_from_json(const nlohmann::json& block) {
    if (!block.is_object()) throw InputError("hyperparams block must be a JSON object");
    HyperParams params;
    for (const auto& [key, value] : block.items()) {
        try {
            if (key == "n_estimators") params.n_estimators = value.get<int>();
            else if (key == "learning_rate") params.learning_rate = value.get<double>();
            else if (key == "max_depth") params.max_depth = value.get<int>();
            else if (key == "subsample") params.subsample = value.get<double>();
            else if (key == "colsample_bytree") params.colsample_bytree = value.get<double>();
            else if (key == "scale_pos_weight") params.scale_pos_weight = value.get<double>();
            else if (key == "min_child_weight") params.min_child_weight = value.get<double>();
            else if (key == "gamma") params.gamma = value.get<double>();
            else if (key == "reg_alpha") params.reg_alpha = value.get<double>();
            else if (key == "reg_lambda") params.reg_lambda = value.get<double>();
            else if (key == "decision_threshold") params.decision_threshold = value.get<double>();
            else if (key == "seed") params.seed = value.get<std::uint64_t>();
            else throw InputError("unknown hyperparameter: " + key);
        } catch (const nlohmann::json::exception&) {
            throw InputError("bad value for hyperparameter: " + key);
        }
    }
    return params;
}

std::pair<double, double> grad_hess(double margin, int label, double pos_weight) {
    double p = sigmoid(margin);
    double w = label == 1 ? pos_weight : 1.0;
    return {w * (p - label), w * p * (1.0 - p)};
}

double leaf_value(double grad_sum, double hess_sum, const HyperParams& params) {
    return -soft_threshold(grad_sum, params.reg_alpha) / (hess_sum + params.reg_lambda);
}

double split_gain(double grad_left, double hess_left, double grad_right, double hess_right,
                  const HyperParams& params) {
    double parent = score(grad_left + grad_right, hess_left + hess_right, params);
    return 0.5 * (score(grad_left, hess_left, params) + score(grad_right, hess_right, params) -
                  parent) -
           params.gamma;
}

SortedColumns::SortedColumns(const FeatureMatrix& matrix) {
    orders_.resize(matrix.n_cols());
    for (std::size_t c = 0; c < matrix.n_cols(); ++c) {
        auto& order = orders_[c];
        order.resize(matrix.n_rows());
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return matrix.at(a, c) < matrix.at(b, c);
        });
    }
}

std::optional<SplitCandidate> find_best_stump(std::span<const double> gradients,
                                              std::span<const double> hessians,
                                              const FeatureMatrix& matrix,
                                              const SortedColumns& sorted,
                                              const std::vector<char>& row_mask,
                                              const std::vector<std::size_t>& columns,
                                              const HyperParams& params) {
    double grad_total = 0.0;
    double hess_total = 0.0;
    std::size_t n_masked = 0;
    for (std::size_t r = 0; r < row_mask.size(); ++r) {
        if (!row_mask[r]) continue;
        grad_total += gradients[r];
        hess_total += hessians[r];
        ++n_masked;
    }
    if (n_masked < 2) return std::nullopt;
    if (hess_total < 2.0 * params.min_child_weight) return std::nullopt;

    std::optional<SplitCandidate> best;
    for (std::size_t col : columns) {
        double grad_left = 0.0;
        double hess_left = 0.0;
        bool have_prev = false;
        double prev_value = 0.0;
        for (std::uint32_t r : sorted.order(col)) {
            if (!row_mask[r]) continue;
            double value = matrix.at(r, col);
            if (have_prev && value > prev_value) {
                double threshold = (prev_value + value) / 2.0;
                // Keep the evaluated partition and the `feature < threshold`
                // rule in exact agreement even when the midpoint rounds onto
                // the lower value.
                if (threshold <= prev_value) threshold = value;
                double grad_right = grad_total - grad_left;
                double hess_right = hess_total - hess_left;
                if (std::min(hess_left, hess_right) >= params.min_child_weight) {
                    double gain = split_gain(grad_left, hess_left, grad_right, hess_right, params);
                    if (gain > 0.0) {
                        bool take = !best || gain > best->gain ||
                                    (gain == best->gain &&
                                     (col < best->feature_index ||
                                      (col == best->feature_index && threshold < best->split_threshold)));
                        if (take)
                            best = SplitCandidate{col,       threshold, gain,
                                                  grad_left, grad_right, hess_left, hess_right};
                    }
                }
            }
            grad_left += gradients[r];
            hess_left += hessians[r];
            prev_value = value;
            have_prev = true;
        }
    }
    return best;
}

StumpEnsemble train(const FeatureMatrix& matrix, const HyperParams& params) {
    params.validate();
    if (matrix.n_rows() == 0) throw PipelineError("cannot train on an empty matrix");
    if (!matrix.labels()) throw PipelineError("training requires labels");
    const std::vector<int>& labels = *matrix.labels();

    bool has_pos = false;
    bool has_neg = false;
    for (int label : labels) (label == 1 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) throw PipelineError("degenerate labels: training needs both classes");

    const std::size_t n = matrix.n_rows();
    const std::size_t n_cols = matrix.n_cols();
    const std::size_t k_rows = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(params.subsample * static_cast<double>(n))), 1, n);
    const std::size_t k_cols = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(params.colsample_bytree * static_cast<double>(n_cols))),
        1, n_cols);

    StumpEnsemble ensemble;
    ensemble.base_margin = 0.0;
    ensemble.decision_threshold = params.decision_threshold;
    ensemble.n_features = n_cols;
    ensemble.feature_names = matrix.names();
    ensemble.params = params;

    const SortedColumns sorted(matrix);
    SplitMix64 rng(derive_seed(params.seed, rng_stream::kTrain));

    std::vector<double> margins(n, ensemble.base_margin);
    std::vector<double> gradients(n);
    std::vector<double> hessians(n);
    std::vector<char> row_mask(n);

    for (int round = 0; round < params.n_estimators; ++round) {
        // Per-round draws, rows first then columns; both ascending.
        std::vector<std::size_t> rows = rng.sample_indices(n, k_rows);
        std::vector<std::size_t> cols = rng.sample_indices(n_cols, k_cols);

        std::fill(row_mask.begin(), row_mask.end(), 0);
        for (std::size_t r : rows) row_mask[r] = 1;
        for (std::size_t r = 0; r < n; ++r)
            std::tie(gradients[r], hessians[r]) =
                grad_hess(margins[r], labels[r], params.scale_pos_weight);

        auto cand = find_best_stump(gradients, hessians, matrix, sorted, row_mask, cols, params);
        if (!cand) break;

        Stump stump;
        stump.feature_index = cand->feature_index;
        stump.split_threshold = cand->split_threshold;
        stump.left_value = params.learning_rate * leaf_value(cand->grad_left, cand->hess_left, params);
        stump.right_value =
            params.learning_rate * leaf_value(cand->grad_right, cand->hess_right, params);
        stump.gain = cand->gain + params.gamma;  // importance uses the pre-gamma gain
        ensemble.stumps.push_back(stump);

        for (std::size_t r = 0; r < n; ++r)
            margins[r] += matrix.at(r, stump.feature_index) < stump.split_threshold
                              ? stump.left_value
                              : stump.right_value;
    }
    return ensemble;
}

double predict_margin(const StumpEnsemble& ensemble, std::span<const double> fv) {
    if (fv.size() < ensemble.n_features)
        throw PipelineError("feature vector narrower than the model");
    double margin = ensemble.base_margin;
    for (const Stump& stump : ensemble.stumps)
        margin += fv[stump.feature_index] < stump.split_threshold ? stump.left_value
                                                                  : stump.right_value;
    return margin;
}

double predict_proba(const StumpEnsemble& ensemble, std::span<const double> fv) {
    return sigmoid(predict_margin(ensemble, fv));
}

std::vector<double> predict_proba(const StumpEnsemble& ensemble, const FeatureMatrix& matrix) {
    std::vector<double> out(matrix.n_rows());
    for (std::size_t r = 0; r < matrix.n_rows(); ++r) out[r] = predict_proba(ensemble, matrix.row(r));
    return out;
}

int classify(double prob, double decision_threshold) {
    return prob >= decision_threshold ? 1 : 0;
}

std::map<std::string, double> feature_importance(const StumpEnsemble& ensemble) {
    std::map<std::string, double> shares;
    if (ensemble.stumps.empty()) return shares;
    double total = 0.0;
    for (const Stump& stump : ensemble.stumps) {
        shares[ensemble.feature_names.at(stump.feature_index)] += stump.gain;
        total += stump.gain;
    }
    if (total > 0.0)
        for (auto& [name, share] : shares) share /= total;
    return shares;
}

std::string model_to_json_text(const StumpEnsemble& ensemble) {
    nlohmann::json doc;
    doc["format_version"] = 1;
    doc["hyperparams"] = hyperparams_to_json(ensemble.params);
    doc["base_margin"] = ensemble.base_margin;
    doc["decision_threshold"] = ensemble.decision_threshold;
    doc["n_features"] = ensemble.n_features;
    doc["feature_names"] = ensemble.feature_names;
    doc["stumps"] = nlohmann::json::array();
    for (const Stump& stump : ensemble.stumps) {
        doc["stumps"].push_back({{"feature", stump.feature_index},
                                 {"name", ensemble.feature_names.at(stump.feature_index)},
                                 {"threshold", stump.split_threshold},
                                 {"left", stump.left_value},
                                 {"right", stump.right_value},
                                 {"gain", stump.gain}});
    }
    return doc.dump(2) + "\n";
}

StumpEnsemble model_from_json_text(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw ModelFormatError("corrupt model file");
    try {
        if (!doc.contains("format_version") || !doc["format_version"].is_number_integer())
            throw ModelFormatError("model file without format_version");
        if (doc["format_version"].get<int>() != 1)
            throw ModelFormatError("unsupported model version: " +
                                   doc["format_version"].dump());

        StumpEnsemble ensemble;
        ensemble.params = hyperparams_from_json(doc.at("hyperparams"));
        ensemble.base_margin = doc.at("base_margin").get<double>();
        ensemble.decision_threshold = doc.at("decision_threshold").get<double>();
        ensemble.n_features = doc.at("n_features").get<std::size_t>();
        ensemble.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
        if (ensemble.feature_names.size() != ensemble.n_features)
            throw ModelFormatError("model feature_names length mismatch");
        for (const auto& entry : doc.at("stumps")) {
            Stump stump;
            stump.feature_index = entry.at("feature").get<std::size_t>();
            if (stump.feature_index >= ensemble.n_features)
                throw ModelFormatError("model stump feature index out of range");
            stump.split_threshold = entry.at("threshold").get<double>();
            stump.left_value = entry.at("left").get<double>();
            stump.right_value = entry.at("right").get<double>();
            stump.gain = entry.at("gain").get<double>();
            ensemble.stumps.push_back(stump);
        }
        return ensemble;
    } catch (const nlohmann::json::exception& e) {
        throw ModelFormatError(std::string("corrupt model file: ") + e.what());
    }
}

void save_model(const StumpEnsemble& ensemble, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw PipelineError("cannot write model file: " + path.string());
    out << model_to_json_text(ensemble);
    if (!out) throw PipelineError("write failed: " + path.string());
}

StumpEnsemble load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("model file not found: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return model_from_json_text(buffer.str());
}

}  // namespace fsp
