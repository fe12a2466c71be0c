#include "fsp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fsp/csv.hpp"
#include "fsp/errors.hpp"
#include "fsp/rng.hpp"

namespace fsp {

namespace {

std::string format_fixed(double v, int digits) {
    std::ostringstream out;
    out.precision(digits);
    out << std::fixed << v;
    return out.str();
}

double parse_cell_double(const std::string& cell, std::size_t& warnings) {
    try {
        std::size_t used = 0;
        double v = std::stod(cell, &used);
        if (used != cell.size() || !std::isfinite(v)) {
            ++warnings;
            return 0.0;
        }
        return v;
    } catch (const std::exception&) {
        ++warnings;
        return 0.0;
    }
}

}  // namespace

const std::array<std::string, kSideFeatureCount>& side_feature_names() {
    static const std::array<std::string, kSideFeatureCount> names = {
        "domain_expertise_depth", "conviction_score",      "narrative_type_code",
        "highest_seniority_reached", "prior_founding_attempts", "technical_depth_signal",
        "leadership_signal",      "outcome_orientation",   "narrative_specificity"};
    return names;
}

SideFeatureTable SideFeatureTable::load_csv(const std::filesystem::path& path) {
    CsvTable table = read_csv(path);
    if (table.header.empty()) throw InputError("empty side-feature file: " + path.string());

    auto row_id_it = std::find(table.header.begin(), table.header.end(), "row_id");
    if (row_id_it == table.header.end())
        throw InputError("side-feature file without row_id column: " + path.string());
    const std::size_t row_id_col = static_cast<std::size_t>(row_id_it - table.header.begin());

    SideFeatureTable side;
    const auto& names = side_feature_names();
    std::vector<int> column_of(names.size(), -1);
    std::size_t present = 0;
    for (std::size_t k = 0; k < names.size(); ++k) {
        auto it = std::find(table.header.begin(), table.header.end(), names[k]);
        if (it != table.header.end()) {
            column_of[k] = static_cast<int>(it - table.header.begin());
            ++present;
        }
    }
    if (present < names.size()) ++side.warnings;  // short files are zero-padded
    for (const std::string& column : table.header)
        if (column != "row_id" &&
            std::find(names.begin(), names.end(), column) == names.end())
            ++side.warnings;  // unknown columns are ignored

    for (const auto& cells : table.rows) {
        if (row_id_col >= cells.size() || cells[row_id_col].empty()) {
            ++side.warnings;
            continue;
        }
        std::array<double, kSideFeatureCount> values{};
        for (std::size_t k = 0; k < names.size(); ++k) {
            if (column_of[k] < 0) continue;
            auto c = static_cast<std::size_t>(column_of[k]);
            if (c >= cells.size() || cells[c].empty()) continue;
            values[k] = parse_cell_double(cells[c], side.warnings);
        }
        if (!side.rows.emplace(cells[row_id_col], values).second) {
            side.rows[cells[row_id_col]] = values;  // last occurrence wins
            ++side.warnings;
        }
    }
    return side;
}

FeatureMatrix merge_side_features(const FeatureMatrix& matrix, const SideFeatureTable& side,
                                  double* coverage_out, std::size_t* warnings_out) {
    const auto& names = side_feature_names();
    std::vector<std::vector<double>> columns(names.size(),
                                             std::vector<double>(matrix.n_rows(), 0.0));
    std::set<std::string> matched;
    for (std::size_t r = 0; r < matrix.n_rows(); ++r) {
        auto it = side.rows.find(matrix.row_ids()[r]);
        if (it == side.rows.end()) continue;
        matched.insert(it->first);
        for (std::size_t k = 0; k < names.size(); ++k) columns[k][r] = it->second[k];
    }
    if (coverage_out)
        *coverage_out = matrix.n_rows() == 0
                            ? 0.0
                            : static_cast<double>(matched.size()) / matrix.n_rows();
    if (warnings_out)
        *warnings_out = side.warnings + (side.rows.size() - matched.size());

    return matrix.append_columns(std::vector<std::string>(names.begin(), names.end()), columns);
}

RedistributionReport importance_redistribution(const StumpEnsemble& base_model,
                                               const StumpEnsemble& extended_model) {
    RedistributionReport report;
    report.base_shares = feature_importance(base_model);
    report.extended_shares = feature_importance(extended_model);

    const std::set<std::string> base_names(base_model.feature_names.begin(),
                                           base_model.feature_names.end());
    for (const auto& [name, share] : report.extended_shares)
        if (!base_names.contains(name)) report.side_share += share;

    std::vector<std::pair<std::string, double>> ranked(report.extended_shares.begin(),
                                                       report.extended_shares.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    for (const auto& [name, share] : ranked) report.extended_rank.push_back(name);

    for (const std::string& name : base_model.feature_names) {
        auto base_it = report.base_shares.find(name);
        auto ext_it = report.extended_shares.find(name);
        double base_share = base_it == report.base_shares.end() ? 0.0 : base_it->second;
        double ext_share = ext_it == report.extended_shares.end() ? 0.0 : ext_it->second;
        if (base_share != 0.0 || ext_share != 0.0)
            report.base_share_delta[name] = ext_share - base_share;
    }
    return report;
}

nlohmann::json RedistributionReport::to_json() const {
    return nlohmann::json{{"side_share", side_share},
                          {"base_shares", base_shares},
                          {"extended_shares", extended_shares},
                          {"extended_rank", extended_rank},
                          {"base_share_delta", base_share_delta}};
}

std::string RedistributionReport::to_markdown() const {
    std::ostringstream out;
    out << "Side-feature share of the extended importance budget: "
        << format_fixed(side_share * 100.0, 1) << "%\n\n";
    out << "| feature | base share | extended share | delta |\n";
    out << "| --- | ---: | ---: | ---: |\n";
    for (const std::string& name : extended_rank) {
        auto base_it = base_shares.find(name);
        auto ext_it = extended_shares.find(name);
        double base_share = base_it == base_shares.end() ? 0.0 : base_it->second;
        double ext_share = ext_it == extended_shares.end() ? 0.0 : ext_it->second;
        out << "| " << name << " | " << format_fixed(base_share, 4) << " | "
            << format_fixed(ext_share, 4) << " | " << format_fixed(ext_share - base_share, 4)
            << " |\n";
    }
    return out.str();
}

nlohmann::json VariantResult::to_json() const {
    nlohmann::json out{{"name", name},
                       {"val", val.to_json()},
                       {"cv", cv.to_json()},
                       {"baseline_name", baseline_name}};
    if (delta_vs_baseline_pp)
        out["delta_vs_baseline_pp"] = *delta_vs_baseline_pp;
    else
        out["delta_vs_baseline_pp"] = nullptr;
    return out;
}

VariantResult VariantResult::from_json(const nlohmann::json& j) {
    VariantResult out;
    try {
        out.name = j.at("name").get<std::string>();
        out.val = MetricBundle::from_json(j.at("val"));
        out.cv = CvSummary::from_json(j.at("cv"));
        out.baseline_name = j.at("baseline_name").get<std::string>();
        if (j.contains("delta_vs_baseline_pp") && !j.at("delta_vs_baseline_pp").is_null())
            out.delta_vs_baseline_pp = j.at("delta_vs_baseline_pp").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("bad variant result JSON: ") + e.what());
    }
    return out;
}

const std::vector<std::string>& known_variants() {
    static const std::vector<std::string> names = {"zero_shot_stub", "rule_only", "struct_v1",
                                                   "struct_v2", "struct_v2_plus_side"};
    return names;
}

namespace {

MetricBundle score_external(const std::map<std::string, int>& preds, const FeatureMatrix& matrix,
                            const std::vector<std::size_t>& rows) {
    std::vector<int> predicted;
    std::vector<int> truth;
    predicted.reserve(rows.size());
    truth.reserve(rows.size());
    for (std::size_t r : rows) {
        auto it = preds.find(matrix.row_ids()[r]);
        predicted.push_back(it == preds.end() ? 0 : it->second);
        truth.push_back((*matrix.labels())[r]);
    }
    return metric_bundle(confusion(predicted, truth));
}

}  // namespace

VariantResult run_variant(const std::string& name, const FeatureMatrix& matrix,
                          const VariantContext& ctx,
                          std::optional<StumpEnsemble>* model_out) {
    const auto& names = known_variants();
    auto name_it = std::find(names.begin(), names.end(), name);
    if (name_it == names.end()) throw InputError("unknown variant: " + name);
    const auto variant_ix = static_cast<std::uint64_t>(name_it - names.begin());

    if (!matrix.labels()) throw PipelineError("variants require a labeled matrix");
    if (model_out) model_out->reset();

    VariantResult result;
    result.name = name;

    const std::uint64_t split_seed = derive_seed(ctx.seed, rng_stream::kSplit);
    const std::uint64_t fit_seed = derive_seed(derive_seed(ctx.seed, rng_stream::kVariant), variant_ix);
    auto [train_idx, eval_idx] = stratified_split(*matrix.labels(), ctx.holdout_fraction, split_seed);

    if (name == "zero_shot_stub") {
        if (!ctx.external_predictions)
            throw InputError("zero_shot_stub requires an external predictions file");
        const auto& preds = *ctx.external_predictions;
        result.val = score_external(preds, matrix, eval_idx);
        result.cv = cross_validate(
            *matrix.labels(), ctx.cv_folds, ctx.seed,
            [&](const std::vector<std::size_t>&, const std::vector<std::size_t>& fold_eval,
                std::uint64_t) { return score_external(preds, matrix, fold_eval); },
            ctx.n_threads);
        return result;
    }

    PipelineSettings settings;
    settings.rules = ctx.rules;
    settings.hyperparams = ctx.hyperparams;

    const FeatureMatrix* active = &matrix;
    FeatureMatrix merged;
    if (name == "rule_only") {
        settings.use_classifier = false;
    } else if (name == "struct_v1") {
        settings.classifier_columns = struct_v1_column_indices();
    } else if (name == "struct_v2_plus_side") {
        merged = merge_side_features(matrix, ctx.side_features ? *ctx.side_features
                                                               : SideFeatureTable{});
        active = &merged;
    }

    FittedPipeline fitted = fit_pipeline(*active, train_idx, settings, fit_seed);
    std::vector<int> preds = predict_pipeline(fitted, *active, eval_idx);
    std::vector<int> truth;
    truth.reserve(eval_idx.size());
    for (std::size_t r : eval_idx) truth.push_back((*active->labels())[r]);
    result.val = metric_bundle(confusion(preds, truth));
    result.cv = cv_pipeline(*active, ctx.cv_folds, ctx.seed, settings, ctx.n_threads);

    if (model_out && fitted.model) *model_out = std::move(fitted.model);
    return result;
}

void apply_baseline_deltas(std::vector<VariantResult>& results) {
    if (results.empty()) return;
    const std::string& baseline = results.front().name;
    const double baseline_f = results.front().val.f_beta;
    for (std::size_t i = 0; i < results.size(); ++i) {
        results[i].baseline_name = baseline;
        if (i == 0)
            results[i].delta_vs_baseline_pp.reset();
        else
            results[i].delta_vs_baseline_pp = (results[i].val.f_beta - baseline_f) * 100.0;
    }
}

TwoPopulationAudit two_population_audit(const FeatureMatrix& matrix, const StumpEnsemble& model) {
    if (!matrix.labels()) throw PipelineError("two-population audit requires labels");
    const std::vector<int>& labels = *matrix.labels();
    const std::size_t exit_col = matrix.col_index("exit_count");

    // Classifier-only predictions: the point of the audit is what the model
    // adds beyond the rule layer, so no overrides here.
    std::vector<std::size_t> model_cols;
    model_cols.reserve(model.feature_names.size());
    for (const std::string& name : model.feature_names)
        model_cols.push_back(matrix.col_index(name));

    TwoPopulationAudit audit;
    std::size_t exit_tp = 0;
    std::size_t non_exit_tp = 0;
    std::vector<double> fv(model_cols.size());
    for (std::size_t r = 0; r < matrix.n_rows(); ++r) {
        if (labels[r] != 1) continue;
        ++audit.total_positives;
        bool has_exit = matrix.at(r, exit_col) > 0.0;
        (has_exit ? audit.exit_population : audit.non_exit_population).positives += 1;

        auto row = matrix.row(r);
        for (std::size_t k = 0; k < model_cols.size(); ++k) fv[k] = row[model_cols[k]];
        int pred = classify(predict_proba(model, fv), model.decision_threshold);
        if (pred == 1) (has_exit ? exit_tp : non_exit_tp) += 1;
    }

    auto rate = [](std::size_t num, std::size_t den) {
        return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    audit.exit_population.rule_capture_rate = audit.exit_population.positives > 0 ? 1.0 : 0.0;
    audit.non_exit_population.rule_capture_rate = 0.0;
    audit.exit_population.model_recall = rate(exit_tp, audit.exit_population.positives);
    audit.non_exit_population.model_recall = rate(non_exit_tp, audit.non_exit_population.positives);
    audit.non_exit_positive_share = rate(audit.non_exit_population.positives, audit.total_positives);

    // Best single-feature lift among non-exit rows: threshold each feature at
    // its non-exit median and compare above-median precision to the non-exit
    // base rate.
    std::vector<std::size_t> non_exit_rows;
    std::size_t non_exit_pos = 0;
    for (std::size_t r = 0; r < matrix.n_rows(); ++r) {
        if (matrix.at(r, exit_col) > 0.0) continue;
        non_exit_rows.push_back(r);
        non_exit_pos += labels[r] == 1 ? 1 : 0;
    }
    double base_rate = rate(non_exit_pos, non_exit_rows.size());
    if (base_rate > 0.0) {
        for (std::size_t c = 0; c < matrix.n_cols(); ++c) {
            std::vector<double> values;
            values.reserve(non_exit_rows.size());
            for (std::size_t r : non_exit_rows) values.push_back(matrix.at(r, c));
            std::vector<double> sorted_values = values;
            std::nth_element(sorted_values.begin(), sorted_values.begin() + sorted_values.size() / 2,
                             sorted_values.end());
            double median = sorted_values[sorted_values.size() / 2];

            std::size_t above = 0;
            std::size_t above_pos = 0;
            for (std::size_t k = 0; k < non_exit_rows.size(); ++k) {
                if (values[k] <= median) continue;
                ++above;
                above_pos += labels[non_exit_rows[k]] == 1 ? 1 : 0;
            }
            if (above == 0) continue;
            double lift = rate(above_pos, above) / base_rate;
            if (lift > audit.best_non_exit_lift) {
                audit.best_non_exit_lift = lift;
                audit.best_non_exit_feature = matrix.names()[c];
            }
        }
    }
    return audit;
}

nlohmann::json TwoPopulationAudit::to_json() const {
    auto population = [](const PopulationStats& p) {
        return nlohmann::json{{"positives", p.positives},
                              {"rule_capture_rate", p.rule_capture_rate},
                              {"model_recall", p.model_recall}};
    };
    return nlohmann::json{{"total_positives", total_positives},
                          {"exit_population", population(exit_population)},
                          {"non_exit_population", population(non_exit_population)},
                          {"non_exit_positive_share", non_exit_positive_share},
                          {"best_non_exit_feature", best_non_exit_feature},
                          {"best_non_exit_lift", best_non_exit_lift}};
}

std::string TwoPopulationAudit::to_markdown() const {
    std::ostringstream out;
    out << "| population | positives | rule capture | model recall |\n";
    out << "| --- | ---: | ---: | ---: |\n";
    out << "| prior exit | " << exit_population.positives << " | "
        << format_fixed(exit_population.rule_capture_rate, 3) << " | "
        << format_fixed(exit_population.model_recall, 3) << " |\n";
    out << "| no prior exit | " << non_exit_population.positives << " | "
        << format_fixed(non_exit_population.rule_capture_rate, 3) << " | "
        << format_fixed(non_exit_population.model_recall, 3) << " |\n\n";
    out << "Non-exit share of positives: " << format_fixed(non_exit_positive_share, 3) << "\n";
    out << "Best single-feature lift among non-exit rows: " << best_non_exit_feature << " ("
        << format_fixed(best_non_exit_lift, 2) << "x)\n";
    return out.str();
}

std::string emit_report_markdown(const std::vector<VariantResult>& results) {
    std::ostringstream out;
    std::string baseline =
        results.empty() || results.front().baseline_name.empty() ? "baseline"
                                                                 : results.front().baseline_name;
    out << "| variant | cv f0.5 | val f0.5 | delta vs " << baseline << " |\n";
    out << "| --- | ---: | ---: | ---: |\n";
    for (const VariantResult& r : results) {
        out << "| " << r.name << " | " << format_fixed(r.cv.mean_f_beta, 4) << " ± "
            << format_fixed(r.cv.std_f_beta, 4) << " | " << format_fixed(r.val.f_beta, 4) << " | ";
        if (r.delta_vs_baseline_pp) {
            double pp = *r.delta_vs_baseline_pp;
            out << (pp >= 0.0 ? "+" : "") << format_fixed(pp, 2) << " pp |\n";
        } else {
            out << "— |\n";
        }
    }
    return out.str();
}

nlohmann::json emit_report_json(const std::vector<VariantResult>& results) {
    nlohmann::json out;
    out["results"] = nlohmann::json::array();
    for (const VariantResult& r : results) out["results"].push_back(r.to_json());
    return out;
}

std::vector<VariantResult> parse_report_json(const nlohmann::json& j) {
    std::vector<VariantResult> out;
    try {
        for (const auto& entry : j.at("results")) out.push_back(VariantResult::from_json(entry));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("bad report JSON: ") + e.what());
    }
    return out;
}

std::map<std::string, int> load_external_predictions(const std::filesystem::path& path) {
    CsvTable table = read_csv(path);
    auto id_it = std::find(table.header.begin(), table.header.end(), "row_id");
    auto pred_it = std::find(table.header.begin(), table.header.end(), "prediction");
    if (id_it == table.header.end() || pred_it == table.header.end())
        throw InputError("predictions file needs row_id and prediction columns: " + path.string());
    auto id_col = static_cast<std::size_t>(id_it - table.header.begin());
    auto pred_col = static_cast<std::size_t>(pred_it - table.header.begin());

    std::map<std::string, int> preds;
    for (const auto& cells : table.rows) {
        if (id_col >= cells.size() || pred_col >= cells.size())
            throw InputError("short row in predictions file: " + path.string());
        const std::string& value = cells[pred_col];
        if (value != "0" && value != "1")
            throw InputError("predictions must be 0 or 1, got: " + value);
        if (!preds.emplace(cells[id_col], value == "1" ? 1 : 0).second)
            throw InputError("duplicate row_id in predictions file: " + cells[id_col]);
    }
    return preds;
}

}  // namespace fsp
