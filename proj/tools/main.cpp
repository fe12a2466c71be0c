#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fsp/boost.hpp"
#include "fsp/config.hpp"
#include "fsp/errors.hpp"
#include "fsp/features.hpp"
#include "fsp/harness.hpp"
#include "fsp/metrics.hpp"
#include "fsp/pipeline.hpp"
#include "fsp/record.hpp"
#include "fsp/rules.hpp"
#include "fsp/synth.hpp"

namespace {

using nlohmann::json;

struct GlobalOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::string format = "markdown";
    bool quiet = false;
    std::optional<int> threads;
    bool print_config = false;
};

fsp::PipelineConfig resolve_config(const GlobalOptions& opts) {
    fsp::PipelineConfig config =
        opts.config_path.empty() ? fsp::PipelineConfig{} : fsp::PipelineConfig::load(opts.config_path);
    if (opts.seed) config.seed = *opts.seed;
    if (opts.out_dir) config.output_dir = *opts.out_dir;
    if (opts.threads) config.threads = *opts.threads;
    config.validate();
    return config;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw fsp::PipelineError("cannot write: " + path.string());
    out << text;
    if (!out) throw fsp::PipelineError("write failed: " + path.string());
}

void write_json(const std::filesystem::path& path, const json& doc) {
    write_text(path, doc.dump(2) + "\n");
}

void emit(const GlobalOptions& opts, const std::string& markdown, const json& machine) {
    if (opts.quiet) return;
    if (opts.format == "json")
        std::cout << machine.dump(2) << "\n";
    else
        std::cout << markdown;
}

std::filesystem::path ensure_out_dir(const fsp::PipelineConfig& config) {
    std::filesystem::path dir(config.output_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::pair<std::vector<fsp::FounderRecord>, fsp::DatasetStats> load_configured_dataset(
    const fsp::PipelineConfig& config, bool require_labels) {
    if (config.dataset_path.empty())
        throw fsp::InputError("no dataset configured: set dataset_path or pass --config");
    return fsp::load_dataset(config.dataset_path, config.dataset_format, require_labels);
}

json stats_to_json(const fsp::DatasetStats& stats) {
    json out{{"n_rows", stats.n_rows},
             {"n_positive", stats.n_positive},
             {"positive_rate", stats.positive_rate},
             {"parse_warnings", stats.parse_warning_count}};
    if (!stats.null_rate.empty()) out["null_rate"] = stats.null_rate;
    return out;
}

std::string stats_to_markdown(const fsp::DatasetStats& stats) {
    std::ostringstream out;
    out.precision(4);
    out << std::fixed;
    out << "rows: " << stats.n_rows << "\n";
    out << "positives: " << stats.n_positive << " (rate " << stats.positive_rate << ")\n";
    out << "parse warnings: " << stats.parse_warning_count << "\n";
    return out.str();
}

fsp::VariantContext make_context(const fsp::PipelineConfig& config) {
    fsp::VariantContext ctx;
    ctx.rules = config.rules;
    ctx.hyperparams = config.hyperparams;
    ctx.holdout_fraction = config.holdout_fraction;
    ctx.cv_folds = config.cv_folds;
    ctx.seed = config.seed;
    ctx.n_threads = config.threads;
    if (config.side_features_path)
        ctx.side_features = fsp::SideFeatureTable::load_csv(*config.side_features_path);
    if (config.external_predictions_path)
        ctx.external_predictions = fsp::load_external_predictions(*config.external_predictions_path);
    return ctx;
}

int cmd_generate(const GlobalOptions& opts, const fsp::PipelineConfig& config,
                 const std::string& spec_path, std::optional<std::size_t> rows,
                 std::string dataset_out) {
    fsp::SignalSpec spec = spec_path.empty() ? fsp::SignalSpec{} : fsp::SignalSpec::load(spec_path);
    if (rows) spec.n_rows = *rows;
    spec.validate();

    std::filesystem::path out_dir = ensure_out_dir(config);
    std::filesystem::path target =
        dataset_out.empty() ? out_dir / "synthetic.csv" : std::filesystem::path(dataset_out);

    fsp::write_rows_csv(target, fsp::generate_rows(spec, config.seed));
    auto [records, stats] = fsp::load_dataset(target, fsp::DatasetFormat::kCsv, true);

    json machine = stats_to_json(stats);
    machine["dataset"] = target.string();
    emit(opts, "wrote " + target.string() + "\n" + stats_to_markdown(stats), machine);
    return 0;
}

int cmd_featurize(const GlobalOptions& opts, const fsp::PipelineConfig& config) {
    auto [records, stats] = load_configured_dataset(config, false);
    fsp::FeatureMatrix matrix = fsp::build_matrix(records);

    std::filesystem::path out_dir = ensure_out_dir(config);
    std::filesystem::path target = out_dir / "features.csv";
    matrix.write_csv(target);

    json machine = stats_to_json(stats);
    machine["features"] = target.string();
    machine["n_cols"] = matrix.n_cols();
    emit(opts,
         "wrote " + target.string() + " (" + std::to_string(matrix.n_rows()) + " x " +
             std::to_string(matrix.n_cols()) + ")\n" + stats_to_markdown(stats),
         machine);
    return 0;
}

int cmd_audit_rules(const GlobalOptions& opts, const fsp::PipelineConfig& config) {
    auto [records, stats] = load_configured_dataset(config, true);
    fsp::FeatureMatrix matrix = fsp::build_matrix(records);
    fsp::RuleAudit audit = fsp::audit_rules(matrix);

    std::filesystem::path out_dir = ensure_out_dir(config);
    write_json(out_dir / "rule_audit.json", audit.to_json());
    write_text(out_dir / "rule_audit.md", audit.to_markdown());
    emit(opts, audit.to_markdown(), audit.to_json());
    return 0;
}

int cmd_train(const GlobalOptions& opts, const fsp::PipelineConfig& config) {
    auto [records, stats] = load_configured_dataset(config, true);
    fsp::FeatureMatrix matrix = fsp::build_matrix(records);

    fsp::HyperParams params = config.hyperparams;
    params.seed = config.seed;
    fsp::StumpEnsemble model = fsp::train(matrix, params);

    std::filesystem::path out_dir = ensure_out_dir(config);
    fsp::save_model(model, out_dir / "model.json");
    json importance(fsp::feature_importance(model));
    write_json(out_dir / "importance.json", importance);

    std::ostringstream md;
    md << "trained " << model.stumps.size() << " stumps on " << matrix.n_rows() << " rows\n";
    md << "model: " << (out_dir / "model.json").string() << "\n";
    json machine{{"stumps", model.stumps.size()},
                 {"rows", matrix.n_rows()},
                 {"model", (out_dir / "model.json").string()},
                 {"importance", importance}};
    emit(opts, md.str(), machine);
    return 0;
}

int cmd_evaluate(const GlobalOptions& opts, const fsp::PipelineConfig& config,
                 const std::string& variant) {
    auto [records, stats] = load_configured_dataset(config, true);
    fsp::FeatureMatrix matrix = fsp::build_matrix(records);
    fsp::VariantContext ctx = make_context(config);

    std::optional<fsp::StumpEnsemble> model;
    fsp::VariantResult result = fsp::run_variant(variant, matrix, ctx, &model);

    std::filesystem::path out_dir = ensure_out_dir(config);
    write_json(out_dir / ("metrics_" + variant + ".json"), result.to_json());
    if (model) fsp::save_model(*model, out_dir / ("model_" + variant + ".json"));

    std::vector<fsp::VariantResult> rows{result};
    emit(opts, fsp::emit_report_markdown(rows), result.to_json());
    return 0;
}

int cmd_cv(const GlobalOptions& opts, fsp::PipelineConfig config, const std::string& variant,
           std::optional<int> folds) {
    if (folds) {
        config.cv_folds = *folds;
        config.validate();
    }
    auto [records, stats] = load_configured_dataset(config, true);
    fsp::FeatureMatrix matrix = fsp::build_matrix(records);
    fsp::VariantContext ctx = make_context(config);

    fsp::VariantResult result = fsp::run_variant(variant, matrix, ctx);

    std::filesystem::path out_dir = ensure_out_dir(config);
    json doc{{"variant", variant}, {"cv", result.cv.to_json()}};
    write_json(out_dir / ("cv_" + variant + ".json"), doc);

    std::ostringstream md;
    md.precision(4);
    md << std::fixed;
    md << "cv f0.5 (" << variant << ", k=" << config.cv_folds << "): " << result.cv.mean_f_beta
       << " ± " << result.cv.std_f_beta << "\n";
    emit(opts, md.str(), doc);
    return 0;
}

int cmd_ablate(const GlobalOptions& opts, const fsp::PipelineConfig& config) {
    auto [records, stats] = load_configured_dataset(config, true);
    fsp::FeatureMatrix matrix = fsp::build_matrix(records);
    fsp::VariantContext ctx = make_context(config);

    std::filesystem::path out_dir = ensure_out_dir(config);
    std::vector<fsp::VariantResult> results;
    for (const std::string& name : config.variants) {
        std::optional<fsp::StumpEnsemble> model;
        results.push_back(fsp::run_variant(name, matrix, ctx, &model));
        if (model) fsp::save_model(*model, out_dir / ("model_" + name + ".json"));
    }
    fsp::apply_baseline_deltas(results);

    std::string markdown = fsp::emit_report_markdown(results);
    json machine = fsp::emit_report_json(results);
    write_text(out_dir / "report.md", markdown);
    write_json(out_dir / "report.json", machine);
    emit(opts, markdown, machine);
    return 0;
}

int cmd_report(const GlobalOptions& opts, const fsp::PipelineConfig& config, std::string in_path) {
    if (in_path.empty())
        in_path = (std::filesystem::path(config.output_dir) / "report.json").string();
    std::ifstream in(in_path);
    if (!in) throw fsp::InputError("report not found: " + in_path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    json doc = json::parse(buffer.str(), nullptr, false);
    if (doc.is_discarded()) throw fsp::InputError("report is not valid JSON: " + in_path);

    std::vector<fsp::VariantResult> results = fsp::parse_report_json(doc);
    emit(opts, fsp::emit_report_markdown(results), fsp::emit_report_json(results));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"founder success prediction pipeline"};
    app.require_subcommand(0, 1);
    // Let global flags appear after the subcommand name too.
    app.fallthrough();

    GlobalOptions opts;
    app.add_option("--config", opts.config_path, "JSON config file");
    app.add_option("--seed", opts.seed, "master seed (overrides config)");
    app.add_option("--out", opts.out_dir, "output directory (overrides config)");
    app.add_option("--format", opts.format, "stdout format")
        ->check(CLI::IsMember({"markdown", "json"}));
    app.add_flag("--quiet", opts.quiet, "suppress stdout summaries");
    app.add_option("--threads", opts.threads, "worker threads (overrides config)");
    app.add_flag("--print-config", opts.print_config, "print the resolved config");

    auto* generate = app.add_subcommand("generate", "write a calibrated synthetic dataset");
    std::string spec_path;
    std::optional<std::size_t> gen_rows;
    std::string dataset_out;
    generate->add_option("--spec", spec_path, "signal spec JSON file");
    generate->add_option("--rows", gen_rows, "row count override");
    generate->add_option("--dataset-out", dataset_out, "dataset path (default <out>/synthetic.csv)");

    auto* featurize = app.add_subcommand("featurize", "export the feature matrix as CSV");
    auto* audit = app.add_subcommand("audit-rules", "audit the rule layer on a labeled dataset");
    auto* train_cmd = app.add_subcommand("train", "train on the full labeled dataset");

    auto* evaluate = app.add_subcommand("evaluate", "holdout evaluation of one variant");
    std::string eval_variant = "struct_v2";
    evaluate->add_option("--variant", eval_variant, "pipeline variant");

    auto* cv = app.add_subcommand("cv", "k-fold cross-validation of one variant");
    std::string cv_variant = "struct_v2";
    std::optional<int> cv_folds;
    cv->add_option("--variant", cv_variant, "pipeline variant");
    cv->add_option("--folds", cv_folds, "fold count override");

    auto* ablate = app.add_subcommand("ablate", "run all configured variants and emit the report");

    auto* report = app.add_subcommand("report", "re-emit a stored JSON report");
    std::string report_in;
    report->add_option("--in", report_in, "report JSON path (default <out>/report.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        fsp::PipelineConfig config = resolve_config(opts);
        if (opts.print_config && !opts.quiet) std::cout << config.to_json().dump(2) << "\n";

        if (generate->parsed()) return cmd_generate(opts, config, spec_path, gen_rows, dataset_out);
        if (featurize->parsed()) return cmd_featurize(opts, config);
        if (audit->parsed()) return cmd_audit_rules(opts, config);
        if (train_cmd->parsed()) return cmd_train(opts, config);
        if (evaluate->parsed()) return cmd_evaluate(opts, config, eval_variant);
        if (cv->parsed()) return cmd_cv(opts, config, cv_variant, cv_folds);
        if (ablate->parsed()) return cmd_ablate(opts, config);
        if (report->parsed()) return cmd_report(opts, config, report_in);

        if (opts.print_config) return 0;
        std::cerr << app.help() << std::endl;
        return 2;
    } catch (const fsp::InputError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    } catch (const fsp::PipelineError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
}
