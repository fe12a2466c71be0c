// Monte Carlo panel over generator seeds. Prints per-seed calibration and
// ablation numbers plus min/mean/max summaries; the acceptance bands for the
// synthetic-data criteria are pinned from this output. Not part of ctest.
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "fsp/features.hpp"
#include "fsp/harness.hpp"
#include "fsp/metrics.hpp"
#include "fsp/rng.hpp"
#include "fsp/rules.hpp"
#include "fsp/synth.hpp"

namespace {

struct Track {
    std::string name;
    std::vector<double> values;

    void add(double v) { values.push_back(v); }
    double min() const { return *std::min_element(values.begin(), values.end()); }
    double max() const { return *std::max_element(values.begin(), values.end()); }
    double mean() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s / static_cast<double>(values.size());
    }
};

}  // namespace

int main(int argc, char** argv) {
    const int n_seeds = argc > 1 ? std::atoi(argv[1]) : 20;
    fsp::SignalSpec spec;
    if (argc > 2) spec.success_rate_one_exit = std::atof(argv[2]);
    if (argc > 3) spec.success_rate_two_exit = std::atof(argv[3]);
    std::printf("spec: s1=%.3f s2=%.3f\n", spec.success_rate_one_exit, spec.success_rate_two_exit);

    Track pos_rate{"positive_rate", {}};
    Track exit_precision{"P(success|exit>=1)", {}};
    Track rule_lift{"rule1_lift", {}};
    Track nonexit_share_full{"nonexit_share_full", {}};
    Track nonexit_share_eval{"nonexit_share_eval", {}};
    Track cv_rule{"cv_rule_only", {}};
    Track cv_v2{"cv_struct_v2", {}};
    Track gap{"cv_gap_v2_minus_rule", {}};
    Track val_rule{"val_rule_only", {}};
    Track val_v2{"val_struct_v2", {}};
    Track recall_exit{"model_recall_exit", {}};
    Track recall_nonexit{"model_recall_nonexit", {}};
    Track v2_stumps{"v2_stump_count", {}};

    std::printf(
        "seed  rate    prec    lift   shareF  shareE  cvRule  cvV2    gap      valRule valV2   "
        "recEx  recNon stumps\n");
    for (int seed = 1; seed <= n_seeds; ++seed) {
        auto [records, stats] = fsp::generate_synthetic(spec, static_cast<std::uint64_t>(seed));
        fsp::FeatureMatrix matrix = fsp::build_matrix(records);

        const std::size_t exit_col = matrix.col_index("exit_count");
        std::size_t exits = 0, exit_pos = 0, total_pos = 0;
        for (std::size_t r = 0; r < matrix.n_rows(); ++r) {
            bool has_exit = matrix.at(r, exit_col) > 0.0;
            bool pos = (*matrix.labels())[r] == 1;
            exits += has_exit;
            total_pos += pos;
            exit_pos += has_exit && pos;
        }
        double rate = static_cast<double>(total_pos) / static_cast<double>(matrix.n_rows());
        double precision = static_cast<double>(exit_pos) / static_cast<double>(exits);
        double lift = precision / rate;
        double share_full =
            static_cast<double>(total_pos - exit_pos) / static_cast<double>(total_pos);

        fsp::VariantContext ctx;
        ctx.seed = static_cast<std::uint64_t>(seed);
        ctx.n_threads = 5;
        fsp::VariantResult rule_res = fsp::run_variant("rule_only", matrix, ctx);
        std::optional<fsp::StumpEnsemble> model;
        fsp::VariantResult v2_res = fsp::run_variant("struct_v2", matrix, ctx, &model);

        auto [train_idx, eval_idx] =
            fsp::stratified_split(*matrix.labels(), ctx.holdout_fraction,
                                  fsp::derive_seed(ctx.seed, fsp::rng_stream::kSplit));
        fsp::TwoPopulationAudit audit =
            fsp::two_population_audit(matrix.select_rows(eval_idx), *model);

        pos_rate.add(rate);
        exit_precision.add(precision);
        rule_lift.add(lift);
        nonexit_share_full.add(share_full);
        nonexit_share_eval.add(audit.non_exit_positive_share);
        cv_rule.add(rule_res.cv.mean_f_beta);
        cv_v2.add(v2_res.cv.mean_f_beta);
        gap.add(v2_res.cv.mean_f_beta - rule_res.cv.mean_f_beta);
        val_rule.add(rule_res.val.f_beta);
        val_v2.add(v2_res.val.f_beta);
        recall_exit.add(audit.exit_population.model_recall);
        recall_nonexit.add(audit.non_exit_population.model_recall);
        v2_stumps.add(static_cast<double>(model->stumps.size()));

        std::printf(
            "%4d  %.4f  %.4f  %.3f  %.4f  %.4f  %.4f  %.4f  %+.4f  %.4f  %.4f  %.3f  %.3f  %4zu\n",
            seed, rate, precision, lift, share_full, audit.non_exit_positive_share,
            rule_res.cv.mean_f_beta, v2_res.cv.mean_f_beta,
            v2_res.cv.mean_f_beta - rule_res.cv.mean_f_beta, rule_res.val.f_beta, v2_res.val.f_beta,
            audit.exit_population.model_recall, audit.non_exit_population.model_recall,
            model->stumps.size());
    }

    std::printf("\n%-22s %10s %10s %10s\n", "quantity", "min", "mean", "max");
    for (const Track* t : {&pos_rate, &exit_precision, &rule_lift, &nonexit_share_full,
                           &nonexit_share_eval, &cv_rule, &cv_v2, &gap, &val_rule, &val_v2,
                           &recall_exit, &recall_nonexit, &v2_stumps}) {
        std::printf("%-22s %10.4f %10.4f %10.4f\n", t->name.c_str(), t->min(), t->mean(), t->max());
    }
    return 0;
}
