#include "fsp/rules.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "fsp/errors.hpp"

namespace fsp {

RuleFeatureIndex RuleFeatureIndex::from(const FeatureMatrix& matrix) {
    return RuleFeatureIndex{
        matrix.col_index("exit_count"),          matrix.col_index("edu_prestige_tier"),
        matrix.col_index("stem_flag"),           matrix.col_index("founding_role_count"),
        matrix.col_index("max_seniority_code"),  matrix.col_index("is_serial_founder"),
    };
}

RuleFeatureIndex RuleFeatureIndex::canonical() {
    return RuleFeatureIndex{
        feature_index("exit_count"),          feature_index("edu_prestige_tier"),
        feature_index("stem_flag"),           feature_index("founding_role_count"),
        feature_index("max_seniority_code"),  feature_index("is_serial_founder"),
    };
}

bool rule_prior_exit(std::span<const double> fv, const RuleFeatureIndex& ix) {
    return fv[ix.exit_count] > 0.0;
}

bool rule_elite_stem_founder(std::span<const double> fv, const RuleFeatureIndex& ix) {
    return fv[ix.edu_prestige_tier] == 4.0 && fv[ix.stem_flag] == 1.0 &&
           fv[ix.founding_role_count] >= 1.0;
}

bool rule_clevel_serial(std::span<const double> fv, const RuleFeatureIndex& ix) {
    return fv[ix.max_seniority_code] == 6.0 && fv[ix.is_serial_founder] == 1.0;
}

std::optional<int> apply_rules(const RuleConfig& config, std::span<const double> fv,
                               const RuleFeatureIndex& ix) {
    if (config.rule1_prior_exit && rule_prior_exit(fv, ix)) return 1;
    if (config.rule2_elite_stem_founder && rule_elite_stem_founder(fv, ix)) return 1;
    if (config.rule3_clevel_serial && rule_clevel_serial(fv, ix)) return 1;
    return std::nullopt;
}

RuleAudit audit_rules(const FeatureMatrix& matrix) {
    if (!matrix.labels()) throw PipelineError("rule audit requires a labeled matrix");
    const std::vector<int>& labels = *matrix.labels();
    const RuleFeatureIndex ix = RuleFeatureIndex::from(matrix);

    struct NamedRule {
        const char* name;
        bool (*fires)(std::span<const double>, const RuleFeatureIndex&);
    };
    static constexpr NamedRule rules[] = {
        {"rule1_prior_exit", rule_prior_exit},
        {"rule2_elite_stem_founder", rule_elite_stem_founder},
        {"rule3_clevel_serial", rule_clevel_serial},
    };

    std::size_t n_positive = 0;
    for (int label : labels) n_positive += label == 1 ? 1 : 0;

    RuleAudit audit;
    audit.positive_rate =
        matrix.n_rows() == 0 ? 0.0 : static_cast<double>(n_positive) / matrix.n_rows();

    for (const NamedRule& rule : rules) {
        RuleAuditEntry entry;
        entry.rule = rule.name;
        for (std::size_t r = 0; r < matrix.n_rows(); ++r) {
            if (!rule.fires(matrix.row(r), ix)) continue;
            ++entry.fire_count;
            if (labels[r] == 1) ++entry.true_positive_count;
        }
        if (entry.fire_count == 0) {
            entry.no_fires = true;
        } else {
            entry.precision =
                static_cast<double>(entry.true_positive_count) / entry.fire_count;
            if (audit.positive_rate > 0.0) entry.lift = entry.precision / audit.positive_rate;
        }
        audit.entries.push_back(std::move(entry));
    }
    return audit;
}

nlohmann::json RuleAudit::to_json() const {
    nlohmann::json out;
    out["positive_rate"] = positive_rate;
    out["rules"] = nlohmann::json::array();
    for (const RuleAuditEntry& e : entries) {
        out["rules"].push_back({{"rule", e.rule},
                                {"fire_count", e.fire_count},
                                {"true_positive_count", e.true_positive_count},
                                {"precision", e.precision},
                                {"lift", e.lift},
                                {"no_fires", e.no_fires}});
    }
    return out;
}

std::string RuleAudit::to_markdown() const {
    std::ostringstream out;
    out << "| rule | fires | true positives | precision | lift |\n";
    out << "| --- | ---: | ---: | ---: | ---: |\n";
    out.precision(4);
    out << std::fixed;
    for (const RuleAuditEntry& e : entries) {
        out << "| " << e.rule << " | " << e.fire_count << " | " << e.true_positive_count << " | ";
        if (e.no_fires)
            out << "n/a (no fires) | n/a |\n";
        else
            out << e.precision << " | " << e.lift << " |\n";
    }
    return out.str();
}

}  // namespace fsp
