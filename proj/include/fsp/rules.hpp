#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fsp/features.hpp"

namespace fsp {

// Deterministic positive-override rules applied before the classifier.
// Rule 1 (prior exit) is the production rule; rules 2 and 3 are kept for
// ablation and default to off.
struct RuleConfig {
    bool rule1_prior_exit = true;
    bool rule2_elite_stem_founder = false;
    bool rule3_clevel_serial = false;

    bool operator==(const RuleConfig&) const = default;
};

// Resolved column positions of the features the rules read. Works on any
// matrix that carries the canonical 28 names (wider matrices included).
struct RuleFeatureIndex {
    std::size_t exit_count;
    std::size_t edu_prestige_tier;
    std::size_t stem_flag;
    std::size_t founding_role_count;
    std::size_t max_seniority_code;
    std::size_t is_serial_founder;

    static RuleFeatureIndex from(const FeatureMatrix& matrix);
    static RuleFeatureIndex canonical();
};

bool rule_prior_exit(std::span<const double> fv, const RuleFeatureIndex& ix);
bool rule_elite_stem_founder(std::span<const double> fv, const RuleFeatureIndex& ix);
bool rule_clevel_serial(std::span<const double> fv, const RuleFeatureIndex& ix);

// Positive override when any enabled rule fires; nullopt leaves the decision
// to the classifier. Rules never force a negative.
std::optional<int> apply_rules(const RuleConfig& config, std::span<const double> fv,
                               const RuleFeatureIndex& ix);

struct RuleAuditEntry {
    std::string rule;
    std::size_t fire_count = 0;
    std::size_t true_positive_count = 0;
    double precision = 0.0;  // exact TP / fires; 0 with no_fires set when fires == 0
    double lift = 0.0;       // precision / dataset positive rate
    bool no_fires = false;
};

struct RuleAudit {
    std::vector<RuleAuditEntry> entries;  // rule1, rule2, rule3 in order
    double positive_rate = 0.0;

    nlohmann::json to_json() const;
    std::string to_markdown() const;
};

// Audits all three rules (enabled or not) against a labeled matrix.
// Throws PipelineError when labels are absent.
RuleAudit audit_rules(const FeatureMatrix& matrix);

}  // namespace fsp
