#include <doctest.h>

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fsp/errors.hpp"
#include "fsp/features.hpp"
#include "fsp/rules.hpp"

using namespace fsp;

namespace {

// Six founders covering fire/miss for all three rules; positive rate 1/2.
FeatureMatrix audit_fixture() {
    std::vector<std::string> names(feature_names().begin(), feature_names().end());
    FeatureMatrix m(names, 6);
    for (std::size_t r = 0; r < 6; ++r) m.row_ids()[r] = "r" + std::to_string(r);
    auto set = [&](std::size_t row, const char* name, double v) {
        m.at(row, feature_index(name)) = v;
    };
    set(0, "exit_count", 1.0);  // rule1 true positive
    set(1, "exit_count", 2.0);  // rule1 false positive
    set(2, "edu_prestige_tier", 4.0);  // rule2 true positive
    set(2, "stem_flag", 1.0);
    set(2, "founding_role_count", 1.0);
    set(3, "max_seniority_code", 6.0);  // rule3 false positive
    set(3, "is_serial_founder", 1.0);
    m.set_labels({1, 0, 1, 0, 1, 0});
    return m;
}

}  // namespace

TEST_CASE("rule feature index resolves canonical and shuffled layouts") {
    auto canon = RuleFeatureIndex::canonical();
    CHECK(canon.exit_count == feature_index("exit_count"));
    CHECK(canon.is_serial_founder == feature_index("is_serial_founder"));

    auto m = audit_fixture();
    auto from_matrix = RuleFeatureIndex::from(m);
    CHECK(from_matrix.exit_count == canon.exit_count);

    // A reordered matrix still resolves by name.
    auto narrow = m.select_columns({feature_index("stem_flag"), feature_index("exit_count"),
                                    feature_index("edu_prestige_tier"),
                                    feature_index("founding_role_count"),
                                    feature_index("max_seniority_code"),
                                    feature_index("is_serial_founder")});
    auto ix = RuleFeatureIndex::from(narrow);
    CHECK(ix.exit_count == 1);
    CHECK(ix.stem_flag == 0);
}

TEST_CASE("rule predicates") {
    auto m = audit_fixture();
    auto ix = RuleFeatureIndex::from(m);
    CHECK(rule_prior_exit(m.row(0), ix));
    CHECK(rule_prior_exit(m.row(1), ix));
    CHECK_FALSE(rule_prior_exit(m.row(4), ix));

    CHECK(rule_elite_stem_founder(m.row(2), ix));
    CHECK_FALSE(rule_elite_stem_founder(m.row(0), ix));

    CHECK(rule_clevel_serial(m.row(3), ix));
    CHECK_FALSE(rule_clevel_serial(m.row(2), ix));
}

TEST_CASE("rule2 needs all three conditions") {
    std::vector<std::string> names(feature_names().begin(), feature_names().end());
    FeatureMatrix m(names, 3);
    auto ix = RuleFeatureIndex::from(m);
    m.at(0, ix.edu_prestige_tier) = 4.0;
    m.at(0, ix.stem_flag) = 1.0;  // no founding role
    m.at(1, ix.edu_prestige_tier) = 3.0;  // tier too low
    m.at(1, ix.stem_flag) = 1.0;
    m.at(1, ix.founding_role_count) = 2.0;
    m.at(2, ix.edu_prestige_tier) = 4.0;  // not stem
    m.at(2, ix.founding_role_count) = 1.0;
    for (std::size_t r = 0; r < 3; ++r) CHECK_FALSE(rule_elite_stem_founder(m.row(r), ix));
}

TEST_CASE("apply_rules: positive override or abstain, never a veto") {
    auto m = audit_fixture();
    auto ix = RuleFeatureIndex::from(m);

    RuleConfig defaults;  // rule1 only
    CHECK(apply_rules(defaults, m.row(0), ix) == 1);
    CHECK(apply_rules(defaults, m.row(2), ix) == std::nullopt);  // rule2 disabled by default
    CHECK(apply_rules(defaults, m.row(4), ix) == std::nullopt);

    RuleConfig all{true, true, true};
    CHECK(apply_rules(all, m.row(2), ix) == 1);
    CHECK(apply_rules(all, m.row(3), ix) == 1);
    CHECK(apply_rules(all, m.row(5), ix) == std::nullopt);

    RuleConfig none{false, false, false};
    for (std::size_t r = 0; r < 6; ++r) CHECK(apply_rules(none, m.row(r), ix) == std::nullopt);
}

TEST_CASE("audit_rules reports exact precision and lift for all three rules") {
    auto m = audit_fixture();
    auto audit = audit_rules(m);
    CHECK(audit.positive_rate == 0.5);
    REQUIRE(audit.entries.size() == 3);

    const auto& r1 = audit.entries[0];
    CHECK(r1.rule == "rule1_prior_exit");
    CHECK(r1.fire_count == 2);
    CHECK(r1.true_positive_count == 1);
    CHECK(r1.precision == 0.5);
    CHECK(r1.lift == 1.0);
    CHECK_FALSE(r1.no_fires);

    const auto& r2 = audit.entries[1];
    CHECK(r2.fire_count == 1);
    CHECK(r2.precision == 1.0);
    CHECK(r2.lift == 2.0);

    const auto& r3 = audit.entries[2];
    CHECK(r3.fire_count == 1);
    CHECK(r3.true_positive_count == 0);
    CHECK(r3.precision == 0.0);
    CHECK(r3.lift == 0.0);
}

TEST_CASE("audit_rules flags rules that never fire") {
    std::vector<std::string> names(feature_names().begin(), feature_names().end());
    FeatureMatrix m(names, 4);
    m.set_labels({1, 0, 0, 0});
    auto audit = audit_rules(m);
    for (const auto& entry : audit.entries) {
        CHECK(entry.no_fires);
        CHECK(entry.fire_count == 0);
        CHECK(entry.precision == 0.0);
    }
}

TEST_CASE("audit_rules requires labels") {
    std::vector<std::string> names(feature_names().begin(), feature_names().end());
    FeatureMatrix m(names, 2);
    CHECK_THROWS_AS(audit_rules(m), PipelineError);
}

TEST_CASE("audit serialization names every rule") {
    auto audit = audit_rules(audit_fixture());
    auto j = audit.to_json();
    REQUIRE(j.contains("rules"));
    CHECK(j["rules"].size() == 3);
    CHECK(j["rules"][0]["rule"] == "rule1_prior_exit");
    CHECK(j["positive_rate"] == 0.5);

    auto md = audit.to_markdown();
    CHECK(md.find("rule1_prior_exit") != std::string::npos);
    CHECK(md.find("rule3_clevel_serial") != std::string::npos);
    CHECK(md.find("0.5000") != std::string::npos);
}
