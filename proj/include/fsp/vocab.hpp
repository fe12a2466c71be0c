#pragma once

#include <string>
#include <string_view>

namespace fsp {

// Normalization and the fixed vocabulary tables behind the career record
// schema: company-size buckets, seniority codes, education prestige tiers,
// degree levels, the STEM field set and the field->industry relevance map.
// All tables are enumerated in docs/data_dictionary.md.

// Lowercase, trim, collapse internal whitespace and '/' runs to '_'.
// Hyphens are preserved; the bucket tables list hyphenated ranges directly.
std::string normalize_token(std::string_view raw);

// Bucket table: 1:1-10, 2:11-50, 3:51-200, 4:201-500, 5:501-1000,
// 6:1001-5000, 7:5001+. Unknown labels map to 0.
int company_size_bucket_from_label(const std::string& normalized);
int company_size_bucket_from_count(long long employees);

// 0 unknown, 1 intern/junior, 2 IC, 3 senior IC, 4 manager/director,
// 5 VP, 6 C-level.
int seniority_code_from_token(const std::string& normalized);

// 0 unknown .. 4 top-10 global.
int prestige_tier_from_token(const std::string& normalized);

// 0 unknown, 1 associate, 2 bachelor, 3 master, 4 doctorate.
int degree_level_from_token(const std::string& normalized);

bool is_stem_field(const std::string& normalized_field);

// Exact match 1.0, related 0.5, unrelated or unknown 0.0.
double field_relevance(const std::string& normalized_field, const std::string& normalized_industry);

// Industries where elite credentials are common regardless of outcome;
// drives the industry_prestige_penalty feature.
bool is_prestige_penalty_industry(const std::string& normalized_industry);

}  // namespace fsp
