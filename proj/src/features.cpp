#include "fsp/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "fsp/csv.hpp"
#include "fsp/errors.hpp"
#include "fsp/vocab.hpp"

namespace fsp {

namespace {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

// Chronological job order: ascending start year, undated jobs last in their
// original relative order.
std::vector<std::size_t> chronological_order(const std::vector<Job>& jobs) {
    std::vector<std::size_t> order(jobs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        int ya = jobs[a].start_year.value_or(std::numeric_limits<int>::max());
        int yb = jobs[b].start_year.value_or(std::numeric_limits<int>::max());
        return ya < yb;
    });
    return order;
}

double tenure_years(const Job& job) {
    if (!job.start_year || !job.end_year) return 0.0;
    return static_cast<double>(*job.end_year - *job.start_year);
}

// Indices of jobs that precede the first founding role. With a dated first
// founding role the cut is by start year; otherwise by list position. Records
// with no founding role in the job list treat the whole history as
// pre-founding (the founding that put them in the dataset came after it).
std::vector<std::size_t> pre_founding_jobs(const std::vector<Job>& jobs) {
    std::vector<std::size_t> out;
    std::optional<std::size_t> first_founding;
    std::optional<int> founding_start;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!jobs[i].is_founding_role) continue;
        if (jobs[i].start_year && (!founding_start || *jobs[i].start_year < *founding_start)) {
            founding_start = jobs[i].start_year;
            first_founding = i;
        } else if (!founding_start && !first_founding) {
            first_founding = i;
        }
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (jobs[i].is_founding_role) continue;
        if (!first_founding) {
            out.push_back(i);
        } else if (founding_start) {
            if (jobs[i].start_year && *jobs[i].start_year < *founding_start) out.push_back(i);
        } else if (i < *first_founding) {
            out.push_back(i);
        }
    }
    return out;
}

}  // namespace

const std::array<std::string, kFeatureCount>& feature_names() {
    static const std::array<std::string, kFeatureCount> names = {
        // tier 1: exit signals
        "has_prior_ipo", "has_prior_acquisition", "exit_count",
        // tier 2: sacrifice signals
        "max_company_size_before_founding", "prestige_sacrifice_score", "years_in_large_company",
        "comfort_index", "founding_timing", "is_serial_founder", "persistence_score",
        // tier 3: education x relevance
        "edu_prestige_tier", "field_relevance_score", "prestige_x_relevance", "degree_level",
        "stem_flag", "best_degree_prestige",
        // tier 4: career shape + v2 interactions
        "seniority_monotonic", "company_size_slope", "industry_pivot_count", "founding_role_count",
        "exit_x_serial", "sacrifice_x_serial", "industry_prestige_penalty", "industry_alignment",
        "job_count", "mean_tenure_years", "max_seniority_code", "career_length_years"};
    return names;
}

std::size_t feature_index(std::string_view name) {
    const auto& names = feature_names();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return i;
    throw PipelineError("unknown feature name: " + std::string(name));
}

std::array<double, kTier1Count> tier1_exit(const ExitHistory& exits) {
    return {exits.ipo_count > 0 ? 1.0 : 0.0, exits.acquisition_count > 0 ? 1.0 : 0.0,
            static_cast<double>(exits.ipo_count + exits.acquisition_count)};
}

std::array<double, kTier2Count> tier2_sacrifice(const std::vector<Job>& jobs) {
    std::array<double, kTier2Count> out{};
    if (jobs.empty()) return out;

    const std::vector<std::size_t> pre = pre_founding_jobs(jobs);

    int max_pre_bucket = 0;
    int seniority_at_max_bucket = 0;
    int max_pre_seniority = 0;
    for (std::size_t i : pre) {
        const Job& job = jobs[i];
        if (job.company_size_bucket > max_pre_bucket) {
            max_pre_bucket = job.company_size_bucket;
            seniority_at_max_bucket = job.seniority_code;
        } else if (job.company_size_bucket == max_pre_bucket) {
            seniority_at_max_bucket = std::max(seniority_at_max_bucket, job.seniority_code);
        }
        max_pre_seniority = std::max(max_pre_seniority, job.seniority_code);
    }

    double years_in_large = 0.0;
    for (const Job& job : jobs)
        if (job.company_size_bucket >= 6) years_in_large += std::max(0.0, tenure_years(job));

    int founding_role_count = 0;
    std::optional<int> founding_start;
    std::optional<int> career_start;
    int long_tenure_count = 0;
    for (const Job& job : jobs) {
        if (job.is_founding_role) {
            ++founding_role_count;
            if (job.start_year && (!founding_start || *job.start_year < *founding_start))
                founding_start = job.start_year;
        }
        if (job.start_year && (!career_start || *job.start_year < *career_start))
            career_start = job.start_year;
        if (tenure_years(job) >= 4.0) ++long_tenure_count;
    }

    double founding_timing = 0.0;
    if (founding_start && career_start)
        founding_timing = std::max(0.0, static_cast<double>(*founding_start - *career_start));

    out[0] = static_cast<double>(max_pre_bucket);
    out[1] = std::max(0.0, static_cast<double>(max_pre_bucket) * seniority_at_max_bucket - 1.0);
    out[2] = years_in_large;
    out[3] = years_in_large * max_pre_seniority;
    out[4] = founding_timing;
    out[5] = founding_role_count >= 2 ? 1.0 : 0.0;
    out[6] = static_cast<double>(founding_role_count + long_tenure_count);
    return out;
}

std::array<double, kTier3Count> tier3_education(const std::vector<Education>& edus,
                                                const std::string& founding_industry) {
    std::array<double, kTier3Count> out{};
    if (edus.empty()) return out;

    int max_prestige = 0;
    int max_degree = 0;
    double relevance = 0.0;
    bool any_stem = false;
    int best_degree = -1;
    int best_degree_prestige = 0;
    for (const Education& edu : edus) {
        max_prestige = std::max(max_prestige, edu.institution_prestige_tier);
        max_degree = std::max(max_degree, edu.degree_level);
        relevance = std::max(relevance, field_relevance(edu.field, founding_industry));
        any_stem = any_stem || edu.is_stem;
        if (edu.degree_level > best_degree ||
            (edu.degree_level == best_degree && edu.institution_prestige_tier > best_degree_prestige)) {
            best_degree = edu.degree_level;
            best_degree_prestige = edu.institution_prestige_tier;
        }
    }

    out[0] = static_cast<double>(max_prestige);
    out[1] = relevance;
    out[2] = static_cast<double>(max_prestige) * relevance;
    out[3] = static_cast<double>(max_degree);
    out[4] = any_stem ? 1.0 : 0.0;
    out[5] = static_cast<double>(best_degree_prestige);
    return out;
}

std::array<double, kTier4Count> tier4_trajectory(const std::vector<Job>& jobs,
                                                 const std::array<double, kTier1Count>& tier1,
                                                 const std::array<double, kTier2Count>& tier2,
                                                 double edu_prestige_tier,
                                                 const std::string& founding_industry) {
    std::array<double, kTier4Count> out{};
    if (jobs.empty()) return out;

    const std::vector<std::size_t> order = chronological_order(jobs);

    bool monotonic = true;
    int pivots = 0;
    for (std::size_t k = 1; k < order.size(); ++k) {
        const Job& prev = jobs[order[k - 1]];
        const Job& cur = jobs[order[k]];
        if (cur.seniority_code < prev.seniority_code) monotonic = false;
        if (!prev.industry.empty() && !cur.industry.empty() && prev.industry != cur.industry)
            ++pivots;
    }

    int slope_delta = jobs[order.back()].company_size_bucket - jobs[order.front()].company_size_bucket;

    int founding_role_count = 0;
    int max_seniority = 0;
    double total_years = 0.0;
    double aligned_years = 0.0;
    double tenure_sum = 0.0;
    int tenure_n = 0;
    std::optional<int> min_year;
    std::optional<int> max_year;
    for (const Job& job : jobs) {
        if (job.is_founding_role) ++founding_role_count;
        max_seniority = std::max(max_seniority, job.seniority_code);
        double years = std::max(0.0, tenure_years(job));
        if (job.start_year && job.end_year) {
            total_years += years;
            if (!founding_industry.empty() && job.industry == founding_industry)
                aligned_years += years;
            tenure_sum += years;
            ++tenure_n;
        }
        for (std::optional<int> y : {job.start_year, job.end_year}) {
            if (!y) continue;
            if (!min_year || *y < *min_year) min_year = y;
            if (!max_year || *y > *max_year) max_year = y;
        }
    }

    out[0] = monotonic ? 1.0 : 0.0;
    out[1] = slope_delta > 0 ? 1.0 : slope_delta < 0 ? -1.0 : 0.0;
    out[2] = static_cast<double>(pivots);
    out[3] = static_cast<double>(founding_role_count);
    out[4] = tier1[2] * tier2[5];
    out[5] = tier2[1] * tier2[5];
    out[6] = edu_prestige_tier * (is_prestige_penalty_industry(founding_industry) ? 1.0 : 0.0);
    out[7] = total_years > 0.0 ? aligned_years / total_years : 0.0;
    out[8] = static_cast<double>(jobs.size());
    out[9] = tenure_n > 0 ? tenure_sum / tenure_n : 0.0;
    out[10] = static_cast<double>(max_seniority);
    out[11] = (min_year && max_year) ? static_cast<double>(*max_year - *min_year) : 0.0;
    return out;
}

FeatureVector featurize(const FounderRecord& record) {
    FeatureVector vec;
    const auto t1 = tier1_exit(record.exits);
    const auto t2 = tier2_sacrifice(record.jobs);
    const auto t3 = tier3_education(record.educations, record.founding_industry);
    const auto t4 =
        tier4_trajectory(record.jobs, t1, t2, t3[0], record.founding_industry);

    std::size_t k = 0;
    for (double v : t1) vec.values[k++] = v;
    for (double v : t2) vec.values[k++] = v;
    for (double v : t3) vec.values[k++] = v;
    for (double v : t4) vec.values[k++] = v;
    return vec;
}

FeatureMatrix::FeatureMatrix(std::vector<std::string> names, std::size_t n_rows)
    : names_(std::move(names)), row_ids_(n_rows), data_(n_rows * names_.size(), 0.0) {}

void FeatureMatrix::set_labels(std::vector<int> labels) {
    if (labels.size() != n_rows()) throw PipelineError("label count does not match row count");
    labels_ = std::move(labels);
}

std::size_t FeatureMatrix::col_index(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return i;
    throw PipelineError("no such column: " + std::string(name));
}

bool FeatureMatrix::has_column(std::string_view name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

FeatureMatrix FeatureMatrix::select_columns(const std::vector<std::size_t>& cols) const {
    std::vector<std::string> names;
    names.reserve(cols.size());
    for (std::size_t c : cols) {
        if (c >= names_.size()) throw PipelineError("column index out of range");
        names.push_back(names_[c]);
    }
    FeatureMatrix out(std::move(names), n_rows());
    out.row_ids_ = row_ids_;
    out.labels_ = labels_;
    for (std::size_t r = 0; r < n_rows(); ++r)
        for (std::size_t k = 0; k < cols.size(); ++k) out.at(r, k) = at(r, cols[k]);
    return out;
}

FeatureMatrix FeatureMatrix::select_rows(const std::vector<std::size_t>& rows) const {
    FeatureMatrix out(names_, rows.size());
    if (labels_) out.labels_.emplace(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        std::size_t r = rows[k];
        if (r >= n_rows()) throw PipelineError("row index out of range");
        out.row_ids_[k] = row_ids_[r];
        if (labels_) (*out.labels_)[k] = (*labels_)[r];
        for (std::size_t c = 0; c < n_cols(); ++c) out.at(k, c) = at(r, c);
    }
    return out;
}

FeatureMatrix FeatureMatrix::append_columns(const std::vector<std::string>& names,
                                            const std::vector<std::vector<double>>& values) const {
    if (names.size() != values.size()) throw PipelineError("append_columns: name/value count mismatch");
    for (const auto& col : values)
        if (col.size() != n_rows()) throw PipelineError("append_columns: column length mismatch");
    std::vector<std::string> all_names = names_;
    for (const auto& name : names) {
        if (has_column(name)) throw PipelineError("append_columns: duplicate column " + name);
        all_names.push_back(name);
    }
    FeatureMatrix out(std::move(all_names), n_rows());
    out.row_ids_ = row_ids_;
    out.labels_ = labels_;
    for (std::size_t r = 0; r < n_rows(); ++r) {
        for (std::size_t c = 0; c < n_cols(); ++c) out.at(r, c) = at(r, c);
        for (std::size_t k = 0; k < names.size(); ++k) out.at(r, n_cols() + k) = values[k][r];
    }
    return out;
}

void FeatureMatrix::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw PipelineError("cannot write feature matrix: " + path.string());

    std::vector<std::string> header;
    header.reserve(names_.size() + 2);
    header.push_back("row_id");
    header.insert(header.end(), names_.begin(), names_.end());
    if (labels_) header.push_back("label");
    out << csv_join_row(header) << "\n";

    std::vector<std::string> cells(header.size());
    for (std::size_t r = 0; r < n_rows(); ++r) {
        cells[0] = row_ids_[r];
        for (std::size_t c = 0; c < n_cols(); ++c) cells[1 + c] = format_double(at(r, c));
        if (labels_) cells.back() = std::to_string((*labels_)[r]);
        out << csv_join_row(cells) << "\n";
    }
    if (!out) throw PipelineError("write failed: " + path.string());
}

FeatureMatrix build_matrix(const std::vector<FounderRecord>& records) {
    const auto& names = feature_names();
    FeatureMatrix out(std::vector<std::string>(names.begin(), names.end()), records.size());

    bool all_labeled = !records.empty();
    std::vector<int> labels;
    labels.reserve(records.size());
    for (std::size_t r = 0; r < records.size(); ++r) {
        const FounderRecord& rec = records[r];
        out.row_ids()[r] = rec.row_id;
        FeatureVector vec = featurize(rec);
        for (std::size_t c = 0; c < kFeatureCount; ++c) out.at(r, c) = vec[c];
        if (rec.label)
            labels.push_back(*rec.label);
        else
            all_labeled = false;
    }
    if (all_labeled) out.set_labels(std::move(labels));
    return out;
}

const std::vector<std::string>& struct_v1_feature_names() {
    static const std::vector<std::string> names = [] {
        static const std::array<std::string, 5> v2_only = {
            "exit_x_serial", "sacrifice_x_serial", "industry_prestige_penalty",
            "industry_alignment", "prestige_x_relevance"};
        std::vector<std::string> out;
        for (const std::string& name : feature_names())
            if (std::find(v2_only.begin(), v2_only.end(), name) == v2_only.end())
                out.push_back(name);
        return out;
    }();
    return names;
}

std::vector<std::size_t> struct_v1_column_indices() {
    std::vector<std::size_t> out;
    out.reserve(struct_v1_feature_names().size());
    for (const std::string& name : struct_v1_feature_names()) out.push_back(feature_index(name));
    return out;
}

}  // namespace fsp
