#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fsp/record.hpp"

namespace fsp {

inline constexpr std::size_t kTier1Count = 3;
inline constexpr std::size_t kTier2Count = 7;
inline constexpr std::size_t kTier3Count = 6;
inline constexpr std::size_t kTier4Count = 12;
inline constexpr std::size_t kFeatureCount = 28;

// Canonical feature names in fixed order: tier1 | tier2 | tier3 | tier4.
// The order is part of the on-disk format and never changes.
const std::array<std::string, kFeatureCount>& feature_names();

// Index of a canonical feature name; throws PipelineError for unknown names.
std::size_t feature_index(std::string_view name);

struct FeatureVector {
    std::array<double, kFeatureCount> values{};

    double operator[](std::size_t i) const { return values[i]; }
    bool operator==(const FeatureVector&) const = default;
};

// Rectangular n x n_cols feature matrix. Base matrices have the 28 canonical
// columns; variant and side-feature matrices are narrower or wider.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(std::vector<std::string> names, std::size_t n_rows);

    std::size_t n_rows() const { return row_ids_.size(); }
    std::size_t n_cols() const { return names_.size(); }

    double at(std::size_t row, std::size_t col) const { return data_[row * names_.size() + col]; }
    double& at(std::size_t row, std::size_t col) { return data_[row * names_.size() + col]; }
    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * names_.size(), names_.size()};
    }

    const std::vector<std::string>& names() const { return names_; }
    const std::vector<std::string>& row_ids() const { return row_ids_; }
    std::vector<std::string>& row_ids() { return row_ids_; }
    const std::optional<std::vector<int>>& labels() const { return labels_; }
    void set_labels(std::vector<int> labels);
    void clear_labels() { labels_.reset(); }

    // Column index by name; throws PipelineError if absent.
    std::size_t col_index(std::string_view name) const;
    bool has_column(std::string_view name) const;

    FeatureMatrix select_columns(const std::vector<std::size_t>& cols) const;
    FeatureMatrix select_rows(const std::vector<std::size_t>& rows) const;

    // Appends columns on the right; `values` is column-major, one vector per
    // new column, each of length n_rows.
    FeatureMatrix append_columns(const std::vector<std::string>& names,
                                 const std::vector<std::vector<double>>& values) const;

    void write_csv(const std::filesystem::path& path) const;

private:
    std::vector<std::string> names_;
    std::vector<std::string> row_ids_;
    std::vector<double> data_;  // row-major
    std::optional<std::vector<int>> labels_;
};

// Tier 1 -- exit signals: has_prior_ipo, has_prior_acquisition, exit_count.
std::array<double, kTier1Count> tier1_exit(const ExitHistory& exits);

// Tier 2 -- sacrifice signals. Formulas are fixed in
// docs/feature_dictionary.md; all zero for an empty career.
std::array<double, kTier2Count> tier2_sacrifice(const std::vector<Job>& jobs);

// Tier 3 -- education x relevance against the founding industry.
std::array<double, kTier3Count> tier3_education(const std::vector<Education>& edus,
                                                const std::string& founding_industry);

// Tier 4 -- career shape and v2 interaction terms. Consumes the already
// computed tier 1/2 values plus the education prestige context.
std::array<double, kTier4Count> tier4_trajectory(const std::vector<Job>& jobs,
                                                 const std::array<double, kTier1Count>& tier1,
                                                 const std::array<double, kTier2Count>& tier2,
                                                 double edu_prestige_tier,
                                                 const std::string& founding_industry);

// Full 28-feature vector; total and finite for every record by construction.
FeatureVector featurize(const FounderRecord& record);

// n x 28 matrix in record order; labels carried when every record has one.
FeatureMatrix build_matrix(const std::vector<FounderRecord>& records);

// The 23-column v1 subset: the 28 canonical features minus the five v2
// additions (exit_x_serial, sacrifice_x_serial, industry_prestige_penalty,
// industry_alignment, prestige_x_relevance).
const std::vector<std::string>& struct_v1_feature_names();
std::vector<std::size_t> struct_v1_column_indices();

}  // namespace fsp
