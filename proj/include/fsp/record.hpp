#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace fsp {

// One position in a founder's career history.
struct Job {
    int company_size_bucket = 0;  // 0 unknown, 1..7 per the bucket table
    int seniority_code = 0;       // 0 unknown, 1..6 per the seniority table
    std::optional<int> start_year;
    std::optional<int> end_year;  // absent = ongoing
    std::string industry;         // normalized token, "" = unknown
    bool is_founding_role = false;

    bool operator==(const Job&) const = default;
};

struct Education {
    int institution_prestige_tier = 0;  // 0 unknown .. 4 top-10
    std::string field;                  // normalized token
    int degree_level = 0;               // 0 unknown .. 4 doctorate
    bool is_stem = false;

    bool operator==(const Education&) const = default;
};

struct ExitHistory {
    int ipo_count = 0;
    int acquisition_count = 0;

    bool operator==(const ExitHistory&) const = default;
};

struct FounderRecord {
    std::string row_id;
    std::string prose;
    std::vector<Job> jobs;
    std::vector<Education> educations;
    ExitHistory exits;
    std::string founding_industry;  // normalized token, "" = unknown
    std::optional<int> label;       // 0/1 when present

    bool operator==(const FounderRecord&) const = default;
};

struct DatasetStats {
    std::size_t n_rows = 0;
    std::size_t n_positive = 0;
    double positive_rate = 0.0;  // exact n_positive / n_rows
    std::size_t parse_warning_count = 0;
    std::map<std::string, double> null_rate;  // per input column
};

// Accumulates tolerance warnings; parsing itself never throws.
struct ParseCounter {
    std::size_t warnings = 0;
    void warn() { ++warnings; }
};

// Tolerant parsers for the embedded-JSON career fields. Total over arbitrary
// byte strings: malformed input yields sentinels plus a warning, never an
// exception. Entry order is preserved.
std::vector<Job> parse_jobs(std::string_view raw, ParseCounter& counter);
std::vector<Education> parse_educations(std::string_view raw, ParseCounter& counter);
ExitHistory parse_exits(std::string_view ipos_raw, std::string_view acquisitions_raw,
                        ParseCounter& counter);

// Canonical serialization of parsed objects; reparsing yields equal objects.
nlohmann::json jobs_to_json(const std::vector<Job>& jobs);
nlohmann::json educations_to_json(const std::vector<Education>& edus);

enum class DatasetFormat { kCsv, kJsonl };

DatasetFormat dataset_format_from_name(const std::string& name);

// Loads a dataset file. Columns: row_id, anonymised_prose, jobs_json,
// educations_json, ipos, acquisitions, founding_industry, label.
// Throws InputError for unreadable files, a missing row_id column, duplicate
// row ids, an empty dataset, or (when require_labels) rows without labels.
std::pair<std::vector<FounderRecord>, DatasetStats> load_dataset(
    const std::filesystem::path& path, DatasetFormat format, bool require_labels = false);

DatasetStats compute_stats(const std::vector<FounderRecord>& records,
                           std::size_t parse_warnings = 0);

}  // namespace fsp
