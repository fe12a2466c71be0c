#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fsp/record.hpp"

namespace fsp {

// Planted-signal design for the synthetic corpus. Exit founders succeed at
// the planted conditional rates; non-exit founders carry only a weak
// industry-alignment signal. Defaults are calibrated so that a 4,500-row draw
// reproduces the target base rate, rule precision and two-population shape.
struct SignalSpec {
    std::size_t n_rows = 4500;
    double base_positive_rate = 0.09;
    double p_one_exit = 0.042;
    double p_two_exit = 0.002;
    double success_rate_no_exit = 0.085;
    double success_rate_one_exit = 0.228;
    double success_rate_two_exit = 0.600;
    // Planted success-rate ratio of aligned vs non-aligned careers among
    // non-exit founders.
    double alignment_lift = 1.38;
    // Fraction of rows whose career fields are written as malformed text,
    // for parser stress.
    double malformed_fraction = 0.0;

    double implied_positive_rate() const;
    // Throws InputError when probabilities leave [0,1] or the implied
    // marginal rate drifts more than 0.005 from base_positive_rate.
    void validate() const;

    // P(aligned | label) pair for non-exit founders that realizes
    // alignment_lift; non-aligned baseline is 0.5.
    std::pair<double, double> aligned_rates() const;

    nlohmann::json to_json() const;
    static SignalSpec from_json(const nlohmann::json& j);
    static SignalSpec load(const std::filesystem::path& path);
};

// One dataset row as raw column text, exactly as written to CSV.
struct RawDatasetRow {
    std::string row_id;
    std::string prose;
    std::string jobs_json;
    std::string educations_json;
    std::string ipos;
    std::string acquisitions;
    std::string founding_industry;
    std::string label;
};

const std::vector<std::string>& dataset_columns();

// Deterministic per (spec, seed), byte for byte.
std::vector<RawDatasetRow> generate_rows(const SignalSpec& spec, std::uint64_t seed);

void write_rows_csv(const std::filesystem::path& path, const std::vector<RawDatasetRow>& rows);

// generate_rows followed by the production parsers.
std::pair<std::vector<FounderRecord>, DatasetStats> generate_synthetic(const SignalSpec& spec,
                                                                       std::uint64_t seed);

}  // namespace fsp
