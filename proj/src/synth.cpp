#include "fsp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fsp/csv.hpp"
#include "fsp/errors.hpp"
#include "fsp/rng.hpp"
#include "fsp/vocab.hpp"

namespace fsp {

namespace {

constexpr const char* kIndustries[] = {"software", "fintech", "biotech", "hardware",
                                       "energy",   "healthcare", "ecommerce", "media"};
constexpr std::size_t kIndustryCount = std::size(kIndustries);

constexpr const char* kFields[] = {"computer_science", "electrical_engineering", "biology",
                                   "chemistry",        "physics",                "mathematics",
                                   "economics",        "finance",                "history",
                                   "psychology"};
constexpr std::size_t kFieldCount = std::size(kFields);

constexpr const char* kMalformedSamples[] = {
    "not json at all",
    "{\"role\": \"engineer\", ",
    "[{\"size\": }]",
    "[1, 2, 3]",
    "null",
};
constexpr std::size_t kMalformedCount = std::size(kMalformedSamples);

std::size_t quota(std::size_t n, double p) {
    auto k = static_cast<std::size_t>(std::llround(p * static_cast<double>(n)));
    return std::min(k, n);
}

std::string make_row_id(std::size_t i) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "synth-%06zu", i + 1);
    return buf;
}

std::string exit_events_cell(int count, SplitMix64& rng) {
    if (count == 0) return "";  // absent field is the no-exit signal
    nlohmann::json events = nlohmann::json::array();
    for (int i = 0; i < count; ++i)
        events.push_back({{"year", 2000 + static_cast<int>(rng.next_below(20))}});
    return events.dump();
}

}  // namespace

double SignalSpec::implied_positive_rate() const {
    double p_no_exit = 1.0 - p_one_exit - p_two_exit;
    return p_no_exit * success_rate_no_exit + p_one_exit * success_rate_one_exit +
           p_two_exit * success_rate_two_exit;
}

std::pair<double, double> SignalSpec::aligned_rates() const {
    // Half the non-exit population is aligned; aligned vs non-aligned success
    // rates are s_a = L*s_n with 0.5*(s_a + s_n) = success_rate_no_exit.
    double s0 = success_rate_no_exit;
    double lift = alignment_lift;
    double aligned_given_pos = lift / (lift + 1.0);
    double s_aligned = 2.0 * lift * s0 / (lift + 1.0);
    double aligned_given_neg = s0 >= 1.0 ? 0.5 : 0.5 * (1.0 - s_aligned) / (1.0 - s0);
    return {aligned_given_pos, aligned_given_neg};
}

void SignalSpec::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw InputError(std::string("invalid signal spec: ") + what);
    };
    require(n_rows > 0, "n_rows must be positive");
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    require(in01(base_positive_rate), "base_positive_rate must be in [0,1]");
    require(in01(p_one_exit) && in01(p_two_exit) && p_one_exit + p_two_exit <= 1.0,
            "exit fractions must be in [0,1] and sum to at most 1");
    require(in01(success_rate_no_exit) && in01(success_rate_one_exit) && in01(success_rate_two_exit),
            "success rates must be in [0,1]");
    require(in01(malformed_fraction), "malformed_fraction must be in [0,1]");
    require(alignment_lift > 0.0 && std::isfinite(alignment_lift),
            "alignment_lift must be positive");
    require(2.0 * alignment_lift * success_rate_no_exit / (alignment_lift + 1.0) <= 1.0,
            "alignment_lift pushes the aligned success rate above 1");
    require(std::abs(implied_positive_rate() - base_positive_rate) <= 0.005,
            "implied positive rate drifts more than 0.005 from base_positive_rate");
}

nlohmann::json SignalSpec::to_json() const {
    return nlohmann::json{{"n_rows", n_rows},
                          {"base_positive_rate", base_positive_rate},
                          {"p_one_exit", p_one_exit},
                          {"p_two_exit", p_two_exit},
                          {"success_rate_no_exit", success_rate_no_exit},
                          {"success_rate_one_exit", success_rate_one_exit},
                          {"success_rate_two_exit", success_rate_two_exit},
                          {"alignment_lift", alignment_lift},
                          {"malformed_fraction", malformed_fraction}};
}

SignalSpec SignalSpec::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("signal spec must be a JSON object");
    SignalSpec spec;
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "n_rows") spec.n_rows = value.get<std::size_t>();
            else if (key == "base_positive_rate") spec.base_positive_rate = value.get<double>();
            else if (key == "p_one_exit") spec.p_one_exit = value.get<double>();
            else if (key == "p_two_exit") spec.p_two_exit = value.get<double>();
            else if (key == "success_rate_no_exit") spec.success_rate_no_exit = value.get<double>();
            else if (key == "success_rate_one_exit") spec.success_rate_one_exit = value.get<double>();
            else if (key == "success_rate_two_exit") spec.success_rate_two_exit = value.get<double>();
            else if (key == "alignment_lift") spec.alignment_lift = value.get<double>();
            else if (key == "malformed_fraction") spec.malformed_fraction = value.get<double>();
            else throw InputError("unknown signal spec key: " + key);
        } catch (const nlohmann::json::exception&) {
            throw InputError("bad value for signal spec key: " + key);
        }
    }
    spec.validate();
    return spec;
}

SignalSpec SignalSpec::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("signal spec not found: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    nlohmann::json j = nlohmann::json::parse(buffer.str(), nullptr, false);
    if (j.is_discarded()) throw InputError("signal spec is not valid JSON: " + path.string());
    return from_json(j);
}

const std::vector<std::string>& dataset_columns() {
    static const std::vector<std::string> columns = {
        "row_id", "anonymised_prose", "jobs_json", "educations_json",
        "ipos",   "acquisitions",     "founding_industry", "label"};
    return columns;
}

std::vector<RawDatasetRow> generate_rows(const SignalSpec& spec, std::uint64_t seed) {
    spec.validate();
    const std::size_t n = spec.n_rows;
    SplitMix64 rng(derive_seed(seed, rng_stream::kGenerate));

    // Exact-quota planting: group sizes and per-group positive counts are the
    // rounded expectations; the seed only permutes who gets what and draws the
    // career texture. Empirical rates therefore match the planted values at
    // every seed, up to rounding.
    const std::size_t n_two = quota(n, spec.p_two_exit);
    const std::size_t n_one = std::min(quota(n, spec.p_one_exit), n - n_two);

    std::vector<std::uint8_t> exit_group(n, 0);
    std::fill_n(exit_group.begin(), n_two, std::uint8_t{2});
    std::fill_n(exit_group.begin() + static_cast<long>(n_two), n_one, std::uint8_t{1});
    rng.shuffle(exit_group);

    std::vector<int> labels(n, 0);
    std::vector<char> aligned(n, 0);
    const auto [aligned_pos_rate, aligned_neg_rate] = spec.aligned_rates();

    for (int group : {2, 1, 0}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i)
            if (exit_group[i] == group) members.push_back(i);
        double success_rate = group == 2   ? spec.success_rate_two_exit
                              : group == 1 ? spec.success_rate_one_exit
                                           : spec.success_rate_no_exit;
        rng.shuffle(members);
        std::size_t k_pos = quota(members.size(), success_rate);
        for (std::size_t j = 0; j < k_pos; ++j) labels[members[j]] = 1;

        if (group == 0) {
            // Plant the alignment lift among non-exit founders only.
            std::vector<std::size_t> positives(members.begin(),
                                               members.begin() + static_cast<long>(k_pos));
            std::vector<std::size_t> negatives(members.begin() + static_cast<long>(k_pos),
                                               members.end());
            rng.shuffle(positives);
            rng.shuffle(negatives);
            std::size_t k_ap = quota(positives.size(), aligned_pos_rate);
            std::size_t k_an = quota(negatives.size(), aligned_neg_rate);
            for (std::size_t j = 0; j < k_ap; ++j) aligned[positives[j]] = 1;
            for (std::size_t j = 0; j < k_an; ++j) aligned[negatives[j]] = 1;
        } else {
            for (std::size_t i : members) aligned[i] = rng.next_unit() < 0.5 ? 1 : 0;
        }
    }

    std::vector<RawDatasetRow> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        RawDatasetRow row;
        row.row_id = make_row_id(i);

        int exit_count = exit_group[i];
        int ipos = 0;
        int acqs = 0;
        if (exit_count == 2) {
            switch (rng.next_below(3)) {
                case 0: ipos = 2; break;
                case 1: ipos = 1; acqs = 1; break;
                default: acqs = 2; break;
            }
        } else if (exit_count == 1) {
            (rng.next_below(2) == 0 ? ipos : acqs) = 1;
        }

        std::size_t industry_ix = rng.next_below(kIndustryCount);
        const std::string founding_industry = kIndustries[industry_ix];
        auto other_industry = [&] {
            return std::string(
                kIndustries[(industry_ix + 1 + rng.next_below(kIndustryCount - 1)) % kIndustryCount]);
        };

        const double in_industry_rate = aligned[i] ? 0.85 : 0.15;
        const std::size_t n_jobs = 2 + rng.next_below(4);
        int year = 1990 + static_cast<int>(rng.next_below(19));

        double founder_draw = rng.next_unit();
        int founding_roles = founder_draw < 0.10 ? 2 : founder_draw < 0.45 ? 1 : 0;

        std::vector<Job> jobs;
        for (std::size_t j = 0; j < n_jobs; ++j) {
            Job job;
            job.start_year = year;
            int tenure = 2 + static_cast<int>(rng.next_below(4));
            year += tenure;
            job.end_year = year;
            job.industry = rng.next_unit() < in_industry_rate ? founding_industry : other_industry();
            job.company_size_bucket = 1 + static_cast<int>(rng.next_below(7));
            job.seniority_code =
                std::min<int>(6, 1 + static_cast<int>(j) + static_cast<int>(rng.next_below(2)));
            jobs.push_back(std::move(job));
        }
        for (int f = 0; f < founding_roles; ++f) {
            Job job;
            job.start_year = year;
            if (f + 1 < founding_roles) {  // earlier venture is closed out
                int tenure = 2 + static_cast<int>(rng.next_below(2));
                year += tenure;
                job.end_year = year;
            }
            job.industry = founding_industry;
            job.company_size_bucket = 1;
            job.seniority_code = 6;
            job.is_founding_role = true;
            jobs.push_back(std::move(job));
        }

        std::vector<Education> edus;
        const std::size_t n_edu = rng.next_below(3);
        for (std::size_t e = 0; e < n_edu; ++e) {
            Education edu;
            edu.institution_prestige_tier = static_cast<int>(rng.next_below(5));
            edu.field = kFields[rng.next_below(kFieldCount)];
            edu.degree_level = 1 + static_cast<int>(rng.next_below(4));
            edu.is_stem = is_stem_field(edu.field);
            edus.push_back(std::move(edu));
        }

        row.jobs_json = jobs_to_json(jobs).dump();
        row.educations_json = educations_to_json(edus).dump();
        if (spec.malformed_fraction > 0.0 && rng.next_unit() < spec.malformed_fraction)
            row.jobs_json = kMalformedSamples[rng.next_below(kMalformedCount)];
        row.ipos = exit_events_cell(ipos, rng);
        row.acquisitions = exit_events_cell(acqs, rng);
        row.founding_industry = founding_industry;
        row.label = labels[i] == 1 ? "1" : "0";
        row.prose = "Founder " + row.row_id + ": " + std::to_string(jobs.size()) +
                    " roles, " + std::to_string(n_edu) + " degrees, founding in " +
                    founding_industry + ".";
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_rows_csv(const std::filesystem::path& path, const std::vector<RawDatasetRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PipelineError("cannot write dataset: " + path.string());
    out << csv_join_row(dataset_columns()) << "\n";
    for (const RawDatasetRow& row : rows) {
        out << csv_join_row({row.row_id, row.prose, row.jobs_json, row.educations_json, row.ipos,
                             row.acquisitions, row.founding_industry, row.label})
            << "\n";
    }
    if (!out) throw PipelineError("write failed: " + path.string());
}

std::pair<std::vector<FounderRecord>, DatasetStats> generate_synthetic(const SignalSpec& spec,
                                                                       std::uint64_t seed) {
    const std::vector<RawDatasetRow> rows = generate_rows(spec, seed);
    std::vector<FounderRecord> records;
    records.reserve(rows.size());
    ParseCounter counter;
    for (const RawDatasetRow& row : rows) {
        FounderRecord rec;
        rec.row_id = row.row_id;
        rec.prose = row.prose;
        rec.jobs = parse_jobs(row.jobs_json, counter);
        rec.educations = parse_educations(row.educations_json, counter);
        rec.exits = parse_exits(row.ipos, row.acquisitions, counter);
        rec.founding_industry = normalize_token(row.founding_industry);
        rec.label = row.label == "1" ? 1 : 0;
        records.push_back(std::move(rec));
    }
    DatasetStats stats = compute_stats(records, counter.warnings);
    return {std::move(records), std::move(stats)};
}

}  // namespace fsp
