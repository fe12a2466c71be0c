#include "fsp/record.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "fsp/csv.hpp"
#include "fsp/errors.hpp"
#include "fsp/vocab.hpp"

namespace fsp {

namespace {

using nlohmann::json;

constexpr int kMinYear = 1800;
constexpr int kMaxYear = 2100;
constexpr int kMaxExitCount = 10000;

bool is_null_sentinel(std::string_view raw) {
    std::string t = normalize_token(raw);
    return t.empty() || t == "null" || t == "none" || t == "nan" || t == "na" || t == "n_a";
}

// First present key among synonyms, or nullptr.
const json* find_key(const json& obj, std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
        auto it = obj.find(k);
        if (it != obj.end() && !it->is_null()) return &*it;
    }
    return nullptr;
}

std::optional<long long> coerce_int(const json& v) {
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_unsigned()) return static_cast<long long>(v.get<unsigned long long>());
    if (v.is_number_float()) return static_cast<long long>(v.get<double>());
    if (v.is_string()) {
        const auto& s = v.get_ref<const std::string&>();
        long long out = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (ec == std::errc() && ptr == s.data() + s.size()) return out;
    }
    return std::nullopt;
}

std::optional<bool> coerce_bool(const json& v) {
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number()) return coerce_int(v).value_or(0) != 0;
    if (v.is_string()) {
        std::string t = normalize_token(v.get_ref<const std::string&>());
        if (t == "true" || t == "yes" || t == "1" || t == "y") return true;
        if (t == "false" || t == "no" || t == "0" || t == "n") return false;
    }
    return std::nullopt;
}

std::optional<int> coerce_year(const json* v, ParseCounter& counter) {
    if (!v) return std::nullopt;
    auto n = coerce_int(*v);
    if (!n) {
        counter.warn();
        return std::nullopt;
    }
    if (*n < kMinYear || *n > kMaxYear) {
        counter.warn();
        return std::nullopt;
    }
    return static_cast<int>(*n);
}

// Parses raw as JSON without throwing. Returns discarded json on failure.
json parse_lenient(std::string_view raw) {
    return json::parse(raw, nullptr, /*allow_exceptions=*/false);
}

// Top-level shape tolerance: arrays pass through, a bare object becomes a
// one-entry array, anything else is malformed.
std::optional<json> as_entry_array(std::string_view raw, ParseCounter& counter) {
    if (is_null_sentinel(raw)) {
        counter.warn();
        return std::nullopt;
    }
    json parsed = parse_lenient(raw);
    if (parsed.is_discarded()) {
        counter.warn();
        return std::nullopt;
    }
    if (parsed.is_array()) return parsed;
    if (parsed.is_object()) return json::array({std::move(parsed)});
    counter.warn();
    return std::nullopt;
}

Job job_from_entry(const json& entry, ParseCounter& counter) {
    Job job;

    if (const json* v = find_key(entry, {"size_bucket"})) {
        auto n = coerce_int(*v);
        if (n && *n >= 0 && *n <= 7)
            job.company_size_bucket = static_cast<int>(*n);
        else
            counter.warn();
    } else if (const json* s = find_key(entry, {"size", "company_size", "employees"})) {
        if (s->is_number()) {
            job.company_size_bucket = company_size_bucket_from_count(coerce_int(*s).value_or(0));
        } else if (s->is_string()) {
            const auto& text = s->get_ref<const std::string&>();
            long long count = 0;
            auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), count);
            if (ec == std::errc() && ptr == text.data() + text.size())
                job.company_size_bucket = company_size_bucket_from_count(count);
            else
                job.company_size_bucket = company_size_bucket_from_label(normalize_token(text));
        }
    }

    if (const json* v = find_key(entry, {"seniority_code"})) {
        auto n = coerce_int(*v);
        if (n && *n >= 0 && *n <= 6)
            job.seniority_code = static_cast<int>(*n);
        else
            counter.warn();
    } else if (const json* s = find_key(entry, {"seniority", "level", "role"})) {
        if (s->is_string())
            job.seniority_code = seniority_code_from_token(normalize_token(s->get_ref<const std::string&>()));
        else if (auto n = coerce_int(*s); n && *n >= 0 && *n <= 6)
            job.seniority_code = static_cast<int>(*n);
    }

    job.start_year = coerce_year(find_key(entry, {"start", "start_year", "from"}), counter);
    job.end_year = coerce_year(find_key(entry, {"end", "end_year", "to"}), counter);
    if (job.start_year && job.end_year && *job.end_year < *job.start_year) {
        job.start_year.reset();
        job.end_year.reset();
        counter.warn();
    }

    if (const json* v = find_key(entry, {"industry", "sector"}))
        if (v->is_string()) job.industry = normalize_token(v->get_ref<const std::string&>());

    if (const json* v = find_key(entry, {"founding", "is_founding", "founder", "is_founder"}))
        job.is_founding_role = coerce_bool(*v).value_or(false);

    return job;
}

Education education_from_entry(const json& entry, ParseCounter& counter) {
    Education edu;

    if (const json* v = find_key(entry, {"prestige_tier"})) {
        auto n = coerce_int(*v);
        if (n && *n >= 0 && *n <= 4)
            edu.institution_prestige_tier = static_cast<int>(*n);
        else
            counter.warn();
    } else if (const json* s = find_key(entry, {"prestige", "tier", "rank", "institution_prestige"})) {
        if (s->is_string())
            edu.institution_prestige_tier = prestige_tier_from_token(normalize_token(s->get_ref<const std::string&>()));
        else if (auto n = coerce_int(*s); n && *n >= 0 && *n <= 4)
            edu.institution_prestige_tier = static_cast<int>(*n);
    }

    if (const json* v = find_key(entry, {"field", "major", "subject"}))
        if (v->is_string()) edu.field = normalize_token(v->get_ref<const std::string&>());

    if (const json* v = find_key(entry, {"degree_level"})) {
        auto n = coerce_int(*v);
        if (n && *n >= 0 && *n <= 4)
            edu.degree_level = static_cast<int>(*n);
        else
            counter.warn();
    } else if (const json* s = find_key(entry, {"degree", "level"})) {
        if (s->is_string())
            edu.degree_level = degree_level_from_token(normalize_token(s->get_ref<const std::string&>()));
        else if (auto n = coerce_int(*s); n && *n >= 0 && *n <= 4)
            edu.degree_level = static_cast<int>(*n);
    }

    if (const json* v = find_key(entry, {"stem", "is_stem"}))
        edu.is_stem = coerce_bool(*v).value_or(false);
    else
        edu.is_stem = is_stem_field(edu.field);

    return edu;
}

int count_exit_events(std::string_view raw, ParseCounter& counter) {
    if (is_null_sentinel(raw)) return 0;  // the null signal is an explicit zero
    json parsed = parse_lenient(raw);
    if (parsed.is_discarded()) {
        counter.warn();
        return 0;
    }
    if (parsed.is_array()) return static_cast<int>(parsed.size());
    if (parsed.is_object()) return 1;
    if (parsed.is_number()) {
        long long n = coerce_int(parsed).value_or(0);
        if (n < 0) {
            counter.warn();
            return 0;
        }
        return static_cast<int>(std::min<long long>(n, kMaxExitCount));
    }
    counter.warn();
    return 0;
}

}  // namespace

std::vector<Job> parse_jobs(std::string_view raw, ParseCounter& counter) {
    std::vector<Job> jobs;
    auto entries = as_entry_array(raw, counter);
    if (!entries) return jobs;
    jobs.reserve(entries->size());
    for (const json& entry : *entries) {
        if (!entry.is_object()) {
            counter.warn();
            continue;
        }
        jobs.push_back(job_from_entry(entry, counter));
    }
    return jobs;
}

std::vector<Education> parse_educations(std::string_view raw, ParseCounter& counter) {
    std::vector<Education> edus;
    auto entries = as_entry_array(raw, counter);
    if (!entries) return edus;
    edus.reserve(entries->size());
    for (const json& entry : *entries) {
        if (!entry.is_object()) {
            counter.warn();
            continue;
        }
        edus.push_back(education_from_entry(entry, counter));
    }
    return edus;
}

ExitHistory parse_exits(std::string_view ipos_raw, std::string_view acquisitions_raw,
                        ParseCounter& counter) {
    ExitHistory exits;
    exits.ipo_count = count_exit_events(ipos_raw, counter);
    exits.acquisition_count = count_exit_events(acquisitions_raw, counter);
    return exits;
}

json jobs_to_json(const std::vector<Job>& jobs) {
    json out = json::array();
    for (const Job& job : jobs) {
        json entry;
        entry["size_bucket"] = job.company_size_bucket;
        entry["seniority_code"] = job.seniority_code;
        if (job.start_year) entry["start"] = *job.start_year;
        if (job.end_year) entry["end"] = *job.end_year;
        if (!job.industry.empty()) entry["industry"] = job.industry;
        entry["founding"] = job.is_founding_role;
        out.push_back(std::move(entry));
    }
    return out;
}

json educations_to_json(const std::vector<Education>& edus) {
    json out = json::array();
    for (const Education& edu : edus) {
        json entry;
        entry["prestige_tier"] = edu.institution_prestige_tier;
        if (!edu.field.empty()) entry["field"] = edu.field;
        entry["degree_level"] = edu.degree_level;
        entry["stem"] = edu.is_stem;
        out.push_back(std::move(entry));
    }
    return out;
}

DatasetFormat dataset_format_from_name(const std::string& name) {
    std::string t = normalize_token(name);
    if (t == "csv") return DatasetFormat::kCsv;
    if (t == "jsonl") return DatasetFormat::kJsonl;
    throw InputError("unknown dataset format: " + name + " (expected csv or jsonl)");
}

namespace {

struct RawRowView {
    std::string row_id, prose, jobs, edus, ipos, acqs, industry, label;
};

std::optional<int> parse_label_cell(const std::string& cell, ParseCounter& counter) {
    if (is_null_sentinel(cell)) return std::nullopt;
    std::string t = normalize_token(cell);
    if (t == "0" || t == "0.0") return 0;
    if (t == "1" || t == "1.0") return 1;
    counter.warn();
    return std::nullopt;
}

FounderRecord record_from_raw(const RawRowView& raw, ParseCounter& counter) {
    FounderRecord rec;
    rec.row_id = raw.row_id;
    rec.prose = raw.prose;
    rec.jobs = parse_jobs(raw.jobs, counter);
    rec.educations = parse_educations(raw.edus, counter);
    rec.exits = parse_exits(raw.ipos, raw.acqs, counter);
    rec.founding_industry = normalize_token(raw.industry);
    rec.label = parse_label_cell(raw.label, counter);
    return rec;
}

std::string jsonl_field_to_text(const json& obj, const char* key, bool* missing) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        if (missing) *missing = true;
        return "";
    }
    if (it->is_string()) return it->get<std::string>();
    return it->dump();
}

}  // namespace

std::pair<std::vector<FounderRecord>, DatasetStats> load_dataset(const std::filesystem::path& path,
                                                                 DatasetFormat format,
                                                                 bool require_labels) {
    if (!std::filesystem::exists(path)) throw InputError("dataset not found: " + path.string());

    static const std::vector<std::string> columns = {
        "row_id", "anonymised_prose",  "jobs_json", "educations_json",
        "ipos",   "acquisitions",      "founding_industry", "label"};

    std::vector<RawRowView> raws;
    ParseCounter counter;
    std::vector<std::size_t> null_counts(columns.size(), 0);

    if (format == DatasetFormat::kCsv) {
        CsvTable table = read_csv(path);
        if (table.header.empty()) throw InputError("empty dataset: " + path.string());
        std::vector<int> col_index(columns.size(), -1);
        for (std::size_t c = 0; c < columns.size(); ++c) {
            auto it = std::find(table.header.begin(), table.header.end(), columns[c]);
            if (it != table.header.end())
                col_index[c] = static_cast<int>(it - table.header.begin());
        }
        if (col_index[0] < 0) throw InputError("missing mandatory column: row_id");
        if (require_labels && col_index[7] < 0) throw InputError("missing mandatory column: label");

        for (const auto& cells : table.rows) {
            if (cells.size() != table.header.size()) counter.warn();
            auto cell = [&](std::size_t c) -> std::string {
                int ix = col_index[c];
                if (ix < 0 || static_cast<std::size_t>(ix) >= cells.size()) return "";
                return cells[static_cast<std::size_t>(ix)];
            };
            RawRowView raw{cell(0), cell(1), cell(2), cell(3), cell(4), cell(5), cell(6), cell(7)};
            for (std::size_t c = 0; c < columns.size(); ++c) {
                const std::string& v =
                    c == 0 ? raw.row_id
                    : c == 1 ? raw.prose
                    : c == 2 ? raw.jobs
                    : c == 3 ? raw.edus
                    : c == 4 ? raw.ipos
                    : c == 5 ? raw.acqs
                    : c == 6 ? raw.industry
                             : raw.label;
                if (is_null_sentinel(v)) ++null_counts[c];
            }
            raws.push_back(std::move(raw));
        }
    } else {
        std::ifstream in(path);
        if (!in) throw InputError("cannot open file: " + path.string());
        std::string line;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            json obj = json::parse(line, nullptr, false);
            if (obj.is_discarded() || !obj.is_object()) {
                counter.warn();
                continue;
            }
            RawRowView raw;
            bool missing = false;
            raw.row_id = jsonl_field_to_text(obj, "row_id", nullptr);
            raw.prose = jsonl_field_to_text(obj, "anonymised_prose", &missing);
            raw.jobs = jsonl_field_to_text(obj, "jobs_json", &missing);
            raw.edus = jsonl_field_to_text(obj, "educations_json", &missing);
            raw.ipos = jsonl_field_to_text(obj, "ipos", &missing);
            raw.acqs = jsonl_field_to_text(obj, "acquisitions", &missing);
            raw.industry = jsonl_field_to_text(obj, "founding_industry", &missing);
            raw.label = jsonl_field_to_text(obj, "label", &missing);
            for (std::size_t c = 0; c < columns.size(); ++c) {
                const std::string& v =
                    c == 0 ? raw.row_id
                    : c == 1 ? raw.prose
                    : c == 2 ? raw.jobs
                    : c == 3 ? raw.edus
                    : c == 4 ? raw.ipos
                    : c == 5 ? raw.acqs
                    : c == 6 ? raw.industry
                             : raw.label;
                if (is_null_sentinel(v)) ++null_counts[c];
            }
            raws.push_back(std::move(raw));
        }
    }

    if (raws.empty()) throw InputError("empty dataset: " + path.string());

    std::vector<FounderRecord> records;
    records.reserve(raws.size());
    std::unordered_set<std::string> seen_ids;
    seen_ids.reserve(raws.size());
    for (const auto& raw : raws) {
        if (raw.row_id.empty()) throw InputError("row without row_id");
        if (!seen_ids.insert(raw.row_id).second)
            throw InputError("duplicate row_id: " + raw.row_id);
        records.push_back(record_from_raw(raw, counter));
        if (require_labels && !records.back().label)
            throw InputError("row without label in labeled mode: " + raw.row_id);
    }

    DatasetStats stats = compute_stats(records, counter.warnings);
    for (std::size_t c = 0; c < columns.size(); ++c)
        stats.null_rate[columns[c]] = static_cast<double>(null_counts[c]) / static_cast<double>(raws.size());
    return {std::move(records), std::move(stats)};
}

DatasetStats compute_stats(const std::vector<FounderRecord>& records, std::size_t parse_warnings) {
    DatasetStats stats;
    stats.n_rows = records.size();
    stats.parse_warning_count = parse_warnings;
    for (const auto& rec : records)
        if (rec.label && *rec.label == 1) ++stats.n_positive;
    stats.positive_rate =
        stats.n_rows == 0 ? 0.0
                          : static_cast<double>(stats.n_positive) / static_cast<double>(stats.n_rows);
    return stats;
}

}  // namespace fsp
