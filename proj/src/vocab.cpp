#include "fsp/vocab.hpp"

#include <cctype>
#include <unordered_map>
#include <unordered_set>

namespace fsp {

std::string normalize_token(std::string_view raw) {
    std::size_t begin = 0, end = raw.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(raw[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(raw[end - 1]))) --end;
    std::string out;
    out.reserve(end - begin);
    bool pending_sep = false;
    for (std::size_t i = begin; i < end; ++i) {
        char c = raw[i];
        if (std::isspace(static_cast<unsigned char>(c)) || c == '/') {
            pending_sep = true;
            continue;
        }
        if (pending_sep) {
            out += '_';
            pending_sep = false;
        }
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

int company_size_bucket_from_label(const std::string& normalized) {
    static const std::unordered_map<std::string, int> table = {
        {"1-10", 1},      {"11-50", 2},        {"51-200", 3},  {"201-500", 4},
        {"501-1000", 5},  {"1001-5000", 6},    {"5001+", 7},   {"5001-10000", 7},
        {"5000+", 7},     {"10000+", 7},       {"10001+", 7},  {"solo", 1},
        {"startup", 1},
    };
    auto it = table.find(normalized);
    return it == table.end() ? 0 : it->second;
}

int company_size_bucket_from_count(long long employees) {
    if (employees <= 0) return 0;
    if (employees <= 10) return 1;
    if (employees <= 50) return 2;
    if (employees <= 200) return 3;
    if (employees <= 500) return 4;
    if (employees <= 1000) return 5;
    if (employees <= 5000) return 6;
    return 7;
}

int seniority_code_from_token(const std::string& normalized) {
    static const std::unordered_map<std::string, int> table = {
        // 1: intern / junior
        {"intern", 1},
        {"junior", 1},
        {"trainee", 1},
        {"apprentice", 1},
        // 2: individual contributor
        {"ic", 2},
        {"individual_contributor", 2},
        {"engineer", 2},
        {"developer", 2},
        {"analyst", 2},
        {"associate", 2},
        {"consultant", 2},
        {"scientist", 2},
        {"specialist", 2},
        {"contributor", 2},
        // 3: senior IC
        {"senior", 3},
        {"senior_ic", 3},
        {"senior_engineer", 3},
        {"staff", 3},
        {"staff_engineer", 3},
        {"principal", 3},
        {"lead", 3},
        {"tech_lead", 3},
        // 4: manager / director
        {"manager", 4},
        {"senior_manager", 4},
        {"director", 4},
        {"senior_director", 4},
        {"head", 4},
        {"head_of", 4},
        // 5: VP
        {"vp", 5},
        {"avp", 5},
        {"svp", 5},
        {"evp", 5},
        {"vice_president", 5},
        // 6: C-level
        {"ceo", 6},
        {"cto", 6},
        {"cfo", 6},
        {"coo", 6},
        {"cpo", 6},
        {"cmo", 6},
        {"cio", 6},
        {"ciso", 6},
        {"chief", 6},
        {"c-level", 6},
        {"c_level", 6},
        {"clevel", 6},
        {"president", 6},
        {"chief_executive_officer", 6},
        {"chief_technology_officer", 6},
    };
    auto it = table.find(normalized);
    return it == table.end() ? 0 : it->second;
}

int prestige_tier_from_token(const std::string& normalized) {
    static const std::unordered_map<std::string, int> table = {
        {"top10", 4},  {"top_10", 4},  {"top-10", 4},   {"top10_global", 4},
        {"top50", 3},  {"top_50", 3},  {"top-50", 3},
        {"top100", 2}, {"top_100", 2}, {"top-100", 2},  {"top200", 2},
        {"ranked", 1}, {"known", 1},   {"accredited", 1},
    };
    auto it = table.find(normalized);
    return it == table.end() ? 0 : it->second;
}

int degree_level_from_token(const std::string& normalized) {
    static const std::unordered_map<std::string, int> table = {
        {"associate", 1}, {"associates", 1},
        {"bachelor", 2},  {"bachelors", 2}, {"bs", 2},   {"ba", 2},    {"bsc", 2},
        {"beng", 2},      {"undergraduate", 2},
        {"master", 3},    {"masters", 3},   {"ms", 3},   {"msc", 3},   {"ma", 3},
        {"mba", 3},       {"meng", 3},
        {"phd", 4},       {"doctorate", 4}, {"doctoral", 4}, {"dphil", 4}, {"md", 4},
    };
    auto it = table.find(normalized);
    return it == table.end() ? 0 : it->second;
}

bool is_stem_field(const std::string& normalized_field) {
    static const std::unordered_set<std::string> stem = {
        "computer_science",      "software_engineering",   "electrical_engineering",
        "mechanical_engineering", "chemical_engineering",  "civil_engineering",
        "aerospace_engineering", "bioengineering",         "biomedical_engineering",
        "materials_science",     "physics",                "mathematics",
        "applied_mathematics",   "statistics",             "data_science",
        "machine_learning",      "robotics",               "information_technology",
        "engineering",           "biology",                "molecular_biology",
        "biochemistry",          "chemistry",              "genetics",
        "neuroscience",          "pharmacology",           "medicine",
    };
    return stem.contains(normalized_field);
}

double field_relevance(const std::string& normalized_field, const std::string& normalized_industry) {
    using Row = std::unordered_map<std::string, double>;
    static const std::unordered_map<std::string, Row> table = {
        {"computer_science",
         {{"software", 1.0}, {"fintech", 0.5}, {"ecommerce", 0.5}, {"hardware", 0.5}, {"media", 0.5}}},
        {"software_engineering",
         {{"software", 1.0}, {"fintech", 0.5}, {"ecommerce", 0.5}, {"hardware", 0.5}, {"media", 0.5}}},
        {"information_technology", {{"software", 1.0}, {"hardware", 0.5}, {"ecommerce", 0.5}}},
        {"data_science",
         {{"software", 1.0}, {"fintech", 0.5}, {"healthcare", 0.5}, {"ecommerce", 0.5}, {"media", 0.5}}},
        {"machine_learning", {{"software", 1.0}, {"fintech", 0.5}, {"healthcare", 0.5}}},
        {"electrical_engineering", {{"hardware", 1.0}, {"software", 0.5}, {"energy", 0.5}}},
        {"mechanical_engineering", {{"hardware", 1.0}, {"energy", 0.5}}},
        {"aerospace_engineering", {{"hardware", 1.0}, {"energy", 0.5}}},
        {"robotics", {{"hardware", 1.0}, {"software", 0.5}}},
        {"civil_engineering", {{"hardware", 0.5}, {"energy", 0.5}}},
        {"chemical_engineering", {{"energy", 0.5}, {"biotech", 0.5}, {"hardware", 0.5}}},
        {"materials_science", {{"hardware", 0.5}, {"energy", 0.5}, {"biotech", 0.5}}},
        {"physics", {{"hardware", 0.5}, {"energy", 0.5}, {"software", 0.5}}},
        {"mathematics", {{"software", 0.5}, {"fintech", 0.5}}},
        {"applied_mathematics", {{"software", 0.5}, {"fintech", 0.5}}},
        {"statistics", {{"software", 0.5}, {"fintech", 0.5}, {"healthcare", 0.5}}},
        {"biology", {{"biotech", 1.0}, {"healthcare", 0.5}}},
        {"molecular_biology", {{"biotech", 1.0}, {"healthcare", 0.5}}},
        {"biochemistry", {{"biotech", 1.0}, {"healthcare", 0.5}}},
        {"genetics", {{"biotech", 1.0}, {"healthcare", 0.5}}},
        {"neuroscience", {{"biotech", 1.0}, {"healthcare", 0.5}}},
        {"pharmacology", {{"biotech", 1.0}, {"healthcare", 0.5}}},
        {"chemistry", {{"biotech", 0.5}, {"energy", 0.5}, {"healthcare", 0.5}}},
        {"bioengineering", {{"biotech", 1.0}, {"healthcare", 1.0}}},
        {"biomedical_engineering", {{"biotech", 1.0}, {"healthcare", 1.0}}},
        {"medicine", {{"healthcare", 1.0}, {"biotech", 0.5}}},
        {"nursing", {{"healthcare", 1.0}}},
        {"public_health", {{"healthcare", 1.0}}},
        {"economics", {{"fintech", 0.5}, {"vc_pe", 0.5}, {"ecommerce", 0.5}}},
        {"finance", {{"fintech", 1.0}, {"vc_pe", 1.0}}},
        {"business", {{"ecommerce", 0.5}, {"fintech", 0.5}, {"vc_pe", 0.5}, {"media", 0.5}}},
        {"business_administration",
         {{"ecommerce", 0.5}, {"fintech", 0.5}, {"vc_pe", 0.5}, {"media", 0.5}}},
        {"marketing", {{"media", 1.0}, {"ecommerce", 0.5}}},
        {"communications", {{"media", 1.0}}},
        {"journalism", {{"media", 1.0}}},
        {"design", {{"media", 0.5}, {"ecommerce", 0.5}, {"software", 0.5}}},
        {"education", {{"education", 1.0}}},
        {"law", {{"vc_pe", 0.5}, {"fintech", 0.5}}},
    };
    auto row = table.find(normalized_field);
    if (row == table.end()) return 0.0;
    auto cell = row->second.find(normalized_industry);
    return cell == row->second.end() ? 0.0 : cell->second;
}

bool is_prestige_penalty_industry(const std::string& normalized_industry) {
    static const std::unordered_set<std::string> penalty = {
        "biotech", "vc_pe", "vc", "pe", "venture_capital", "private_equity",
    };
    return penalty.contains(normalized_industry);
}

}  // namespace fsp
