#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace fsp {

// Minimal RFC-4180 CSV. Career columns hold embedded JSON, so quoted fields
// with commas, doubled quotes and newlines must survive a round trip.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);
CsvTable read_csv_text(const std::string& text);

std::string csv_escape(const std::string& field);
std::string csv_join_row(const std::vector<std::string>& fields);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace fsp
