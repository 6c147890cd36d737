#pragma once

#include <string>
#include <vector>

namespace gfen {

// Minimal CSV support: comma-separated, first row is a header, no quoting.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 if absent
    int require_column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);

std::vector<std::string> split_csv_line(const std::string& line);

// Doubles are written with enough digits to round-trip, so repeated runs of a
// deterministic pipeline produce byte-identical files.
std::string format_double(double x);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace gfen
