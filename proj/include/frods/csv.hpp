// CSV emission and ingestion for run results. Values are printed with 17
// significant digits so files round-trip doubles exactly and serial runs are
// byte-stable.

#pragma once

#include <string>
#include <vector>

namespace frods {

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    int column_index(const std::string& name) const; // -1 when absent
    std::vector<double> column(const std::string& name) const;
};

std::string format_csv(const CsvTable& table);
void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

} // namespace frods
