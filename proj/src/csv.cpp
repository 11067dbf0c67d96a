#include "frods/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace frods {

int CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

std::vector<double> CsvTable::column(const std::string& name) const {
    const int idx = column_index(name);
    if (idx < 0) throw std::invalid_argument("csv: no column named '" + name + "'");
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row[static_cast<std::size_t>(idx)]);
    return out;
}

std::string format_csv(const CsvTable& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        out += table.columns[i];
    }
    out += '\n';
    char buf[40];
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw std::invalid_argument("csv: row width differs from header");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("csv: cannot open for writing: " + path);
    out << format_csv(table);
    if (!out) throw std::runtime_error("csv: write failed: " + path);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open: " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty file: " + path);
    {
        std::istringstream header(line);
        std::string name;
        while (std::getline(header, name, ',')) table.columns.push_back(name);
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string field;
        std::vector<double> row;
        while (std::getline(fields, field, ',')) {
            try {
                row.push_back(std::stod(field));
            } catch (const std::exception&) {
                throw std::runtime_error("csv: bad number at " + path + ":" +
                                         std::to_string(lineno));
            }
        }
        if (row.size() != table.columns.size())
            throw std::runtime_error("csv: row width mismatch at " + path + ":" +
                                     std::to_string(lineno));
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace frods
