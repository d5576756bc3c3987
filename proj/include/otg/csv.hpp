#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "otg/errors.hpp"

namespace otg {

// Numeric CSV: one row per record, comma-separated decimals, optional single
// header row (skipped when any field fails to parse as a number).
inline std::vector<std::vector<double>> read_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
                if (used != cell.size()) numeric = false;
            } catch (...) {
                numeric = false;
            }
            if (!numeric) break;
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue;  // header row
            }
            throw Error("csv: non-numeric field in line: " + line);
        }
        first = false;
        if (!rows.empty() && rows.front().size() != row.size()) throw Error("csv: ragged rows");
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<std::vector<double>> read_csv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open csv file '" + path + "'");
    return read_csv(f);
}

}  // namespace otg
