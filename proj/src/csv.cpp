#include "qdyn/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qdyn/types.hpp"

namespace qdyn {

std::string CsvWriter::format(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter& CsvWriter::comment(const std::string& line) {
    lines_.push_back("# " + line);
    return *this;
}

CsvWriter& CsvWriter::header(const std::vector<std::string>& names) {
    columns_ = names.size();
    std::string h;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) h += ",";
        h += names[i];
    }
    lines_.push_back(h);
    return *this;
}

CsvWriter& CsvWriter::row(const std::vector<double>& values) {
    if (columns_ && values.size() != columns_) throw Error("csv: row width mismatch");
    std::string r;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) r += ",";
        r += format(values[i]);
    }
    lines_.push_back(r);
    return *this;
}

CsvWriter& CsvWriter::raw_row(const std::vector<std::string>& cells) {
    if (columns_ && cells.size() != columns_) throw Error("csv: row width mismatch");
    std::string r;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) r += ",";
        r += cells[i];
    }
    lines_.push_back(r);
    return *this;
}

std::string CsvWriter::str() const {
    std::string out;
    for (const auto& l : lines_) {
        out += l;
        out += "\n";
    }
    return out;
}

void CsvWriter::write(const std::filesystem::path& path) const {
    std::ofstream f(path);
    if (!f) throw Error("csv: cannot open " + path.string() + " for writing");
    f << str();
    if (!f) throw Error("csv: write failed for " + path.string());
}

std::vector<double> CsvTable::column(const std::string& name) const {
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] != name) continue;
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r.at(c));
        return out;
    }
    throw Error("csv: no column named " + name);
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw Error("csv: cannot open " + path.string());
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            table.comments.push_back(line);
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!have_header) {
            table.header = cells;
            have_header = true;
            continue;
        }
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(std::stod(c));
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace qdyn
