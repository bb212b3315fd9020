#ifndef QDYN_CSV_HPP
#define QDYN_CSV_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace qdyn {

/// Column-oriented CSV writer with deterministic %.17g float formatting.
/// Comment lines (prefixed '#') may precede the header row.
class CsvWriter {
public:
    CsvWriter& comment(const std::string& line);
    CsvWriter& header(const std::vector<std::string>& names);
    CsvWriter& row(const std::vector<double>& values);
    CsvWriter& raw_row(const std::vector<std::string>& cells);
    void write(const std::filesystem::path& path) const;
    std::string str() const;

    static std::string format(double v);

private:
    std::vector<std::string> lines_;
    std::size_t columns_ = 0;
};

struct CsvTable {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace qdyn

#endif
