#ifndef CAULK_CSV_HPP
#define CAULK_CSV_HPP

#include <sstream>
#include <string>
#include <vector>

#include "caulk/common.hpp"

namespace caulk {

/// CSV contract: '.' decimals, ',' separators, LF endings, header always
/// present. Values are shortest-round-trip decimals, so files are bit-exact
/// for identical inputs.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header) : cols_(header.size()) {
        for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
        os_ << "\n";
    }

    CsvWriter& cell(const std::string& v) {
        os_ << (in_row_ ? "," : "") << v;
        in_row_ = true;
        ++row_cells_;
        return *this;
    }

    CsvWriter& cell(double v) { return cell(format_double(v)); }
    CsvWriter& cell(int v) { return cell(std::to_string(v)); }

    void end_row() {
        require(row_cells_ == cols_, "csv: row has " + std::to_string(row_cells_) + " cells, expected " +
                                         std::to_string(cols_));
        os_ << "\n";
        in_row_ = false;
        row_cells_ = 0;
    }

    std::string str() const { return os_.str(); }

  private:
    std::ostringstream os_;
    std::size_t cols_;
    std::size_t row_cells_ = 0;
    bool in_row_ = false;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return int(i);
        throw Error("csv: missing column '" + name + "'");
    }

    double num(std::size_t row, int col) const {
        const std::string& s = rows[row][std::size_t(col)];
        char* end = nullptr;
        double v = std::strtod(s.c_str(), &end);
        require(end != s.c_str() && *end == '\0', "csv: non-numeric cell '" + s + "'");
        return v;
    }
};

inline CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream is(text);
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && is.eof()) break;
        std::vector<std::string> cells;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                cells.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        cells.push_back(cur);
        if (first) {
            t.header = cells;
            first = false;
        } else {
            require(cells.size() == t.header.size(), "csv: ragged row '" + line + "'");
            t.rows.push_back(cells);
        }
    }
    require(!t.header.empty(), "csv: empty input");
    return t;
}

}  // namespace caulk

#endif  // CAULK_CSV_HPP
