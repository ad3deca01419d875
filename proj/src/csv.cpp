#include "mvnt/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "mvnt/errors.hpp"

namespace mvnt {

namespace {

std::vector<double> parse_row(const std::string& line, std::size_t lineno) {
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) comma = line.size();
        std::size_t b = pos, e = comma;
        while (b < e && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(line[e - 1]))) --e;
        double v;
        const auto [ptr, ec] = std::from_chars(line.data() + b, line.data() + e, v);
        if (ec != std::errc() || ptr != line.data() + e)
            throw CsvError("line " + std::to_string(lineno) + ": cannot parse field '" +
                           line.substr(pos, comma - pos) + "'");
        if (!std::isfinite(v))
            throw CsvError("line " + std::to_string(lineno) + ": non-finite value");
        row.push_back(v);
        pos = comma + 1;
        if (comma == line.size()) break;
    }
    return row;
}

}  // namespace

DataMatrix read_csv(std::istream& in, bool header) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (header && lineno == 1) continue;
        if (line.empty()) continue;
        rows.push_back(parse_row(line, lineno));
        if (rows.size() > 1 && rows.back().size() != rows.front().size())
            throw CsvError("line " + std::to_string(lineno) + ": ragged row");
    }
    if (rows.empty()) throw CsvError("no data rows");

    DataMatrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    return m;
}

DataMatrix read_csv_file(const std::string& path, bool header) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open '" + path + "'");
    return read_csv(in, header);
}

void write_csv(std::ostream& out, const Eigen::MatrixXd& m) {
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << m(i, j);
        }
        out << '\n';
    }
}

void write_csv_file(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot open '" + path + "' for writing");
    write_csv(out, m);
}

}  // namespace mvnt
