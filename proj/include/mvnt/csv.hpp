#pragma once

#include <iosfwd>
#include <string>

#include "mvnt/standardize.hpp"

namespace mvnt {

/// Reads an observation matrix: one observation per row, comma-separated,
/// '.' decimal point. With header=true the first line is skipped. Rejects
/// NaN/Inf, ragged rows and empty input (CsvError).
DataMatrix read_csv(std::istream& in, bool header = false);
DataMatrix read_csv_file(const std::string& path, bool header = false);

void write_csv(std::ostream& out, const Eigen::MatrixXd& m);
void write_csv_file(const std::string& path, const Eigen::MatrixXd& m);

}  // namespace mvnt
