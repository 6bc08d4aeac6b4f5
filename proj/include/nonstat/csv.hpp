#pragma once

#include "nonstat/series.hpp"

#include <iosfwd>
#include <string>

namespace nonstat {

enum class HeaderMode { Auto, Present, Absent };

struct CsvOptions {
    /// Auto treats the first row as a header when any of its cells is not a number.
    HeaderMode header = HeaderMode::Auto;
};

/// Reads a comma-separated numeric table. A leading column named "time" or
/// "timestamp" is dropped with a warning.
///
/// Errors: EmptyInput for a file without data rows, ParseError (1-based row and
/// column) for ragged rows and non-numeric or non-finite cells.
MultivariateSeries load_csv(std::istream& source, const CsvOptions& options = {});
MultivariateSeries load_csv_file(const std::string& path, const CsvOptions& options = {});

/// Writes a header row of component names followed by one row per time step,
/// using shortest round-trip decimal formatting.
void write_csv(std::ostream& sink, const MultivariateSeries& s);
void write_csv_file(const std::string& path, const MultivariateSeries& s);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace nonstat
