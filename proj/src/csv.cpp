#include "nonstat/csv.hpp"

#include "nonstat/error.hpp"
#include "nonstat/log.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string_view>
#include <vector>

namespace nonstat {

namespace {

WarningSink& sink_ref() {
    static WarningSink sink = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };
    return sink;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_row(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return cells;
}

std::optional<double> parse_number(std::string_view cell) {
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    if (ec != std::errc{} || ptr != end || cell.empty()) return std::nullopt;
    return value;
}

std::string unquote(std::string_view s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

bool is_time_name(std::string name) {
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return name == "time" || name == "timestamp";
}

}  // namespace

WarningSink set_warning_sink(WarningSink sink) {
    auto previous = std::move(sink_ref());
    sink_ref() = std::move(sink);
    return previous;
}

void warn(const std::string& message) {
    if (sink_ref()) sink_ref()(message);
}

MultivariateSeries load_csv(std::istream& source, const CsvOptions& options) {
    std::vector<std::string> lines;
    std::vector<std::size_t> line_numbers;
    std::string line;
    std::size_t number = 0;
    while (std::getline(source, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (number == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        lines.push_back(std::move(line));
        line_numbers.push_back(number);
    }
    if (lines.empty()) throw EmptyInput("CSV source is empty");

    const auto first = split_row(lines.front());
    bool has_header = options.header == HeaderMode::Present;
    if (options.header == HeaderMode::Auto) {
        has_header = std::any_of(first.begin(), first.end(),
                                 [](std::string_view c) { return !parse_number(c).has_value(); });
    }

    const std::size_t columns = first.size();
    std::vector<std::string> names;
    if (has_header) {
        for (auto cell : first) names.push_back(unquote(cell));
    }
    const std::size_t data_begin = has_header ? 1 : 0;
    if (lines.size() <= data_begin) throw EmptyInput("CSV source has a header but no data rows");

    const bool drop_time = has_header && is_time_name(names.front()) && columns > 1;
    if (drop_time) {
        warn("dropping time column '" + names.front() + "'; series are indexed by row");
        names.erase(names.begin());
    }
    const std::size_t skip = drop_time ? 1 : 0;

    const auto rows = static_cast<Index>(lines.size() - data_begin);
    Eigen::MatrixXd values(rows, static_cast<Index>(columns - skip));
    for (std::size_t r = data_begin; r < lines.size(); ++r) {
        const auto cells = split_row(lines[r]);
        if (cells.size() != columns) {
            throw ParseError(line_numbers[r], 0,
                             "expected " + std::to_string(columns) + " columns, found " +
                                 std::to_string(cells.size()));
        }
        for (std::size_t c = skip; c < columns; ++c) {
            const auto value = parse_number(cells[c]);
            if (!value) {
                throw ParseError(line_numbers[r], c + 1,
                                 "'" + std::string(cells[c]) + "' is not a number");
            }
            if (!std::isfinite(*value)) {
                throw ParseError(line_numbers[r], c + 1, "non-finite value; missing data is not imputed");
            }
            values(static_cast<Index>(r - data_begin), static_cast<Index>(c - skip)) = *value;
        }
    }
    return MultivariateSeries(std::move(values), std::move(names));
}

MultivariateSeries load_csv_file(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    return load_csv(in, options);
}

std::string format_double(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    (void)ec;
    return std::string(buffer, ptr);
}

void write_csv(std::ostream& sink, const MultivariateSeries& s) {
    const auto& names = s.names();
    for (std::size_t j = 0; j < names.size(); ++j) sink << (j ? "," : "") << names[j];
    sink << '\n';
    const auto& x = s.values();
    for (Index t = 0; t < x.rows(); ++t) {
        for (Index j = 0; j < x.cols(); ++j) sink << (j ? "," : "") << format_double(x(t, j));
        sink << '\n';
    }
}

void write_csv_file(const std::string& path, const MultivariateSeries& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    write_csv(out, s);
}

}  // namespace nonstat
