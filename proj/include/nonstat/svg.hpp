#pragma once

#include "nonstat/series.hpp"

#include <string>
#include <vector>

namespace nonstat {

/// Line chart of every component with dashed vertical markers at the change points.
std::string line_chart_svg(const MultivariateSeries& s, const std::vector<Index>& change_points,
                           const std::string& title = {});

void write_svg_file(const std::string& path, const std::string& svg);

}  // namespace nonstat
