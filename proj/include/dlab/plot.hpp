#pragma once

#include <string>

#include "dlab/suites.hpp"

namespace dlab {

/// Scatter/line chart with labelled axes. Points with a non-positive
/// coordinate on a log axis are dropped; throws Error(domain) when no point
/// is left to draw.
std::string render_svg(const PlotSpec& plot);

/// Reads {"title", "xlabel", "ylabel", "logx", "logy", "series": [{"label",
/// "x", "y", "line"}]}; throws Error(parse) on malformed input.
PlotSpec plot_spec_from_json(const Json& j);

}  // namespace dlab
