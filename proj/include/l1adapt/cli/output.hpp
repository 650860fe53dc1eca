#pragma once

#include <json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "l1adapt/margin.hpp"
#include "l1adapt/reference_analysis.hpp"
#include "l1adapt/sim_engine.hpp"

namespace l1adapt::cli {

/// 12 significant digits, "inf"/"-inf"/"nan" for non-finite values.
std::string format_number(double v);

/// Writes the trace as CSV. `series` selects column groups (see known_series);
/// empty selects the default schema. Columns the trace lacks are dropped and
/// listed on a leading "# omitted:" line.
void write_trace_csv(std::ostream& out, const SimTrace& trace,
                     const std::vector<std::string>& series = {});

void write_lambda_csv(std::ostream& out, const LambdaSweep& sweep);

void write_margin_csv(std::ostream& out, const MarginCurve& curve);

/// Bounds report as JSON; infinite bounds are written as "unbounded".
nlohmann::json bounds_report_json(const BoundsReport& report);

}  // namespace l1adapt::cli
