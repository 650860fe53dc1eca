#pragma once

#include <string>

#include "l1adapt/controllers.hpp"

namespace l1adapt::cli {

/// Parses a rational expression in s such as "1/(s+160)", "(3*50^2 s + 50^3)/(s+50)^3"
/// or "2s/(s^2+1.4s+1)". Juxtaposition multiplies; '^' takes a nonnegative integer.
/// Common factors are not cancelled. Throws Error(kParse) with the column on failure.
TransferFunction parse_tf_expression(const std::string& text);

}  // namespace l1adapt::cli
