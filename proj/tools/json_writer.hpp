#pragma once

#include <ostream>
#include <string>

#include "json.hpp"

namespace ces::cli {

using Document = nlohmann::ordered_json;

/// Pretty-prints with two-space indentation. Floating-point values are
/// written with 17 significant digits so they parse back to the same double;
/// non-finite values become null.
void write_json(std::ostream& out, const Document& doc);

std::string format_double(double v);

}  // namespace ces::cli
