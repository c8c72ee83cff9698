#pragma once

#include <string>

namespace satrisk {

/// Renders a value with the given number of significant digits ("%.*g",
/// C locale). Negative zero is rendered as "0".
std::string fmt_value(double v, int significant = 12);

} // namespace satrisk
