#pragma once

#include <string>

namespace mobility {

/// Shortest decimal string that round-trips to the same double. Used for all
/// serialized numbers so that identical inputs always produce identical bytes.
std::string format_double(double v);

/// "a,b,c" with round-tripping components.
std::string format_vec3_csv(double x, double y, double z);

}  // namespace mobility
