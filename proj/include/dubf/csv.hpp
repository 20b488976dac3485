#pragma once

#include <string>

namespace dubf {

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

}  // namespace dubf
