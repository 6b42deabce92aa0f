#pragma once

#include <string>
#include <string_view>

namespace pulsesync {

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

// Strict parse of a whole token; throws ValidationError on garbage.
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

}  // namespace pulsesync
