#pragma once

#include <string>
#include <string_view>

namespace sivo {

/// Shortest decimal text that round-trips `value`; locale-independent.
std::string format_number(double value);

/// Locale-independent strict parse of a whole token. Returns false on
/// trailing garbage or an empty token.
bool parse_number(std::string_view token, double& value);

}  // namespace sivo
