#pragma once

#include <optional>
#include <string>

namespace fairness {

// Decimal rendering with 12 significant digits. Negative zero prints as 0.
std::string format_number(double value);

// "undefined" for nullopt.
std::string format_number(const std::optional<double>& value);

// Shortest round-trip rendering, used for dataset scores.
std::string format_exact(double value);

}  // namespace fairness
