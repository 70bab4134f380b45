#include "fairness/format.hpp"

#include <charconv>
#include <cstdio>

namespace fairness {

std::string format_number(double value) {
  if (value == 0.0) value = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string format_number(const std::optional<double>& value) {
  return value ? format_number(*value) : std::string("undefined");
}

std::string format_exact(double value) {
  if (value == 0.0) value = 0.0;
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

}  // namespace fairness
