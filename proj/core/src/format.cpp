#include "edlab/format.hpp"

#include <cmath>
#include <cstdio>

namespace edlab {

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

std::string format_json_real(double value) {
  if (!std::isfinite(value)) return "null";
  return format_real(value);
}

}  // namespace edlab
