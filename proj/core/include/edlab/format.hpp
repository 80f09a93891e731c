#pragma once

#include <string>

namespace edlab {

/// Fixed 12-significant-digit rendering used by every CSV/JSON writer.
/// Negative zero prints as "0"; non-finite values print as "nan"/"inf"/"-inf".
std::string format_real(double value);

/// JSON number rendering: same digits as format_real, non-finite values become null.
std::string format_json_real(double value);

}  // namespace edlab
