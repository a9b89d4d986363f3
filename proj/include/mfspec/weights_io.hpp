#ifndef MFSPEC_WEIGHTS_IO_HPP
#define MFSPEC_WEIGHTS_IO_HPP

#include <string>

#include "mfspec/measure.hpp"

namespace mfspec {

// Weight files are JSON objects:
//
//   { "base": 5, "weights": [0.35, 0.14, "0.01", ...] }
//
// Entries may be JSON numbers or decimal strings; both are parsed to binary
// exactly once. Output uses the shortest decimal that round-trips to the
// same double.

WeightSystem parse_weights(const std::string& text);
std::string format_weights(const WeightSystem& ws);

WeightSystem read_weight_file(const std::string& path);
void write_weight_file(const std::string& path, const WeightSystem& ws);

}  // namespace mfspec

#endif  // MFSPEC_WEIGHTS_IO_HPP
