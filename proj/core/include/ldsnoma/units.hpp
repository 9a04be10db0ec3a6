#pragma once

#include <cmath>

namespace ldsnoma {

/// Conversion factor from nats to bits (1/ln 2). All internal rates are in
/// nats per channel use; conversion to bits happens once, at output time.
inline constexpr double kNatsToBits = 1.4426950408889634;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace ldsnoma
