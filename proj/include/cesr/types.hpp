#ifndef CESR_TYPES_HPP
#define CESR_TYPES_HPP

#include <cstdint>
#include <limits>

namespace cesr {

using NodeId = std::uint32_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Bits per megabit; rates are Mb/s and costs J/Mb throughout.
inline constexpr double kBitsPerMb = 1e6;

} // namespace cesr

#endif // CESR_TYPES_HPP
