#pragma once

namespace slbec::constants {

inline constexpr double c = 299792458.0;           // m/s
inline constexpr double hbar = 1.054571817e-34;    // J s

}  // namespace slbec::constants
