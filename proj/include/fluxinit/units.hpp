#pragma once

#include <numbers>

namespace fluxinit {

// Public APIs take ordinary frequencies in GHz and times in ns. Hamiltonian
// constructors convert to angular units (rad/ns) with this factor, once.
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double angular(double ghz) { return kTwoPi * ghz; }

}  // namespace fluxinit
