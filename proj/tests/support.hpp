#pragma once

#include <cmath>
#include <cstdint>

#include "fluxinit/circuit_spectrum.hpp"

namespace fluxinit::testing {

// splitmix64: small seeded generator for property draws, independent of the library RNG.
class Draws {
public:
    explicit Draws(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Marsaglia polar method.
    double gauss() {
        double u, v, s;
        do {
            u = uniform(-1.0, 1.0);
            v = uniform(-1.0, 1.0);
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        return u * std::sqrt(-2.0 * std::log(s) / s);
    }

private:
    std::uint64_t state_;
};

inline constexpr CircuitParams kQubitA{1.531, 0.685, 4.164, 0.0};
inline constexpr CircuitParams kQubitB{1.524, 0.693, 4.275, 0.0};
inline constexpr double kOmegaRA = 6.503;
inline constexpr double kOmegaRB = 6.686;

}  // namespace fluxinit::testing
