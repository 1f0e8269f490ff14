// Seed derivation and sampling primitives. Every Monte Carlo routine takes an
// explicit 64-bit seed; per-sample engines are derived with a splitmix-style
// mix so that (seed, stream) pairs give independent, reproducible streams.
#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace pinning {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
    return std::mt19937_64(derive_seed(seed, stream));
}

inline double uniform01(std::mt19937_64& eng) {
    // 53-bit mantissa draw in [0, 1)
    return double(eng() >> 11) * 0x1.0p-53;
}

// Inverse-CDF draw from a finite distribution. Probabilities are assumed
// nonnegative with sum ~ 1; any rounding slack is absorbed by the last state.
inline std::size_t sample_categorical(std::span<const double> probs, std::mt19937_64& eng) {
    if (probs.empty()) throw std::invalid_argument("sample_categorical: empty distribution");
    const double u = uniform01(eng);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    return probs.size() - 1;
}

}  // namespace pinning
