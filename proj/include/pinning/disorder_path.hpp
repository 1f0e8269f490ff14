// Sampled disorder trajectories and their decomposition into strips, i.e.
// maximal constant runs of the disorder values.
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pinning/disorder_chain.hpp"
#include "pinning/rng.hpp"

namespace pinning {

struct DisorderPath {
    std::vector<int> states;      // X_1..X_N as indices into the chain
    std::vector<double> values;   // omega_n = f(X_n)
};

// Draws X_1 from mu0 and runs the chain forward. Streams are reproducible:
// the same (chain, n, seed) triple always yields the same path.
inline DisorderPath sample_path(const DisorderChain& chain, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_path: length must be >= 1");
    std::mt19937_64 eng = make_engine(seed);
    DisorderPath path;
    path.states.reserve(std::size_t(n));
    path.values.reserve(std::size_t(n));
    std::size_t x = sample_categorical(chain.mu0, eng);
    path.states.push_back(int(x));
    path.values.push_back(chain.scores[x]);
    const std::size_t m = chain.n_states();
    for (int i = 1; i < n; ++i) {
        x = sample_categorical(std::span<const double>(chain.Q.row(x), m), eng);
        path.states.push_back(int(x));
        path.values.push_back(chain.scores[x]);
    }
    return path;
}

struct StripDecomposition {
    // Right endpoints (1-based sites) of the complete strips; strip k covers
    // sites ends[k-1]+1 .. ends[k] with ends[-1] read as 0. The final run is
    // not closed by a change of value and is not counted.
    std::vector<int> ends;

    int complete_count() const { return int(ends.size()); }

    std::vector<int> lengths() const {
        std::vector<int> out;
        out.reserve(ends.size());
        int prev = 0;
        for (int e : ends) {
            out.push_back(e - prev);
            prev = e;
        }
        return out;
    }
};

// Splits a value sequence at every change of value. Values come from a finite
// score set, so exact floating-point comparison is the intended equality.
inline StripDecomposition strip_decompose(std::span<const double> values) {
    StripDecomposition d;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] != values[i - 1]) d.ends.push_back(int(i));
    return d;
}

inline StripDecomposition strip_decompose(const DisorderPath& path) {
    return strip_decompose(std::span<const double>(path.values));
}

}  // namespace pinning
