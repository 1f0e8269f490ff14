// Truncated heavy-tailed return-time law K(n) ~ L(n) n^{-(1+alpha)} on
// {1, ..., cutoff}, normalized to a probability law. Normalization happens in
// tail space: the survival function is computed first from extended-precision
// partial sums and the point masses are recovered as its exact increments, so
//   tail(0) == 1,  tail(cutoff) == 0,  tail(n-1) - tail(n) == prob(n)
// hold exactly in double arithmetic.
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pinning/numeric.hpp"

namespace pinning {

enum class SlowVariationKind { constant, log_power, table };

struct SlowVariation {
    SlowVariationKind kind = SlowVariationKind::constant;
    double rho = 0.0;                // exponent for log_power: L(n) = log(1+n)^rho
    std::vector<double> table;       // explicit L(n) values for n = 1..cutoff

    static SlowVariation constant() { return {}; }
    static SlowVariation log_power(double rho) {
        return {SlowVariationKind::log_power, rho, {}};
    }
    static SlowVariation from_table(std::vector<double> values) {
        return {SlowVariationKind::table, 0.0, std::move(values)};
    }
};

struct RenewalKernel {
    double alpha = 0.0;
    SlowVariation variation;
    int cutoff = 0;                  // largest return time with positive mass
    std::vector<double> probs;       // probs[n-1] = K(n), n = 1..cutoff
    std::vector<double> tail;        // tail[n] = P(t > n), n = 0..cutoff

    double prob(int n) const {
        if (n < 1 || n > cutoff) return 0.0;
        return probs[std::size_t(n - 1)];
    }
    double tail_mass(int n) const {
        if (n < 0) return 1.0;
        if (n >= cutoff) return 0.0;
        return tail[std::size_t(n)];
    }
    double mean_gap() const {
        KahanSum s;
        for (int n = 1; n <= cutoff; ++n) s.add(double(n) * probs[std::size_t(n - 1)]);
        return s.value();
    }
};

namespace detail {

inline RenewalKernel normalize_weights(double alpha, SlowVariation variation, int cutoff,
                                       const std::vector<long double>& w) {
    // Backward partial sums W[n] = sum_{l >= n} w(l); tails are ratios of these.
    std::vector<long double> back(std::size_t(cutoff) + 2, 0.0L);
    for (int n = cutoff; n >= 1; --n) back[std::size_t(n)] = back[std::size_t(n) + 1] + w[std::size_t(n)];
    const long double total = back[1];
    if (!(total > 0.0L) || !std::isfinite(double(total)))
        throw std::invalid_argument("build_kernel: weight normalization is degenerate");

    RenewalKernel k;
    k.alpha = alpha;
    k.variation = std::move(variation);
    k.cutoff = cutoff;
    k.tail.resize(std::size_t(cutoff) + 1);
    for (int n = 0; n <= cutoff; ++n) k.tail[std::size_t(n)] = double(back[std::size_t(n) + 1] / total);
    k.probs.resize(std::size_t(cutoff));
    for (int n = 1; n <= cutoff; ++n)
        k.probs[std::size_t(n - 1)] = k.tail[std::size_t(n - 1)] - k.tail[std::size_t(n)];
    for (int n = 1; n <= cutoff; ++n)
        if (!(k.probs[std::size_t(n - 1)] > 0.0))
            throw std::invalid_argument("build_kernel: zero mass at n=" + std::to_string(n) +
                                        " after normalization (cutoff too large for this tail)");
    return k;
}

}  // namespace detail

inline RenewalKernel build_kernel(double alpha, const SlowVariation& variation, int cutoff) {
    if (cutoff < 2) throw std::invalid_argument("build_kernel: cutoff must be >= 2");
    if (!(alpha >= 0.0) || !(alpha <= 2.0))
        throw std::invalid_argument("build_kernel: alpha must lie in [0, 2]");
    if (variation.kind == SlowVariationKind::log_power && !std::isfinite(variation.rho))
        throw std::invalid_argument("build_kernel: rho must be finite");
    if (variation.kind == SlowVariationKind::table &&
        variation.table.size() < std::size_t(cutoff))
        throw std::invalid_argument("build_kernel: variation table shorter than cutoff");

    std::vector<long double> w(std::size_t(cutoff) + 1, 0.0L);
    for (int n = 1; n <= cutoff; ++n) {
        double L = 1.0;
        switch (variation.kind) {
            case SlowVariationKind::constant: break;
            case SlowVariationKind::log_power: L = std::pow(std::log1p(double(n)), variation.rho); break;
            case SlowVariationKind::table: L = variation.table[std::size_t(n - 1)]; break;
        }
        if (!(L > 0.0) || !std::isfinite(L))
            throw std::invalid_argument("build_kernel: slow variation must be positive and finite");
        w[std::size_t(n)] = (long double)(L)*std::pow((long double)(n), -(1.0L + (long double)alpha));
    }
    return detail::normalize_weights(alpha, variation, cutoff, w);
}

// Normalizes an explicit positive weight table w(1..T) into a kernel. Used by
// the enumeration oracles and tests to pin down tiny bespoke return laws.
inline RenewalKernel build_kernel_from_table(double alpha, std::span<const double> weights) {
    const int cutoff = int(weights.size());
    if (cutoff < 2) throw std::invalid_argument("build_kernel_from_table: need at least 2 weights");
    std::vector<long double> w(std::size_t(cutoff) + 1, 0.0L);
    for (int n = 1; n <= cutoff; ++n) {
        const double v = weights[std::size_t(n - 1)];
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("build_kernel_from_table: weights must be positive and finite");
        w[std::size_t(n)] = v;
    }
    return detail::normalize_weights(alpha, SlowVariation::from_table({weights.begin(), weights.end()}),
                                     cutoff, w);
}

}  // namespace pinning
