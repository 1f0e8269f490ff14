// Quenched-side engine: log partition functions for a fixed disorder
// realization, their annealed (disorder-averaged) counterpart, pinned
// variants, and the Monte Carlo estimator of the quenched free energy.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pinning/disorder_chain.hpp"
#include "pinning/disorder_path.hpp"
#include "pinning/numeric.hpp"
#include "pinning/parallel.hpp"
#include "pinning/renewal_dp.hpp"
#include "pinning/renewal_kernel.hpp"
#include "pinning/rng.hpp"

namespace pinning {

struct QuenchedOptions {
    int site_cap = 20000;   // refuse DP runs longer than this
};

struct PartitionResult {
    int n = 0;
    double log_value = 0.0;
    std::string variant;   // "quenched" | "annealed" | "pinned"
};

// log Z_N for the disorder sequence omega (site n has energy beta*omega_n + h),
// pinned at N.
inline PartitionResult quenched_logZ(const RenewalKernel& kernel, std::span<const double> omega,
                                     double beta, double h, const QuenchedOptions& opt = {}) {
    const int n = int(omega.size());
    if (n < 1) throw std::invalid_argument("quenched_logZ: empty disorder sequence");
    if (n > opt.site_cap) throw std::invalid_argument("quenched_logZ: length exceeds site cap");
    std::vector<double> w(std::size_t(n), 0.0);
    for (int i = 0; i < n; ++i) w[std::size_t(i)] = beta * omega[std::size_t(i)] + h;
    return {n, renewal_log_partition(w, kernel), "quenched"};
}

// log E Z_N over the disorder chain, same pinning convention.
inline PartitionResult annealed_logZ(const RenewalKernel& kernel, const DisorderChain& chain,
                                     double beta, double h, int n, const QuenchedOptions& opt = {}) {
    if (n < 1) throw std::invalid_argument("annealed_logZ: length must be >= 1");
    if (n > opt.site_cap) throw std::invalid_argument("annealed_logZ: length exceeds site cap");
    return {n, annealed_log_partition(kernel, chain, beta, h, n), "annealed"};
}

// log of the partition function additionally constrained to renew at every
// pin. Pins must be strictly increasing sites in 1..N with N itself included;
// the product over the pinned segments then factorizes exactly.
inline PartitionResult pinned_logZ(const RenewalKernel& kernel, std::span<const double> omega,
                                   double beta, double h, std::span<const int> pins,
                                   const QuenchedOptions& opt = {}) {
    const int n = int(omega.size());
    if (n < 1) throw std::invalid_argument("pinned_logZ: empty disorder sequence");
    if (n > opt.site_cap) throw std::invalid_argument("pinned_logZ: length exceeds site cap");
    if (pins.empty() || pins.back() != n)
        throw std::invalid_argument("pinned_logZ: pin set must contain the endpoint");
    int prev = 0;
    KahanSum total;
    std::vector<double> w;
    for (int p : pins) {
        if (p <= prev || p > n)
            throw std::invalid_argument("pinned_logZ: pins must be strictly increasing sites in 1..N");
        w.clear();
        for (int i = prev; i < p; ++i) w.push_back(beta * omega[std::size_t(i)] + h);
        total.add(renewal_log_partition(w, kernel));
        prev = p;
    }
    return {n, total.value(), "pinned"};
}

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    int samples = 0;
};

namespace detail {

inline McEstimate summarize(const std::vector<double>& values) {
    McEstimate est;
    est.samples = int(values.size());
    if (values.empty()) return est;
    est.mean = pairwise_sum(values) / double(values.size());
    if (values.size() > 1) {
        std::vector<double> sq(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double d = values[i] - est.mean;
            sq[i] = d * d;
        }
        est.std_error =
            std::sqrt(pairwise_sum(sq) / (double(values.size()) * double(values.size() - 1)));
    }
    return est;
}

}  // namespace detail

// Sample mean and standard error of (1/N) log Z_N over independent disorder
// draws. Sample i uses the derived stream (seed, i), so the estimate is a
// pure function of (chain, kernel, beta, h, n, samples, seed).
inline McEstimate mc_quenched_free_energy(const RenewalKernel& kernel, const DisorderChain& chain,
                                          double beta, double h, int n, int samples,
                                          std::uint64_t seed, const QuenchedOptions& opt = {}) {
    if (samples < 1) throw std::invalid_argument("mc_quenched_free_energy: need at least 1 sample");
    std::vector<double> values(std::size_t(samples), 0.0);
    parallel_for(samples, [&](int i) {
        const DisorderPath path = sample_path(chain, n, derive_seed(seed, std::uint64_t(i)));
        values[std::size_t(i)] =
            quenched_logZ(kernel, path.values, beta, h, opt).log_value / double(n);
    });
    return detail::summarize(values);
}

}  // namespace pinning
