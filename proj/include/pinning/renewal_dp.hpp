// Partition-function recursions over renewal configurations pinned at the
// right endpoint:
//   Z(0) = 1,   Z(n) = e^{w(n)} sum_{m=max(0,n-cutoff)}^{n-1} Z(m) K(n-m).
//
// Magnitudes span hundreds of orders across a trajectory, so values are kept
// in linear space relative to a per-block log offset: sites are grouped into
// blocks that share one offset, the inner convolution runs in plain doubles,
// and a single log/exp pair per (site, block) recombines the contributions.
// A block is closed when it grows past a fixed length or its values drift too
// far from the offset.
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "pinning/disorder_chain.hpp"
#include "pinning/numeric.hpp"
#include "pinning/renewal_kernel.hpp"

namespace pinning {

namespace detail {

constexpr double kBlockDriftLimit = 600.0;   // e^{+-600} stays comfortably finite
constexpr int kMaxBlockLen = 64;

struct ScaleBlock {
    int start;       // first site of the block
    double offset;   // log scale shared by the block's z values
};

}  // namespace detail

// log Z(N) for site weights w(1..N) (index 0 of the span is site 1).
inline double renewal_log_partition(std::span<const double> site_log_weight,
                                    const RenewalKernel& kernel) {
    const int n_sites = int(site_log_weight.size());
    if (n_sites < 1) throw std::invalid_argument("renewal_log_partition: empty weight vector");
    const int tk = kernel.cutoff;
    const double* K = kernel.probs.data();

    std::vector<double> z(std::size_t(n_sites) + 1, 0.0);
    z[0] = 1.0;
    std::vector<detail::ScaleBlock> blocks{{0, 0.0}};
    double log_z = 0.0;

    for (int n = 1; n <= n_sites; ++n) {
        const int lo = n - tk > 0 ? n - tk : 0;
        double best = -std::numeric_limits<double>::infinity();
        double acc = 0.0;
        for (int j = int(blocks.size()) - 1; j >= 0; --j) {
            const int bend = (j + 1 < int(blocks.size())) ? blocks[std::size_t(j) + 1].start : n;
            if (bend - 1 < lo) break;   // this block and all older ones are out of the window
            const int bstart = blocks[std::size_t(j)].start;
            const int mlo = bstart > lo ? bstart : lo;
            const int mhi = bend - 1 < n - 1 ? bend - 1 : n - 1;
            if (mlo > mhi) continue;
            double inner = 0.0;
            for (int m = mlo; m <= mhi; ++m) inner += z[std::size_t(m)] * K[n - m - 1];
            if (!(inner > 0.0)) continue;
            const double t = blocks[std::size_t(j)].offset + std::log(inner);
            if (t <= best) {
                acc += std::exp(t - best);
            } else {
                acc = acc * std::exp(best - t) + 1.0;
                best = t;
            }
        }
        if (!(acc > 0.0)) throw std::runtime_error("renewal_log_partition: underflow across blocks");
        log_z = site_log_weight[std::size_t(n - 1)] + best + std::log(acc);

        const detail::ScaleBlock& cur = blocks.back();
        if (n - cur.start >= detail::kMaxBlockLen ||
            std::abs(log_z - cur.offset) > detail::kBlockDriftLimit)
            blocks.push_back({n, log_z});
        z[std::size_t(n)] = std::exp(log_z - blocks.back().offset);
    }
    return log_z;
}

// log E Z(N): same recursion on state-resolved mass vectors
//   V(0, x) = mu0(x),
//   V(n, y) = e^{beta f(y) + h} sum_{t} K(t) sum_x V(n-t, x) Q^t(x, y),
// returning log sum_y V(N, y). Components may vanish for periodic chains; the
// total never does.
inline double annealed_log_partition(const RenewalKernel& kernel, const DisorderChain& chain,
                                     double beta, double h, int n_sites) {
    if (n_sites < 1) throw std::invalid_argument("annealed_log_partition: length must be >= 1");
    const int tk = kernel.cutoff;
    const std::size_t s = chain.n_states();
    const double* K = kernel.probs.data();
    const int tmax = n_sites < tk ? n_sites : tk;

    // Q^t entries for t = 0..tmax, flattened t-major
    std::vector<double> qt(std::size_t(tmax + 1) * s * s, 0.0);
    for (std::size_t x = 0; x < s; ++x) qt[x * s + x] = 1.0;
    for (int t = 1; t <= tmax; ++t) {
        const double* prev = qt.data() + std::size_t(t - 1) * s * s;
        double* cur = qt.data() + std::size_t(t) * s * s;
        for (std::size_t x = 0; x < s; ++x)
            for (std::size_t k = 0; k < s; ++k) {
                const double a = prev[x * s + k];
                if (a == 0.0) continue;
                const double* qk = chain.Q.row(k);
                for (std::size_t y = 0; y < s; ++y) cur[x * s + y] += a * qk[y];
            }
    }

    std::vector<double> site_log(s);
    for (std::size_t y = 0; y < s; ++y) site_log[y] = beta * chain.scores[y] + h;

    const double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<double> z(std::size_t(n_sites + 1) * s, 0.0);
    for (std::size_t x = 0; x < s; ++x) z[x] = chain.mu0[x];
    std::vector<detail::ScaleBlock> blocks{{0, 0.0}};
    std::vector<double> inner(s), best(s), acc(s), log_v(s);
    double result = neg_inf;

    for (int n = 1; n <= n_sites; ++n) {
        const int lo = n - tk > 0 ? n - tk : 0;
        std::fill(best.begin(), best.end(), neg_inf);
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int j = int(blocks.size()) - 1; j >= 0; --j) {
            const int bend = (j + 1 < int(blocks.size())) ? blocks[std::size_t(j) + 1].start : n;
            if (bend - 1 < lo) break;
            const int bstart = blocks[std::size_t(j)].start;
            const int mlo = bstart > lo ? bstart : lo;
            const int mhi = bend - 1 < n - 1 ? bend - 1 : n - 1;
            if (mlo > mhi) continue;
            std::fill(inner.begin(), inner.end(), 0.0);
            for (int m = mlo; m <= mhi; ++m) {
                const int t = n - m;
                const double kt = K[t - 1];
                const double* pt = qt.data() + std::size_t(t) * s * s;
                const double* zm = z.data() + std::size_t(m) * s;
                for (std::size_t x = 0; x < s; ++x) {
                    const double a = zm[x] * kt;
                    if (a == 0.0) continue;
                    const double* px = pt + x * s;
                    for (std::size_t y = 0; y < s; ++y) inner[y] += a * px[y];
                }
            }
            const double off = blocks[std::size_t(j)].offset;
            for (std::size_t y = 0; y < s; ++y) {
                if (!(inner[y] > 0.0)) continue;
                const double t = off + std::log(inner[y]);
                if (t <= best[y]) {
                    acc[y] += std::exp(t - best[y]);
                } else {
                    acc[y] = acc[y] * std::exp(best[y] - t) + 1.0;
                    best[y] = t;
                }
            }
        }
        double site_max = neg_inf;
        for (std::size_t y = 0; y < s; ++y) {
            log_v[y] = acc[y] > 0.0 ? site_log[y] + best[y] + std::log(acc[y]) : neg_inf;
            site_max = std::max(site_max, log_v[y]);
        }
        if (site_max == neg_inf)
            throw std::runtime_error("annealed_log_partition: underflow across blocks");

        const detail::ScaleBlock& cur = blocks.back();
        if (n - cur.start >= detail::kMaxBlockLen ||
            std::abs(site_max - cur.offset) > detail::kBlockDriftLimit)
            blocks.push_back({n, site_max});
        const double off = blocks.back().offset;
        double* zn = z.data() + std::size_t(n) * s;
        for (std::size_t y = 0; y < s; ++y)
            zn[y] = log_v[y] == neg_inf ? 0.0 : std::exp(log_v[y] - off);

        if (n == n_sites) {
            LogSumExp lse;
            for (std::size_t y = 0; y < s; ++y) lse.add(log_v[y]);
            result = lse.value();
        }
    }
    return result;
}

}  // namespace pinning
