// Brute-force enumeration oracles for small systems. These deliberately share
// no machinery with the DP/spectral engine: renewal configurations are walked
// as bitmasks, chain marginals come from locally computed matrix powers, and
// disorder averages enumerate every chain trajectory. Compensated summation
// keeps the enumeration error near machine precision so the oracles can be
// trusted to 1e-12 relative.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pinning/disorder_chain.hpp"
#include "pinning/renewal_kernel.hpp"

namespace pinning::oracle {

struct EnumerationBudget {
    int max_sites_renewal = 20;   // bitmask enumeration limit
    int max_sites_paths = 12;     // chain trajectory enumeration limit
    double max_ops = 5e8;         // rough operation count guard
};

namespace detail {

struct Acc {
    double s = 0.0, c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

// Q^t for t = 0..tmax as flat sigma*sigma tables, computed by plain
// cubic-time multiplication.
inline std::vector<std::vector<double>> local_powers(const Matrix& q, int tmax) {
    const std::size_t s = q.size();
    std::vector<std::vector<double>> out;
    out.reserve(std::size_t(tmax) + 1);
    std::vector<double> ident(s * s, 0.0);
    for (std::size_t x = 0; x < s; ++x) ident[x * s + x] = 1.0;
    out.push_back(std::move(ident));
    for (int t = 1; t <= tmax; ++t) {
        const std::vector<double>& prev = out.back();
        std::vector<double> cur(s * s, 0.0);
        for (std::size_t x = 0; x < s; ++x)
            for (std::size_t k = 0; k < s; ++k) {
                const double a = prev[x * s + k];
                if (a == 0.0) continue;
                for (std::size_t y = 0; y < s; ++y) cur[x * s + y] += a * q(k, y);
            }
        out.push_back(std::move(cur));
    }
    return out;
}

}  // namespace detail

// Z_N(omega) = sum over renewal subsets of prod K(gap) e^{beta omega_t + h},
// always renewing at N. Linear scale; small N keeps this well within range.
inline double enum_quenched_partition(const RenewalKernel& kernel, std::span<const double> omega,
                                      double beta, double h,
                                      const EnumerationBudget& budget = {}) {
    const int n = int(omega.size());
    if (n < 1) throw std::invalid_argument("enum_quenched_partition: empty disorder");
    if (n > budget.max_sites_renewal || n > 24)
        throw std::invalid_argument("enum_quenched_partition: N exceeds enumeration budget");
    std::vector<double> site(std::size_t(n), 0.0);
    for (int i = 0; i < n; ++i) site[std::size_t(i)] = std::exp(beta * omega[std::size_t(i)] + h);

    detail::Acc total;
    const std::uint64_t masks = 1ULL << (n - 1);
    for (std::uint64_t mask = 0; mask < masks; ++mask) {
        double prod = 1.0;
        int prev = 0;
        for (int j = 1; j < n && prod != 0.0; ++j)
            if (mask & (1ULL << (j - 1))) {
                prod *= kernel.prob(j - prev) * site[std::size_t(j - 1)];
                prev = j;
            }
        prod *= kernel.prob(n - prev) * site[std::size_t(n - 1)];
        total.add(prod);
    }
    return total.s;
}

// E Z_N over the chain: for each renewal subset the chain marginal at the
// contact times is folded left-to-right through locally computed Q powers.
inline double enum_annealed_partition(const RenewalKernel& kernel, const DisorderChain& chain,
                                      double beta, double h, int n,
                                      const EnumerationBudget& budget = {}) {
    if (n < 1) throw std::invalid_argument("enum_annealed_partition: length must be >= 1");
    if (n > budget.max_sites_renewal || n > 24)
        throw std::invalid_argument("enum_annealed_partition: N exceeds enumeration budget");
    const std::size_t s = chain.n_states();
    const double ops = std::ldexp(double(n) * double(s) * double(s), n - 1);
    if (ops > budget.max_ops)
        throw std::invalid_argument("enum_annealed_partition: state space over budget at this N");

    const std::vector<std::vector<double>> qp = detail::local_powers(chain.Q, n);
    std::vector<double> site(s);
    for (std::size_t y = 0; y < s; ++y) site[y] = std::exp(beta * chain.scores[y] + h);

    detail::Acc total;
    std::vector<int> times;
    std::vector<double> v(s), w(s);
    const std::uint64_t masks = 1ULL << (n - 1);
    for (std::uint64_t mask = 0; mask < masks; ++mask) {
        times.clear();
        for (int j = 1; j < n; ++j)
            if (mask & (1ULL << (j - 1))) times.push_back(j);
        times.push_back(n);

        double kprod = 1.0;
        int prev = 0;
        for (int t : times) {
            kprod *= kernel.prob(t - prev);
            prev = t;
        }
        if (kprod == 0.0) {
            total.add(0.0);
            continue;
        }
        // v starts as mu0 weighted at the first contact, then folds through
        // Q^{gap} and the site factor at each later contact
        for (std::size_t y = 0; y < s; ++y) v[y] = chain.mu0[y] * site[y];
        for (std::size_t i = 1; i < times.size(); ++i) {
            const int gap = times[i] - times[i - 1];
            const std::vector<double>& p = qp[std::size_t(gap)];
            for (std::size_t y = 0; y < s; ++y) w[y] = 0.0;
            for (std::size_t x = 0; x < s; ++x) {
                const double a = v[x];
                if (a == 0.0) continue;
                for (std::size_t y = 0; y < s; ++y) w[y] += a * p[x * s + y];
            }
            for (std::size_t y = 0; y < s; ++y) v[y] = w[y] * site[y];
        }
        double m = 0.0;
        for (std::size_t y = 0; y < s; ++y) m += v[y];
        total.add(kprod * m);
    }
    return total.s;
}

enum class DisorderFunctional { partition, free_energy };

// E g(Z_N(omega)) by enumerating every chain trajectory X_1..X_N with its
// exact probability, where g is the identity or (1/N) log. The partition
// variant equals enum_annealed_partition by Fubini; the free_energy variant
// gives the exact quenched mean for checking the annealing inequality.
inline double enum_disorder_average(const RenewalKernel& kernel, const DisorderChain& chain,
                                    double beta, double h, int n, DisorderFunctional functional,
                                    const EnumerationBudget& budget = {}) {
    if (n < 1) throw std::invalid_argument("enum_disorder_average: length must be >= 1");
    if (n > budget.max_sites_paths)
        throw std::invalid_argument("enum_disorder_average: N exceeds path enumeration budget");
    const std::size_t s = chain.n_states();
    const double ops = std::pow(double(s), double(n)) * std::ldexp(double(n), n - 1);
    if (ops > budget.max_ops)
        throw std::invalid_argument("enum_disorder_average: path enumeration over budget");

    detail::Acc total;
    std::vector<double> omega(std::size_t(n), 0.0);
    // depth-first walk over trajectories, pruning zero-probability branches
    auto rec = [&](auto&& self, int pos, int state, double weight) -> void {
        if (pos == n) {
            const double z = enum_quenched_partition(kernel, omega, beta, h, budget);
            total.add(weight * (functional == DisorderFunctional::partition
                                    ? z
                                    : std::log(z) / double(n)));
            return;
        }
        for (std::size_t y = 0; y < s; ++y) {
            const double w = pos == 0 ? chain.mu0[y] : weight * chain.Q(std::size_t(state), y);
            if (w == 0.0) continue;
            omega[std::size_t(pos)] = chain.scores[y];
            self(self, pos + 1, int(y), w);
        }
    };
    rec(rec, 0, -1, 1.0);
    return total.s;
}

}  // namespace pinning::oracle
