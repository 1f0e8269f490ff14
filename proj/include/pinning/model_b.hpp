// Weakly inhomogeneous disorder: the chain at system size N uses the slowed
// transition matrix Q_N = I + N^{-gamma} (Q - I), which shares the stationary
// law of Q while stretching constant strips to length of order N^gamma. As
// N grows, (1/N) log Z_N converges to the mixture of homogeneous free
// energies sum_x mu(x) F(h + beta f(x)), a piecewise-analytic function of h
// whose pieces are separated by the thresholds h = -beta f(x).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pinning/disorder_chain.hpp"
#include "pinning/disorder_path.hpp"
#include "pinning/homogeneous.hpp"
#include "pinning/matrix.hpp"
#include "pinning/numeric.hpp"
#include "pinning/parallel.hpp"
#include "pinning/quenched.hpp"
#include "pinning/rng.hpp"

namespace pinning {

struct ScaledChainFamily {
    std::vector<std::string> labels;
    std::vector<double> scores;
    Matrix Q;                   // base transition matrix, irreducible
    double gamma = 0.0;         // slowdown exponent in (0, 1)
    std::vector<double> mu;     // stationary law of Q (and of every Q_N)
};

inline ScaledChainFamily build_family(std::vector<std::string> labels, std::vector<double> scores,
                                      Matrix q, double gamma) {
    if (!(gamma > 0.0) || !(gamma < 1.0))
        throw std::invalid_argument("build_family: gamma must lie in (0, 1)");
    DisorderChain base = build_chain(std::move(labels), std::move(scores), std::move(q), false);
    ScaledChainFamily fam;
    fam.labels = std::move(base.labels);
    fam.scores = std::move(base.scores);
    fam.Q = std::move(base.Q);
    fam.gamma = gamma;
    fam.mu = std::move(base.mu0);
    return fam;
}

// Q_N = I + N^{-gamma}(Q - I); diagonals are assembled as 1 minus the computed
// off-diagonal row mass so rows sum to 1 at working precision.
inline Matrix scaled_matrix(const ScaledChainFamily& fam, int n) {
    if (n < 2) throw std::invalid_argument("scaled_matrix: N must be >= 2");
    const double factor = std::pow(double(n), -fam.gamma);
    const std::size_t s = fam.scores.size();
    Matrix q(s);
    for (std::size_t x = 0; x < s; ++x) {
        double off = 0.0;
        for (std::size_t y = 0; y < s; ++y) {
            if (y == x) continue;
            q(x, y) = factor * fam.Q(x, y);
            off += q(x, y);
        }
        q(x, x) = 1.0 - off;
        if (!(q(x, x) >= 0.0))
            throw std::runtime_error("scaled_matrix: negative diagonal entry");
    }
    return q;
}

// The size-N chain: slowed matrix, shared stationary law.
inline DisorderChain family_chain(const ScaledChainFamily& fam, int n) {
    DisorderChain chain;
    chain.labels = fam.labels;
    chain.scores = fam.scores;
    chain.Q = scaled_matrix(fam, n);
    chain.mu0 = fam.mu;
    return chain;
}

struct LimitFreeEnergy {
    double beta = 0.0, h = 0.0;
    double value = 0.0;
    int branch = 0;         // number of thresholds strictly below h
    int branch_count = 0;   // distinct thresholds + 1
};

inline LimitFreeEnergy limit_free_energy(const ScaledChainFamily& fam, const RenewalKernel& kernel,
                                         double beta, double h) {
    KahanSum total;
    for (std::size_t x = 0; x < fam.scores.size(); ++x)
        total.add(fam.mu[x] * homogeneous_free_energy(kernel, h + beta * fam.scores[x]).free_energy);

    std::vector<double> thresholds;
    for (double f : fam.scores) thresholds.push_back(-beta * f);
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    LimitFreeEnergy out;
    out.beta = beta;
    out.h = h;
    out.value = total.value();
    out.branch = int(std::count_if(thresholds.begin(), thresholds.end(),
                                   [&](double t) { return t < h; }));
    out.branch_count = int(thresholds.size()) + 1;
    return out;
}

struct ModelBExperiment {
    int n = 0;
    McEstimate free_energy;        // (1/N) log Z_N across disorder draws
    double mean_strips = 0.0;      // mean number of complete strips
    double mean_strip_len = 0.0;   // mean length of a complete strip
};

inline ModelBExperiment finite_n_experiment(const ScaledChainFamily& fam,
                                            const RenewalKernel& kernel, double beta, double h,
                                            int n, int samples, std::uint64_t seed,
                                            const QuenchedOptions& opt = {}) {
    if (samples < 1) throw std::invalid_argument("finite_n_experiment: need at least 1 sample");
    const DisorderChain chain = family_chain(fam, n);
    std::vector<double> values(std::size_t(samples), 0.0);
    std::vector<double> strips(std::size_t(samples), 0.0);
    std::vector<double> strip_len(std::size_t(samples), 0.0);
    parallel_for(samples, [&](int i) {
        const DisorderPath path = sample_path(chain, n, derive_seed(seed, std::uint64_t(i)));
        values[std::size_t(i)] =
            quenched_logZ(kernel, path.values, beta, h, opt).log_value / double(n);
        const StripDecomposition d = strip_decompose(path);
        strips[std::size_t(i)] = double(d.complete_count());
        if (d.complete_count() > 0)
            strip_len[std::size_t(i)] = double(d.ends.back()) / double(d.complete_count());
    });
    ModelBExperiment out;
    out.n = n;
    out.free_energy = detail::summarize(values);
    out.mean_strips = pairwise_sum(strips) / double(samples);
    out.mean_strip_len = pairwise_sum(strip_len) / double(samples);
    return out;
}

struct ConstrainedExperiment {
    int n = 0;
    McEstimate constrained;   // (1/N) log Z_N with renewals forced at strip ends
    double mean_gap = 0.0;    // mean of (log Z - log Z^pinned) / N, nonnegative
    double mean_strips = 0.0;
};

inline ConstrainedExperiment constrained_experiment(const ScaledChainFamily& fam,
                                                   const RenewalKernel& kernel, double beta,
                                                   double h, int n, int samples,
                                                   std::uint64_t seed,
                                                   const QuenchedOptions& opt = {}) {
    if (samples < 1) throw std::invalid_argument("constrained_experiment: need at least 1 sample");
    const DisorderChain chain = family_chain(fam, n);
    std::vector<double> values(std::size_t(samples), 0.0);
    std::vector<double> gaps(std::size_t(samples), 0.0);
    std::vector<double> strips(std::size_t(samples), 0.0);
    parallel_for(samples, [&](int i) {
        const DisorderPath path = sample_path(chain, n, derive_seed(seed, std::uint64_t(i)));
        const StripDecomposition d = strip_decompose(path);
        std::vector<int> pins = d.ends;
        pins.push_back(n);
        const double free_log =
            quenched_logZ(kernel, path.values, beta, h, opt).log_value;
        const double pinned_log =
            pinned_logZ(kernel, path.values, beta, h, pins, opt).log_value;
        values[std::size_t(i)] = pinned_log / double(n);
        gaps[std::size_t(i)] = (free_log - pinned_log) / double(n);
        strips[std::size_t(i)] = double(d.complete_count());
    });
    ConstrainedExperiment out;
    out.n = n;
    out.constrained = detail::summarize(values);
    out.mean_gap = pairwise_sum(gaps) / double(samples);
    out.mean_strips = pairwise_sum(strips) / double(samples);
    return out;
}

inline std::vector<LimitFreeEnergy> phase_diagram(const ScaledChainFamily& fam,
                                                  const RenewalKernel& kernel, double beta,
                                                  std::span<const double> hs) {
    std::vector<LimitFreeEnergy> out;
    out.reserve(hs.size());
    for (double h : hs) out.push_back(limit_free_energy(fam, kernel, beta, h));
    return out;
}

}  // namespace pinning
