// Finite irreducible Markov chains that drive the disorder sequence. A chain
// carries state labels, a per-state score f(x) (the value the disorder takes
// in that state), the transition matrix Q, and the stationary law mu0, which
// is also the initial law.
#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "pinning/matrix.hpp"
#include "pinning/numeric.hpp"

namespace pinning {

struct DisorderChain {
    std::vector<std::string> labels;
    std::vector<double> scores;      // f(x), already centered if requested
    Matrix Q;
    std::vector<double> mu0;         // stationary law, also the initial law

    std::size_t n_states() const { return scores.size(); }

    double mean_score() const {
        KahanSum s;
        for (std::size_t i = 0; i < scores.size(); ++i) s.add(mu0[i] * scores[i]);
        return s.value();
    }
};

namespace detail {

inline void check_stochastic(const Matrix& q, double tol = 1e-12) {
    for (std::size_t i = 0; i < q.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) {
            const double v = q(i, j);
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("chain: transition entries must be in [0, 1]");
            s += v;
        }
        if (std::abs(s - 1.0) > tol)
            throw std::invalid_argument("chain: row " + std::to_string(i) + " sums to " +
                                        std::to_string(s) + ", not 1");
    }
}

inline bool strongly_connected(const Matrix& q) {
    const std::size_t n = q.size();
    auto reach = [&](bool transpose) {
        std::vector<char> seen(n, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v = 0; v < n; ++v) {
                const double w = transpose ? q(v, u) : q(u, v);
                if (w > 0.0 && !seen[v]) {
                    seen[v] = 1;
                    stack.push_back(v);
                }
            }
        }
        return std::accumulate(seen.begin(), seen.end(), std::size_t(0)) == n;
    };
    return reach(false) && reach(true);
}

// Stationary law of an irreducible stochastic matrix. Small chains go through
// a direct linear solve of mu (Q - I) = 0 with a normalization row, which also
// covers periodic chains; larger ones use power iteration on the lazy kernel
// (I + Q)/2 to dodge periodicity.
inline std::vector<double> stationary_law(const Matrix& q) {
    const std::size_t n = q.size();
    if (n == 1) return {1.0};
    if (n <= 64) {
        Matrix a(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a(i, j) = q(j, i) - (i == j ? 1.0 : 0.0);
        std::vector<double> b(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) a(n - 1, j) = 1.0;
        b[n - 1] = 1.0;
        std::vector<double> mu = solve_linear(std::move(a), std::move(b));
        for (double& v : mu)
            if (v < 0.0 && v > -1e-13) v = 0.0;
        double s = 0.0;
        for (double v : mu) {
            if (!(v >= 0.0)) throw std::runtime_error("stationary_law: negative component");
            s += v;
        }
        for (double& v : mu) v /= s;
        return mu;
    }
    std::vector<double> mu(n, 1.0 / double(n));
    for (int iter = 0; iter < 2000000; ++iter) {
        std::vector<double> next = mul_left(mu, q);
        double diff = 0.0, s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] = 0.5 * (next[i] + mu[i]);
            s += next[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            next[i] /= s;
            diff += std::abs(next[i] - mu[i]);
        }
        mu.swap(next);
        if (diff < 1e-15) return mu;
    }
    throw std::runtime_error("stationary_law: power iteration did not converge");
}

}  // namespace detail

// Builds a chain from labels, raw scores, and a transition matrix. With
// center=true the scores are shifted so the stationary mean is zero.
inline DisorderChain build_chain(std::vector<std::string> labels, std::vector<double> scores,
                                 Matrix q, bool center) {
    const std::size_t n = scores.size();
    if (n == 0) throw std::invalid_argument("build_chain: empty state space");
    if (labels.size() != n || q.size() != n)
        throw std::invalid_argument("build_chain: labels/scores/Q sizes disagree");
    for (double f : scores)
        if (!std::isfinite(f)) throw std::invalid_argument("build_chain: scores must be finite");
    detail::check_stochastic(q);
    if (!detail::strongly_connected(q))
        throw std::invalid_argument("build_chain: transition matrix is not irreducible");

    DisorderChain chain;
    chain.labels = std::move(labels);
    chain.scores = std::move(scores);
    chain.Q = std::move(q);
    chain.mu0 = detail::stationary_law(chain.Q);
    if (center) {
        const double m = chain.mean_score();
        for (double& f : chain.scores) f -= m;
    }
    return chain;
}

// Sliding-window chain for a moving average of i.i.d. innovations: the state
// is the last window+1 innovations, ordered oldest first, and the score is
//   f(x) = weights[0]*x_newest + weights[1]*x_second_newest + ...
// States are indexed lexicographically in the innovation alphabet, so mu0 is
// the product law.
inline DisorderChain build_moving_average_chain(const std::vector<double>& weights,
                                                const std::vector<double>& alphabet,
                                                const std::vector<double>& alphabet_probs,
                                                bool center) {
    if (weights.empty()) throw std::invalid_argument("moving_average: need at least one weight");
    const std::size_t a = alphabet.size();
    if (a < 2) throw std::invalid_argument("moving_average: alphabet needs at least 2 symbols");
    if (alphabet_probs.size() != a)
        throw std::invalid_argument("moving_average: alphabet/probability sizes disagree");
    double psum = 0.0;
    for (double p : alphabet_probs) {
        if (!(p > 0.0)) throw std::invalid_argument("moving_average: symbol probabilities must be positive");
        psum += p;
    }
    if (std::abs(psum - 1.0) > 1e-12)
        throw std::invalid_argument("moving_average: symbol probabilities must sum to 1");

    const std::size_t window = weights.size() - 1;   // state holds window+1 symbols
    std::size_t n = 1;
    for (std::size_t k = 0; k <= window; ++k) {
        if (n > 4096 / a) throw std::invalid_argument("moving_average: state space too large");
        n *= a;
    }

    auto digit = [&](std::size_t state, std::size_t pos) {
        // pos = 0 is the oldest symbol in the window
        std::size_t div = 1;
        for (std::size_t k = pos + 1; k <= window; ++k) div *= a;
        return (state / div) % a;
    };

    std::vector<std::string> labels(n);
    std::vector<double> scores(n, 0.0);
    std::vector<double> mu0(n, 1.0);
    Matrix q(n);
    for (std::size_t s = 0; s < n; ++s) {
        std::string lab = "(";
        for (std::size_t pos = 0; pos <= window; ++pos) {
            const std::size_t d = digit(s, pos);
            if (pos > 0) lab += ",";
            lab += std::to_string(alphabet[d]);
            mu0[s] *= alphabet_probs[d];
            // weights[0] multiplies the newest symbol (pos = window)
            scores[s] += weights[window - pos] * alphabet[d];
        }
        lab += ")";
        labels[s] = lab;
        const std::size_t shifted = (s % (n / a)) * a;
        for (std::size_t d = 0; d < a; ++d) q(s, shifted + d) = alphabet_probs[d];
    }

    DisorderChain chain = build_chain(std::move(labels), std::move(scores), std::move(q), false);
    chain.mu0 = std::move(mu0);   // product law, exact for this construction
    if (center) {
        const double m = chain.mean_score();
        for (double& f : chain.scores) f -= m;
    }
    return chain;
}

}  // namespace pinning
