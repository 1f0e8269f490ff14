// Annealed solver built on the tilted transfer-matrix series
//   A(b; beta, h) = sum_{t>=1} K(t) e^{-b t} Q^t D,   D = diag(e^{beta f(y) + h}).
// Its Perron root lambda(b) drives everything: lambda(0) decides the phase,
// the annealed free energy is the root of lambda(b) = 1, and the critical
// curve is h_c(beta) = -log lambda(0; beta, 0).
//
// For chains whose Q^t contracts to the stationary projector well inside the
// summation horizon, the series tail is replaced by tail-mass times the
// projector with a certified error bound; otherwise the sum runs over the
// full kernel support, which is feasible for small state spaces (and is the
// only correct option for periodic chains).
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pinning/disorder_chain.hpp"
#include "pinning/matrix.hpp"
#include "pinning/numeric.hpp"
#include "pinning/renewal_kernel.hpp"

namespace pinning {

struct SpectralOptions {
    int mix_horizon = 512;         // exact summation horizon before tail replacement
    double mix_threshold = 1e-9;   // ||(Q - 1 mu0^T)^horizon||_inf must fall below this
    double exact_budget = 4e9;     // cutoff * sigma^3 limit for full summation fallback
    double perron_tol = 1e-12;     // eigen residual target, relative to max(1, lambda)
    double root_tol = 1e-12;       // |lambda - 1| accepted as the free-energy root
};

struct PerronData {
    double lambda = 0.0;
    std::vector<double> xi;    // right eigenvector, max entry 1
    double residual = 0.0;     // max_i |(A xi)_i - lambda xi_i|
    int iterations = 0;
};

// Power iteration with Rayleigh-quotient estimates; requires a strictly
// positive matrix so the Perron root is simple and the iteration converges.
inline PerronData perron(const Matrix& a, double tol = 1e-12, int max_iter = 500000) {
    const std::size_t n = a.size();
    if (n == 0) throw std::invalid_argument("perron: empty matrix");
    if (!a.strictly_positive())
        throw std::invalid_argument("perron: matrix must be strictly positive");

    PerronData out;
    std::vector<double> v(n, 1.0);
    for (int iter = 1; iter <= max_iter; ++iter) {
        std::vector<double> w = mul_right(a, v);
        double vw = 0.0, vv = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            vw += v[i] * w[i];
            vv += v[i] * v[i];
        }
        const double lambda = vw / vv;
        double resid = 0.0, wmax = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            resid = std::max(resid, std::abs(w[i] - lambda * v[i]));
            wmax = std::max(wmax, w[i]);
        }
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wmax;
        if (resid <= tol * (lambda > 1.0 ? lambda : 1.0)) {
            out.lambda = lambda;
            out.xi = v;
            out.residual = resid;
            out.iterations = iter;
            return out;
        }
    }
    throw std::runtime_error("perron: power iteration did not converge");
}

struct TiltedSeries {
    double beta = 0.0, h = 0.0, b = 0.0;
    Matrix A;
    double tail_bound = 0.0;   // entrywise bound on the truncation/replacement error
};

enum class Regime { localized, critical, delocalized };

inline std::string to_string(Regime r) {
    switch (r) {
        case Regime::localized: return "localized";
        case Regime::critical: return "critical";
        case Regime::delocalized: return "delocalized";
    }
    return "?";
}

struct AnnealedSolution {
    double beta = 0.0, h = 0.0;
    double lambda0 = 0.0;        // Perron root at b = 0
    double free_energy = 0.0;
    double h_critical = 0.0;     // h - log lambda0
    Regime regime = Regime::delocalized;
    PerronData perron_at_root;   // eigendata at b = free_energy
};

struct CriticalPoint {
    double beta = 0.0;
    double h_critical = 0.0;
    double lambda0 = 0.0;   // Perron root at (b=0, h=0)
};

// Tilted semi-Markov return kernel
//   p(x, y, t) = K(t) e^{-F t} Q^t(x, y) e^{beta f(y) + h} xi(y) / xi(x),
// flattened t-major. Rows sum to lambda(F): 1 in the localized phase, below 1
// (defective) when delocalized. Entries vanish for t > t_len.
struct SemiMarkovKernel {
    std::size_t sigma = 0;
    int t_len = 0;
    std::vector<double> p;           // p[(t-1)*sigma^2 + x*sigma + y]
    std::vector<double> row_defect;  // 1 - sum_{y,t} p(x, y, t)
    double row_tol = 1e-9;

    double at(std::size_t x, std::size_t y, int t) const {
        if (t < 1 || t > t_len) return 0.0;
        return p[std::size_t(t - 1) * sigma * sigma + x * sigma + y];
    }
};

class AnnealedModel {
public:
    AnnealedModel(RenewalKernel kernel, DisorderChain chain, SpectralOptions opt = {})
        : kernel_(std::move(kernel)), chain_(std::move(chain)), opt_(opt) {
        const std::size_t s = chain_.n_states();
        projector_ = Matrix(s);
        for (std::size_t x = 0; x < s; ++x)
            for (std::size_t y = 0; y < s; ++y) projector_(x, y) = chain_.mu0[y];
        Matrix contraction(s);
        for (std::size_t x = 0; x < s; ++x)
            for (std::size_t y = 0; y < s; ++y) contraction(x, y) = chain_.Q(x, y) - chain_.mu0[y];
        mix_norm_ = matrix_power(contraction, (unsigned long long)(opt_.mix_horizon)).inf_norm();
        mixing_ = mix_norm_ <= opt_.mix_threshold;
        qpow_.push_back(Matrix::identity(s));
    }

    const RenewalKernel& kernel() const { return kernel_; }
    const DisorderChain& chain() const { return chain_; }
    bool tail_replaced() const { return mixing_; }
    double mix_norm() const { return mix_norm_; }

    // K(t) Q^t(x,y) e^{beta f(y) + h}
    Matrix transfer_matrix(double beta, double h, int t) const {
        if (t < 1 || t > kernel_.cutoff)
            throw std::invalid_argument("transfer_matrix: t outside kernel support");
        Matrix m = q_power(t);
        const std::size_t s = chain_.n_states();
        const double kt = kernel_.prob(t);
        for (std::size_t x = 0; x < s; ++x)
            for (std::size_t y = 0; y < s; ++y)
                m(x, y) *= kt * std::exp(beta * chain_.scores[y] + h);
        return m;
    }

    TiltedSeries tilted_series(double beta, double h, double b) const {
        if (!(b >= 0.0)) throw std::invalid_argument("tilted_series: b must be >= 0");
        const std::size_t s = chain_.n_states();
        Matrix acc(s);
        double bound = 0.0;
        if (mixing_) {
            const int horizon = std::min(opt_.mix_horizon, kernel_.cutoff);
            for (int t = 1; t <= horizon; ++t)
                acc.axpy(kernel_.prob(t) * std::exp(-b * double(t)), q_power(t));
            double tail_weight;
            if (b == 0.0) {
                tail_weight = kernel_.tail_mass(horizon);
            } else {
                // multiplicative decay, re-anchored on an exact exp every 512
                // steps to keep rounding drift at the 1e-13 level
                KahanSum tw;
                const double step = std::exp(-b);
                double decay = 0.0;
                for (int t = horizon + 1; t <= kernel_.cutoff; ++t) {
                    if ((t - horizon - 1) % 512 == 0)
                        decay = std::exp(-b * double(t));
                    else
                        decay *= step;
                    if (decay < 1e-305) break;
                    tw.add(kernel_.prob(t) * decay);
                }
                tail_weight = tw.value();
            }
            acc.axpy(tail_weight, projector_);
            bound = 2.0 * mix_norm_ * tail_weight;
        } else {
            const double cost = double(kernel_.cutoff) * std::pow(double(s), 3.0);
            if (cost > opt_.exact_budget)
                throw std::runtime_error(
                    "tilted_series: chain has not mixed within the summation horizon (norm " +
                    std::to_string(mix_norm_) +
                    ") and full summation over the kernel support is over budget; raise "
                    "mix_horizon or reduce the cutoff");
            Matrix p = chain_.Q;
            for (int t = 1; t <= kernel_.cutoff; ++t) {
                if (t > 1) p = p * chain_.Q;
                acc.axpy(kernel_.prob(t) * std::exp(-b * double(t)), p);
                const double rest = kernel_.tail_mass(t) * std::exp(-b * double(t + 1));
                if (rest < 1e-305) {
                    bound = rest;
                    break;
                }
            }
        }
        double site_max = 0.0;
        for (std::size_t y = 0; y < s; ++y) {
            const double d = std::exp(beta * chain_.scores[y] + h);
            site_max = std::max(site_max, d);
            for (std::size_t x = 0; x < s; ++x) acc(x, y) *= d;
        }
        return {beta, h, b, std::move(acc), bound * site_max};
    }

    AnnealedSolution solve_free_energy(double beta, double h) const {
        AnnealedSolution sol;
        sol.beta = beta;
        sol.h = h;
        PerronData p0 = perron(tilted_series(beta, h, 0.0).A, opt_.perron_tol);
        sol.lambda0 = p0.lambda;
        sol.h_critical = h - std::log(p0.lambda);
        if (p0.lambda <= 1.0 + opt_.root_tol) {
            sol.free_energy = 0.0;
            sol.regime = std::abs(p0.lambda - 1.0) <= opt_.root_tol ? Regime::critical
                                                                    : Regime::delocalized;
            sol.perron_at_root = std::move(p0);
            return sol;
        }

        auto lambda_at = [&](double b) { return perron(tilted_series(beta, h, b).A, opt_.perron_tol); };
        double lo = 0.0, hi = 1.0;
        while (lambda_at(hi).lambda >= 1.0) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e4) throw std::runtime_error("solve_free_energy: failed to bracket the root");
        }
        const double width_floor = 1e-14 * (hi > 1.0 ? hi : 1.0);
        double root = 0.5 * (lo + hi);
        while (hi - lo > width_floor) {
            const double mid = 0.5 * (lo + hi);
            const double lam = lambda_at(mid).lambda;
            if (std::abs(lam - 1.0) <= opt_.root_tol) {
                root = mid;
                break;
            }
            if (lam > 1.0)
                lo = mid;
            else
                hi = mid;
            root = 0.5 * (lo + hi);
        }
        sol.free_energy = root;
        sol.regime = Regime::localized;
        sol.perron_at_root = lambda_at(root);
        return sol;
    }

    std::vector<CriticalPoint> critical_curve(std::span<const double> betas) const {
        std::vector<CriticalPoint> out;
        out.reserve(betas.size());
        for (double beta : betas) {
            const PerronData p = perron(tilted_series(beta, 0.0, 0.0).A, opt_.perron_tol);
            out.push_back({beta, -std::log(p.lambda), p.lambda});
        }
        return out;
    }

    SemiMarkovKernel tilted_kernel(const AnnealedSolution& sol) const {
        const std::size_t s = chain_.n_states();
        if (double(s) * double(s) * double(kernel_.cutoff) > 6e7)
            throw std::runtime_error("tilted_kernel: state space times cutoff is too large to store");
        const std::vector<double>& xi = sol.perron_at_root.xi;
        if (xi.size() != s) throw std::invalid_argument("tilted_kernel: solution does not match chain");
        const double f = sol.free_energy;

        std::vector<double> site(s);
        double max_site = 0.0, max_ratio = 0.0;
        for (std::size_t y = 0; y < s; ++y) {
            site[y] = std::exp(sol.beta * chain_.scores[y] + sol.h);
            max_site = std::max(max_site, site[y]);
        }
        for (std::size_t x = 0; x < s; ++x)
            for (std::size_t y = 0; y < s; ++y) max_ratio = std::max(max_ratio, xi[y] / xi[x]);

        SemiMarkovKernel smk;
        smk.sigma = s;
        smk.p.reserve(s * s * 64);
        std::vector<KahanSum> row(s);
        Matrix qp = chain_.Q;
        int t_len = 0;
        for (int t = 1; t <= kernel_.cutoff; ++t) {
            if (t > 1) qp = qp * chain_.Q;
            const double wt = kernel_.prob(t) * std::exp(-f * double(t));
            smk.p.resize(std::size_t(t) * s * s, 0.0);
            double* block = smk.p.data() + std::size_t(t - 1) * s * s;
            for (std::size_t x = 0; x < s; ++x)
                for (std::size_t y = 0; y < s; ++y) {
                    const double v = wt * qp(x, y) * site[y] * xi[y] / xi[x];
                    block[x * s + y] = v;
                    row[x].add(v);
                }
            t_len = t;
            // everything beyond t is below the subnormal floor: stop early
            if (kernel_.tail_mass(t) * std::exp(-f * double(t + 1)) * max_site * max_ratio < 1e-320)
                break;
        }
        smk.t_len = t_len;
        smk.row_defect.resize(s);
        for (std::size_t x = 0; x < s; ++x) {
            smk.row_defect[x] = 1.0 - row[x].value();
            if (smk.row_defect[x] < -smk.row_tol)
                throw std::runtime_error("tilted_kernel: row mass exceeds 1 beyond tolerance");
        }
        return smk;
    }

    // P(n in renewal set) for n = 1..n_max under the tilted semi-Markov
    // renewal process started from mu0.
    std::vector<double> renewal_mass_series(const SemiMarkovKernel& smk, int n_max,
                                            int site_cap = 20000) const {
        const std::size_t s = chain_.n_states();
        if (smk.sigma != s) throw std::invalid_argument("renewal_mass_series: kernel/chain mismatch");
        if (n_max < 1 || n_max > site_cap)
            throw std::invalid_argument("renewal_mass_series: n outside [1, cap]");
        std::vector<double> u(std::size_t(n_max + 1) * s, 0.0);
        for (std::size_t x = 0; x < s; ++x) u[x] = chain_.mu0[x];
        std::vector<double> mass(std::size_t(n_max), 0.0);
        for (int n = 1; n <= n_max; ++n) {
            double* un = u.data() + std::size_t(n) * s;
            const int tmax = n < smk.t_len ? n : smk.t_len;
            for (int t = 1; t <= tmax; ++t) {
                const double* um = u.data() + std::size_t(n - t) * s;
                const double* block = smk.p.data() + std::size_t(t - 1) * s * s;
                for (std::size_t x = 0; x < s; ++x) {
                    const double a = um[x];
                    if (a == 0.0) continue;
                    const double* px = block + x * s;
                    for (std::size_t y = 0; y < s; ++y) un[y] += a * px[y];
                }
            }
            double m = 0.0;
            for (std::size_t y = 0; y < s; ++y) m += un[y];
            mass[std::size_t(n - 1)] = m;
        }
        return mass;
    }

    double renewal_mass(const SemiMarkovKernel& smk, int n, int site_cap = 20000) const {
        return renewal_mass_series(smk, n, site_cap).back();
    }

private:
    const Matrix& q_power(int t) const {
        while (int(qpow_.size()) <= t) qpow_.push_back(qpow_.back() * chain_.Q);
        return qpow_[std::size_t(t)];
    }

    RenewalKernel kernel_;
    DisorderChain chain_;
    SpectralOptions opt_;
    Matrix projector_;                   // 1 mu0^T
    double mix_norm_ = 0.0;
    bool mixing_ = false;
    mutable std::vector<Matrix> qpow_;   // lazily extended; not safe for concurrent use
};

}  // namespace pinning
