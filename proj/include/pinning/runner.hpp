// Command implementations shared by the CLI and the tests. Each run_* maps a
// parsed RunConfig to CSV text (or, for validate, to a pass/fail report).
// Output is a pure function of the config, so reruns are byte-identical.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pinning/config.hpp"
#include "pinning/csv.hpp"
#include "pinning/homogeneous.hpp"
#include "pinning/model_b.hpp"
#include "pinning/oracle.hpp"
#include "pinning/quenched.hpp"
#include "pinning/spectral.hpp"

namespace pinning {

struct ValidateReport {
    bool ok = true;
    std::string text;
};

namespace rundetail {

template <class F>
auto guarded(const char* ctx, F&& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string(ctx) + ": " + e.what());
    }
}

inline void provenance(CsvWriter& w, const RunConfig& cfg, const char* command) {
    w.comment(std::string("pinning ") + command);
    w.comment("config-hash: " + format_hex16(config_hash(cfg)));
    w.comment("seed: " + std::to_string(cfg.seed));
}

inline RenewalKernel kernel_of(const RunConfig& cfg) {
    return guarded("kernel", [&] { return make_kernel(cfg.kernel); });
}

inline DisorderChain chain_of(const RunConfig& cfg) {
    if (!cfg.chain) throw ConfigError("chain: required by this command");
    return guarded("chain", [&] { return make_chain(*cfg.chain); });
}

inline ScaledChainFamily family_of(const RunConfig& cfg) {
    if (!cfg.family) throw ConfigError("family: required by this command");
    return guarded("family", [&] { return make_family(*cfg.family); });
}

inline void need_betas(const RunConfig& cfg) {
    if (cfg.betas.empty()) throw ConfigError("grid.betas: required by this command");
}
inline void need_hs(const RunConfig& cfg) {
    if (cfg.hs.empty()) throw ConfigError("grid.hs: required by this command");
}
inline void need_lengths(const RunConfig& cfg) {
    if (cfg.lengths.empty()) throw ConfigError("grid.N: required by this command");
}

}  // namespace rundetail

inline std::string run_critical_curve(const RunConfig& cfg) {
    rundetail::need_betas(cfg);
    const AnnealedModel model(rundetail::kernel_of(cfg), rundetail::chain_of(cfg));
    CsvWriter w;
    rundetail::provenance(w, cfg, "critical-curve");
    w.line("beta,h_c_a,lambda0");
    for (const CriticalPoint& p : model.critical_curve(cfg.betas))
        w.row({format_sig17(p.beta), format_sig17(p.h_critical), format_sig17(p.lambda0)});
    return w.text();
}

inline std::string run_free_energy(const RunConfig& cfg) {
    rundetail::need_betas(cfg);
    rundetail::need_hs(cfg);
    const bool with_mc = cfg.samples > 0;
    if (with_mc) rundetail::need_lengths(cfg);
    const RenewalKernel kernel = rundetail::kernel_of(cfg);
    const DisorderChain chain = rundetail::chain_of(cfg);
    const AnnealedModel model(kernel, chain);
    CsvWriter w;
    rundetail::provenance(w, cfg, "free-energy");
    w.line(with_mc ? "beta,h,F_a,regime,meanF,stderr" : "beta,h,F_a,regime");
    std::uint64_t row_index = 0;
    for (double beta : cfg.betas)
        for (double h : cfg.hs) {
            const AnnealedSolution sol = model.solve_free_energy(beta, h);
            if (with_mc) {
                const McEstimate mc =
                    mc_quenched_free_energy(kernel, chain, beta, h, cfg.lengths[0], cfg.samples,
                                            derive_seed(cfg.seed, row_index));
                w.row({format_sig17(beta), format_sig17(h), format_sig17(sol.free_energy),
                       to_string(sol.regime), format_sig17(mc.mean), format_sig17(mc.std_error)});
            } else {
                w.row({format_sig17(beta), format_sig17(h), format_sig17(sol.free_energy),
                       to_string(sol.regime)});
            }
            ++row_index;
        }
    return w.text();
}

inline std::string run_modelb(const RunConfig& cfg) {
    rundetail::need_betas(cfg);
    rundetail::need_hs(cfg);
    rundetail::need_lengths(cfg);
    if (cfg.samples < 1) throw ConfigError("samples: modelb needs at least 1 sample");
    const RenewalKernel kernel = rundetail::kernel_of(cfg);
    const ScaledChainFamily family = rundetail::family_of(cfg);
    CsvWriter w;
    rundetail::provenance(w, cfg, "modelb");
    w.line("N,gamma,beta,h,meanF,stderr,meanB,F_limit,branch");
    std::uint64_t row_index = 0;
    for (int n : cfg.lengths)
        for (double beta : cfg.betas)
            for (double h : cfg.hs) {
                const ModelBExperiment exp = finite_n_experiment(
                    family, kernel, beta, h, n, cfg.samples, derive_seed(cfg.seed, row_index));
                const LimitFreeEnergy lim = limit_free_energy(family, kernel, beta, h);
                w.row({std::to_string(n), format_sig17(family.gamma), format_sig17(beta),
                       format_sig17(h), format_sig17(exp.free_energy.mean),
                       format_sig17(exp.free_energy.std_error), format_sig17(exp.mean_strips),
                       format_sig17(lim.value), std::to_string(lim.branch)});
                ++row_index;
            }
    return w.text();
}

inline std::string run_phase_diagram(const RunConfig& cfg) {
    rundetail::need_betas(cfg);
    rundetail::need_hs(cfg);
    const RenewalKernel kernel = rundetail::kernel_of(cfg);
    const ScaledChainFamily family = rundetail::family_of(cfg);
    CsvWriter w;
    rundetail::provenance(w, cfg, "phase-diagram");
    w.line("beta,h,F_limit,branch");
    for (double beta : cfg.betas)
        for (const LimitFreeEnergy& p : phase_diagram(family, kernel, beta, cfg.hs))
            w.row({format_sig17(p.beta), format_sig17(p.h), format_sig17(p.value),
                   std::to_string(p.branch)});
    return w.text();
}

namespace rundetail {

inline void report_line(ValidateReport& rep, const std::string& name, const std::string& detail,
                        bool pass) {
    std::string line = name;
    if (line.size() < 44) line.resize(44, ' ');
    line += detail;
    if (line.size() < 76)
        line.resize(76, ' ');
    else
        line += ' ';
    line += pass ? "PASS" : "FAIL";
    rep.text += line + "\n";
    rep.ok = rep.ok && pass;
}

inline std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

}  // namespace rundetail

// Self-checks against the enumeration oracles, closed-form identities, and
// the eigenvector sandwich on the annealed partition function.
inline ValidateReport run_validate(const RunConfig& cfg) {
    using rundetail::report_line;
    using rundetail::sci;
    const RenewalKernel kernel = rundetail::kernel_of(cfg);
    const DisorderChain chain = rundetail::chain_of(cfg);
    const AnnealedModel model(kernel, chain);
    const std::size_t s = chain.n_states();
    ValidateReport rep;

    {   // quenched DP against bitmask enumeration on random small instances
        std::mt19937_64 eng = make_engine(cfg.seed, 1001);
        double max_err = 0.0;
        for (int r = 0; r < 40; ++r) {
            const int n = 3 + int(eng() % 10);
            const double beta = 1.5 * uniform01(eng);
            const double h = 2.0 * uniform01(eng) - 1.0;
            const DisorderPath path = sample_path(chain, n, derive_seed(cfg.seed, 2000 + r));
            const double z = oracle::enum_quenched_partition(kernel, path.values, beta, h);
            const double dp = quenched_logZ(kernel, path.values, beta, h).log_value;
            max_err = std::max(max_err, std::abs(dp - std::log(z)));
        }
        report_line(rep, "[oracle] quenched dp vs enumeration",
                    "max |dlogZ| = " + sci(max_err), max_err <= 1e-10);
    }

    {   // annealed DP against subset-times-marginal enumeration
        std::mt19937_64 eng = make_engine(cfg.seed, 1002);
        int n_max = 2;
        for (int n = 2; n <= 10; ++n)
            if (std::ldexp(double(n) * double(s) * double(s), n - 1) <= 2e7) n_max = n;
        double max_err = 0.0;
        for (int r = 0; r < 25; ++r) {
            const int n = 2 + int(eng() % std::uint64_t(n_max - 1));
            const double beta = 1.5 * uniform01(eng);
            const double h = 2.0 * uniform01(eng) - 1.0;
            const double z = oracle::enum_annealed_partition(kernel, chain, beta, h, n);
            const double dp = annealed_logZ(kernel, chain, beta, h, n).log_value;
            max_err = std::max(max_err, std::abs(dp - std::log(z)));
        }
        report_line(rep, "[oracle] annealed dp vs enumeration",
                    "max |dlogZ| = " + sci(max_err), max_err <= 1e-10);
    }

    {   // Fubini: path-enumerated E[Z] equals subset-enumerated E[Z]; and the
        // annealing inequality E[log Z] <= log E[Z] holds exactly
        std::mt19937_64 eng = make_engine(cfg.seed, 1003);
        int n_max = 0;
        for (int n = 2; n <= 10; ++n)
            if (std::pow(double(s), double(n)) * std::ldexp(double(n), n - 1) <= 2e7) n_max = n;
        if (n_max >= 2) {
            double max_err = 0.0, min_gap = 1e300;
            for (int r = 0; r < 10; ++r) {
                const int n = 2 + int(eng() % std::uint64_t(n_max - 1));
                const double beta = 1.5 * uniform01(eng);
                const double h = 2.0 * uniform01(eng) - 1.0;
                const double avg = oracle::enum_disorder_average(
                    kernel, chain, beta, h, n, oracle::DisorderFunctional::partition);
                const double ann = oracle::enum_annealed_partition(kernel, chain, beta, h, n);
                max_err = std::max(max_err, std::abs(avg - ann) / std::abs(ann));
                const double quenched_mean = oracle::enum_disorder_average(
                    kernel, chain, beta, h, n, oracle::DisorderFunctional::free_energy);
                min_gap = std::min(min_gap, std::log(ann) / double(n) - quenched_mean);
            }
            report_line(rep, "[oracle] disorder-average fubini",
                        "max rel err = " + sci(max_err), max_err <= 1e-10);
            report_line(rep, "[oracle] annealing inequality",
                        "min gap = " + sci(min_gap), min_gap >= -1e-12);
        } else {
            report_line(rep, "[oracle] disorder-average fubini", "state space too large", false);
        }
    }

    {   // lambda(b; beta, h) = e^h lambda(b; beta, 0)
        const double b = 0.3, beta = 0.8, h = 0.6;
        const double with_h = perron(model.tilted_series(beta, h, b).A).lambda;
        const double base = perron(model.tilted_series(beta, 0.0, b).A).lambda;
        const double err = std::abs(with_h / (std::exp(h) * base) - 1.0);
        report_line(rep, "[formula] field shift of perron root",
                    "rel err = " + sci(err), err <= 1e-10);
    }

    {   // critical curve passes through the origin
        const double hc0 = model.critical_curve(std::vector<double>{0.0})[0].h_critical;
        report_line(rep, "[formula] critical curve at beta=0",
                    "|h_c(0)| = " + sci(std::abs(hc0)), std::abs(hc0) <= 1e-12);
    }

    {   // symmetric two-state chains admit a quadratic closed form for the root
        const bool applies = s == 2 && std::abs(chain.Q(0, 1) - chain.Q(1, 0)) <= 1e-14 &&
                             std::abs(chain.scores[0] + chain.scores[1]) <= 1e-14;
        if (applies) {
            const double eps = chain.Q(0, 1);
            const double a = std::abs(chain.scores[1]);
            KahanSum pk;
            for (int t = 1; t <= kernel.cutoff; ++t)
                pk.add(kernel.prob(t) * 0.5 * (1.0 + std::pow(1.0 - 2.0 * eps, double(t))));
            const double p = pk.value();
            double max_err = 0.0;
            for (double beta : {0.0, 0.3, 0.7, 1.1, 1.5}) {
                const double ch = std::cosh(beta * a);
                const double formula = p * ch + std::sqrt(p * p * ch * ch - (2.0 * p - 1.0));
                const double lam = perron(model.tilted_series(beta, 0.0, 0.0).A).lambda;
                max_err = std::max(max_err, std::abs(lam / formula - 1.0));
            }
            report_line(rep, "[formula] two-state perron root",
                        "max rel err = " + sci(max_err), max_err <= 1e-9);
        } else {
            report_line(rep, "[formula] two-state perron root", "not a symmetric 2-state chain",
                        true);
        }
    }

    {   // E Z_N e^{-F N} / P(N renews) stays inside [min xi ratio, max xi ratio]
        const double beta = 1.0;
        const double hc = model.solve_free_energy(beta, 0.0).h_critical;
        const AnnealedSolution sol = model.solve_free_energy(beta, hc + 0.3);
        const SemiMarkovKernel smk = model.tilted_kernel(sol);
        const std::vector<double>& xi = sol.perron_at_root.xi;
        double c = 1e300, C = 0.0;
        for (std::size_t x = 0; x < s; ++x)
            for (std::size_t y = 0; y < s; ++y) {
                c = std::min(c, xi[x] / xi[y]);
                C = std::max(C, xi[x] / xi[y]);
            }
        const std::vector<double> mass = model.renewal_mass_series(smk, 2000);
        bool inside = true;
        double worst = 1.0;
        for (int n : {500, 1000, 2000}) {
            const double log_ez =
                annealed_log_partition(kernel, chain, beta, sol.h, n);
            const double ratio =
                std::exp(log_ez - sol.free_energy * double(n) - std::log(mass[std::size_t(n - 1)]));
            inside = inside && ratio >= c * (1.0 - 1e-6) && ratio <= C * (1.0 + 1e-6);
            worst = ratio;
        }
        report_line(rep, "[sandwich] annealed mass ratio in [c,C]",
                    "ratio(N=2000) = " + sci(worst) + " c=" + sci(c) + " C=" + sci(C), inside);
    }

    rep.text += rep.ok ? "validate: PASS\n" : "validate: FAIL\n";
    return rep;
}

}  // namespace pinning
