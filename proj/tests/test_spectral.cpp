#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pinning/homogeneous.hpp"
#include "pinning/spectral.hpp"
#include "test_support.hpp"

using namespace pinning;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const AnnealedModel& stay_model() {
    static const AnnealedModel m(testsup::standard_kernel(), testsup::stay_chain(0.3));
    return m;
}

}  // namespace

TEST_CASE("power iteration recovers dominant eigenpairs", "[spectral]") {
    Matrix one(1);
    one(0, 0) = 2.5;
    const PerronData p1 = perron(one);
    REQUIRE_THAT(p1.lambda, WithinAbs(2.5, 1e-14));
    REQUIRE_THAT(p1.xi[0], WithinAbs(1.0, 1e-14));

    Matrix a(2);
    a(0, 0) = 1.0;
    a(0, 1) = 0.7;
    a(1, 0) = 0.2;
    a(1, 1) = 1.6;
    const PerronData p2 = perron(a, 1e-14);
    const double want = 1.3 + std::sqrt(0.09 + 0.14);
    REQUIRE_THAT(p2.lambda, WithinAbs(want, 1e-13));
    REQUIRE(p2.residual <= 1e-14 * std::max(1.0, p2.lambda));
    for (double x : p2.xi) REQUIRE(x > 0.0);

    Matrix z(2);
    z(0, 1) = 1.0;
    z(1, 0) = 1.0;
    REQUIRE_THROWS_AS(perron(z), std::invalid_argument);
}

TEST_CASE("one-step transfer matrices unfold the definition", "[spectral]") {
    const AnnealedModel& m = stay_model();
    const RenewalKernel& k = testsup::standard_kernel();
    const Matrix m1 = m.transfer_matrix(0.0, 0.0, 1);
    for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y)
            REQUIRE_THAT(m1(x, y), WithinAbs(k.prob(1) * m.chain().Q(x, y), 1e-15));

    // row sums factor into kernel mass times the tilted chain marginal
    Matrix qt = m.chain().Q;
    for (int t = 1; t <= 5; ++t) {
        if (t > 1) qt = qt * m.chain().Q;
        const Matrix mt = m.transfer_matrix(0.8, 0.2, t);
        for (std::size_t x = 0; x < 2; ++x) {
            double want = 0.0;
            for (std::size_t y = 0; y < 2; ++y)
                want += k.prob(t) * qt(x, y) * std::exp(0.8 * m.chain().scores[y] + 0.2);
            REQUIRE_THAT(mt.row_sum(x), WithinRel(want, 1e-13));
        }
    }
}

TEST_CASE("the undiscounted untilted series is stochastic", "[spectral]") {
    const TiltedSeries a = stay_model().tilted_series(0.0, 0.0, 0.0);
    REQUIRE_THAT(a.A.row_sum(0), WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(a.A.row_sum(1), WithinAbs(1.0, 1e-12));
    REQUIRE(a.tail_bound <= 1e-100);
}

TEST_CASE("two-state series entries follow the parity split", "[spectral]") {
    const RenewalKernel& k = testsup::standard_kernel();
    const double eps = 0.3, beta = 0.9;
    KahanSum psum;
    double rp = 1.0;
    for (int t = 1; t <= k.cutoff; ++t) {
        rp *= 2.0 * eps - 1.0;
        psum.add(k.prob(t) * 0.5 * (1.0 + rp));
    }
    const double p = psum.value();
    const AnnealedModel m(k, testsup::stay_chain(eps));
    const TiltedSeries a = m.tilted_series(beta, 0.0, 0.0);
    REQUIRE_THAT(a.A(0, 0), WithinAbs(p * std::exp(beta), 1e-12));
    REQUIRE_THAT(a.A(0, 1), WithinAbs((1.0 - p) * std::exp(-beta), 1e-12));
    REQUIRE_THAT(a.A(1, 0), WithinAbs((1.0 - p) * std::exp(beta), 1e-12));
    REQUIRE_THAT(a.A(1, 1), WithinAbs(p * std::exp(-beta), 1e-12));
}

TEST_CASE("frozen spectral reference values stay put", "[spectral]") {
    const AnnealedModel& m = stay_model();
    const PerronData p = perron(m.tilted_series(1.0, 0.0, 0.0).A);
    REQUIRE_THAT(p.lambda, WithinAbs(1.42878614250103, 1e-10));
    REQUIRE_THAT(-std::log(p.lambda), WithinAbs(-0.35682523239557745, 1e-10));
    REQUIRE_THAT(p.lambda,
                 WithinAbs(testsup::two_state_lambda(testsup::standard_kernel(), 0.3, 1.0, 0.0),
                           1e-11));
}

TEST_CASE("critical curves match scalar closed forms", "[spectral]") {
    const RenewalKernel& k = testsup::standard_kernel();

    const AnnealedModel iid(k, testsup::stay_chain(0.5));
    for (double beta : {0.0, 0.5, 1.0, 2.0, 3.0}) {
        const double hc = -std::log(perron(iid.tilted_series(beta, 0.0, 0.0).A).lambda);
        REQUIRE_THAT(hc, WithinAbs(-std::log(std::cosh(beta)), 1e-10));
    }

    const AnnealedModel periodic(k, testsup::stay_chain(0.0));
    REQUIRE_FALSE(periodic.tail_replaced());
    KahanSum even;
    for (int t = 2; t <= k.cutoff; t += 2) even.add(k.prob(t));
    const double p0 = even.value();
    for (double beta : {0.4, 1.0, 1.8}) {
        const double lam = perron(periodic.tilted_series(beta, 0.0, 0.0).A).lambda;
        const double ch = std::cosh(beta);
        const double want = p0 * ch + std::sqrt(p0 * p0 * ch * ch - 2.0 * p0 + 1.0);
        REQUIRE_THAT(lam, WithinRel(want, 1e-11));
    }

    const std::vector<double> betas = {0.0, 0.5, 1.0};
    const std::vector<CriticalPoint> curve = stay_model().critical_curve(betas);
    REQUIRE(curve.size() == 3);
    REQUIRE_THAT(curve[0].h_critical, WithinAbs(0.0, 1e-12));
    REQUIRE(curve[2].h_critical < curve[1].h_critical);
    REQUIRE_THAT(curve[2].h_critical, WithinAbs(-std::log(curve[2].lambda0), 1e-15));
}

TEST_CASE("rewards shift the eigenvalue multiplicatively", "[spectral]") {
    const AnnealedModel& m = stay_model();
    const double with_h = perron(m.tilted_series(0.8, 0.6, 0.3).A, 1e-14).lambda;
    const double base = perron(m.tilted_series(0.8, 0.0, 0.3).A, 1e-14).lambda;
    REQUIRE_THAT(with_h, WithinRel(std::exp(0.6) * base, 1e-12));
}

TEST_CASE("free-energy solves land on the unit eigenvalue", "[spectral]") {
    const AnnealedModel& m = stay_model();
    const double hc = -0.35682523239557745;

    const AnnealedSolution del = m.solve_free_energy(1.0, hc - 0.2);
    REQUIRE(del.free_energy == 0.0);
    REQUIRE(del.regime == Regime::delocalized);

    const AnnealedSolution crit = m.solve_free_energy(1.0, del.h_critical);
    REQUIRE(crit.regime != Regime::localized);

    const AnnealedSolution loc = m.solve_free_energy(1.0, hc + 0.5);
    REQUIRE(loc.regime == Regime::localized);
    REQUIRE_THAT(loc.free_energy, WithinAbs(0.10033095946482717, 1e-10));
    REQUIRE_THAT(loc.perron_at_root.lambda, WithinAbs(1.0, 1e-10));

    // scalar-root cross-check of the same quantity
    const RenewalKernel& k = testsup::standard_kernel();
    double lo = 0.0, hi = 1.0;
    const double target = std::exp(-(hc + 0.5));
    while (testsup::two_state_lambda(k, 0.3, 1.0, hi) > target) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        (testsup::two_state_lambda(k, 0.3, 1.0, mid) > target ? lo : hi) = mid;
    }
    REQUIRE_THAT(loc.free_energy, WithinAbs(0.5 * (lo + hi), 1e-10));
}

TEST_CASE("without coupling the annealed value is the homogeneous one", "[spectral]") {
    const AnnealedModel& m = stay_model();
    const RenewalKernel& k = testsup::standard_kernel();
    for (double h : {0.2, 0.5, 1.0, 2.0}) {
        const AnnealedSolution s = m.solve_free_energy(0.0, h);
        REQUIRE_THAT(s.free_energy, WithinAbs(homogeneous_free_energy(k, h).free_energy, 1e-10));
    }
}

TEST_CASE("window-two moving averages factor into a product form", "[spectral]") {
    const RenewalKernel& k = testsup::standard_kernel();
    const double a0 = 1.0, a1 = 0.6;
    const AnnealedModel m(k, build_moving_average_chain({a0, a1}, {1.0, -1.0}, {0.5, 0.5}, false));
    REQUIRE(m.tail_replaced());
    REQUIRE(m.mix_norm() == 0.0);
    for (double beta : {0.3, 0.9, 1.5}) {
        const double lam = perron(m.tilted_series(beta, 0.0, 0.0).A).lambda;
        const double cu = std::cosh(a0 * beta), cv = std::cosh(a1 * beta);
        const double want =
            cu * cv * (1.0 + k.prob(1) * (std::cosh((a0 + a1) * beta) / (cu * cv) - 1.0));
        REQUIRE_THAT(lam, WithinRel(want, 1e-12));
    }
}

TEST_CASE("heavy discounting kills the series", "[spectral]") {
    const double lam = perron(stay_model().tilted_series(1.0, 0.0, 20.0).A).lambda;
    REQUIRE(lam < 1e-7);
}

TEST_CASE("localized return kernels are stochastic rows", "[spectral]") {
    const AnnealedModel& m = stay_model();
    const AnnealedSolution s = m.solve_free_energy(1.0, -0.35682523239557745 + 0.3);
    const SemiMarkovKernel smk = m.tilted_kernel(s);
    REQUIRE(smk.sigma == 2);
    REQUIRE(smk.t_len > 100);
    REQUIRE(std::abs(smk.row_defect[0]) <= 1e-9);
    REQUIRE(std::abs(smk.row_defect[1]) <= 1e-9);
    REQUIRE(smk.at(0, 0, 1) > 0.0);
    REQUIRE(smk.at(0, 0, smk.t_len + 5) == 0.0);
}

TEST_CASE("delocalized return kernels lose mass at rate lambda", "[spectral]") {
    const AnnealedModel& m = stay_model();
    const AnnealedSolution s = m.solve_free_energy(1.0, -0.35682523239557745 - 0.4);
    REQUIRE(s.free_energy == 0.0);
    const SemiMarkovKernel smk = m.tilted_kernel(s);
    for (int x = 0; x < 2; ++x)
        REQUIRE_THAT(1.0 - smk.row_defect[std::size_t(x)], WithinAbs(s.lambda0, 1e-12));
}

TEST_CASE("a one-state chain reduces to a tilted renewal law", "[spectral]") {
    const RenewalKernel& k = testsup::standard_kernel();
    const DisorderChain c = build_chain({"x"}, {0.4}, Matrix::identity(1), false);
    const AnnealedModel m(k, c);
    const AnnealedSolution s = m.solve_free_energy(1.0, 0.3);
    REQUIRE_THAT(s.free_energy,
                 WithinAbs(homogeneous_free_energy(k, 0.3 + 0.4).free_energy, 1e-12));
    const SemiMarkovKernel smk = m.tilted_kernel(s);
    REQUIRE(std::abs(smk.row_defect[0]) <= 1e-10);
    REQUIRE_THAT(smk.at(0, 0, 2),
                 WithinRel(k.prob(2) * std::exp(0.4 + 0.3 - 2.0 * s.free_energy), 1e-12));
}

TEST_CASE("return-time mass starts right and stays positive", "[spectral]") {
    const AnnealedModel& m = stay_model();
    const AnnealedSolution s = m.solve_free_energy(1.0, -0.35682523239557745 + 0.3);
    const SemiMarkovKernel smk = m.tilted_kernel(s);
    const std::vector<double> mass = m.renewal_mass_series(smk, 10000);

    double m1 = 0.0;
    for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y) m1 += m.chain().mu0[x] * smk.at(x, y, 1);
    REQUIRE_THAT(mass[0], WithinRel(m1, 1e-13));

    double low = 1e300;
    for (int n = 1000; n <= 10000; ++n) low = std::min(low, mass[std::size_t(n - 1)]);
    REQUIRE(low > 0.1);
}

TEST_CASE("eigenvector ratios bracket the recentred partition mass", "[spectral]") {
    const RenewalKernel& k = testsup::standard_kernel();
    const DisorderChain c = testsup::stay_chain(0.3);
    const AnnealedModel m(k, c);
    const AnnealedSolution s = m.solve_free_energy(1.0, -0.35682523239557745 + 0.3);
    const SemiMarkovKernel smk = m.tilted_kernel(s);
    const std::vector<double> mass = m.renewal_mass_series(smk, 2000);
    double cmin = 1e300, cmax = 0.0;
    for (double a : s.perron_at_root.xi)
        for (double b : s.perron_at_root.xi) {
            cmin = std::min(cmin, a / b);
            cmax = std::max(cmax, a / b);
        }
    for (int n : {500, 1000, 2000}) {
        const double lz = annealed_logZ(k, c, 1.0, s.h, n).log_value;
        const double ratio = std::exp(lz - s.free_energy * n) / mass[std::size_t(n - 1)];
        REQUIRE(ratio >= cmin - 1e-6);
        REQUIRE(ratio <= cmax + 1e-6);
    }
}

TEST_CASE("slowly mixing wide chains refuse the full summation", "[spectral]") {
    const RenewalKernel& k = testsup::standard_kernel();
    const std::size_t n = 40;
    Matrix q(n);
    std::vector<std::string> labels;
    std::vector<double> scores;
    for (std::size_t i = 0; i < n; ++i) {
        labels.push_back("s" + std::to_string(i));
        scores.push_back(i < n / 2 ? 1.0 : -1.0);
        for (std::size_t j = 0; j < n; ++j) {
            const bool same = (i < n / 2) == (j < n / 2);
            q(i, j) = same ? (1.0 - 1e-9) / double(n / 2) : 1e-9 / double(n / 2);
        }
    }
    const AnnealedModel m(k, build_chain(labels, scores, q, false));
    REQUIRE_FALSE(m.tail_replaced());
    REQUIRE_THROWS_AS(m.tilted_series(1.0, 0.0, 0.0), std::runtime_error);
}
