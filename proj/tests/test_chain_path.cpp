#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "pinning/disorder_chain.hpp"
#include "pinning/disorder_path.hpp"
#include "pinning/rng.hpp"
#include "test_support.hpp"

using namespace pinning;
using Catch::Matchers::WithinAbs;

TEST_CASE("chain validation rejects malformed transition matrices", "[chain]") {
    Matrix bad(2);
    bad(0, 0) = 0.6;
    bad(0, 1) = 0.6;
    bad(1, 0) = 0.5;
    bad(1, 1) = 0.5;
    REQUIRE_THROWS_AS(build_chain({"a", "b"}, {1.0, -1.0}, bad, false), std::invalid_argument);

    Matrix neg(2);
    neg(0, 0) = 1.2;
    neg(0, 1) = -0.2;
    neg(1, 0) = 0.5;
    neg(1, 1) = 0.5;
    REQUIRE_THROWS_AS(build_chain({"a", "b"}, {1.0, -1.0}, neg, false), std::invalid_argument);

    // two disconnected blocks
    REQUIRE_THROWS_AS(build_chain({"a", "b"}, {1.0, -1.0}, Matrix::identity(2), false),
                      std::invalid_argument);

    REQUIRE_THROWS_AS(build_chain({"a"}, {1.0, -1.0}, Matrix::identity(1), false),
                      std::invalid_argument);
}

TEST_CASE("stationary law solves mu Q = mu", "[chain]") {
    const DisorderChain sym = testsup::stay_chain(0.3);
    REQUIRE_THAT(sym.mu0[0], WithinAbs(0.5, 1e-14));
    REQUIRE_THAT(sym.mu0[1], WithinAbs(0.5, 1e-14));

    Matrix q(2);
    q(0, 0) = 0.9;
    q(0, 1) = 0.1;
    q(1, 0) = 0.4;
    q(1, 1) = 0.6;
    const DisorderChain asym = build_chain({"u", "d"}, {1.0, 0.0}, q, false);
    REQUIRE_THAT(asym.mu0[0], WithinAbs(0.8, 1e-13));
    REQUIRE_THAT(asym.mu0[1], WithinAbs(0.2, 1e-13));

    auto eng = make_engine(3, 0);
    Matrix r(5);
    for (std::size_t i = 0; i < 5; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 5; ++j) s += (r(i, j) = 0.05 + uniform01(eng));
        for (std::size_t j = 0; j < 5; ++j) r(i, j) /= s;
    }
    const DisorderChain big =
        build_chain({"1", "2", "3", "4", "5"}, {1, 2, 3, 4, 5}, r, false);
    const std::vector<double> img = mul_left(big.mu0, big.Q);
    for (std::size_t j = 0; j < 5; ++j) REQUIRE_THAT(img[j], WithinAbs(big.mu0[j], 1e-13));
}

TEST_CASE("centering subtracts the stationary mean from the scores", "[chain]") {
    Matrix q(2);
    q(0, 0) = 0.9;
    q(0, 1) = 0.1;
    q(1, 0) = 0.4;
    q(1, 1) = 0.6;
    const DisorderChain c = build_chain({"u", "d"}, {1.0, 0.0}, q, true);
    REQUIRE_THAT(c.scores[0], WithinAbs(0.2, 1e-13));
    REQUIRE_THAT(c.scores[1], WithinAbs(-0.8, 1e-13));
    REQUIRE_THAT(c.mean_score(), WithinAbs(0.0, 1e-14));
}

TEST_CASE("moving-average chain tracks the innovation window", "[chain]") {
    const double a0 = 1.0, a1 = 0.6;
    const DisorderChain c =
        build_moving_average_chain({a0, a1}, {1.0, -1.0}, {0.5, 0.5}, false);
    REQUIRE(c.n_states() == 4);
    // exact product law over the window
    for (double m : c.mu0) REQUIRE_THAT(m, WithinAbs(0.25, 1e-15));
    // scores combine newest innovation with weight a0, oldest with a1
    std::multiset<double> got(c.scores.begin(), c.scores.end());
    const std::multiset<double> want = {a1 + a0, a1 - a0, -a1 + a0, -a1 - a0};
    auto it = want.begin();
    for (double g : got) REQUIRE_THAT(g, WithinAbs(*it++, 1e-15));
    // a transition keeps the shifted window: exactly two targets at prob 1/2
    for (std::size_t x = 0; x < 4; ++x) {
        int nonzero = 0;
        for (std::size_t y = 0; y < 4; ++y)
            if (c.Q(x, y) != 0.0) {
                ++nonzero;
                REQUIRE_THAT(c.Q(x, y), WithinAbs(0.5, 1e-15));
            }
        REQUIRE(nonzero == 2);
    }
}

TEST_CASE("moving-average input validation", "[chain]") {
    REQUIRE_THROWS_AS(build_moving_average_chain({1.0}, {1.0}, {1.0}, false),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(build_moving_average_chain({1.0}, {1.0, -1.0}, {0.7, 0.2}, false),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(
        build_moving_average_chain(std::vector<double>(13, 0.5), {1.0, -1.0}, {0.5, 0.5}, false),
        std::invalid_argument);
}

TEST_CASE("sampled paths are deterministic and start from the invariant law", "[path]") {
    const DisorderChain c = testsup::stay_chain(0.3);
    const DisorderPath a = sample_path(c, 1000, 42);
    const DisorderPath b = sample_path(c, 1000, 42);
    REQUIRE(a.states == b.states);
    REQUIRE(a.values == b.values);
    REQUIRE(a.values.size() == 1000);
    const DisorderPath d = sample_path(c, 1000, 43);
    REQUIRE(a.states != d.states);
    for (double v : a.values) REQUIRE((v == 1.0 || v == -1.0));
}

TEST_CASE("sample statistics match the chain parameters", "[path]") {
    const int n = 100000;
    const DisorderPath p = sample_path(testsup::stay_chain(0.5), n, 7);
    KahanSum mean;
    for (double v : p.values) mean.add(v);
    REQUIRE(std::abs(mean.value() / n) <= 3.0 / std::sqrt(double(n)));

    const DisorderPath q = sample_path(testsup::stay_chain(0.3), n, 8);
    int stays = 0;
    for (int i = 1; i < n; ++i) stays += q.states[std::size_t(i)] == q.states[std::size_t(i - 1)];
    const double frac = double(stays) / double(n - 1);
    REQUIRE(std::abs(frac - 0.3) <= 4.0 * std::sqrt(0.3 * 0.7 / double(n - 1)));
}

TEST_CASE("the periodic chain alternates deterministically", "[path]") {
    const DisorderPath p = sample_path(testsup::stay_chain(0.0), 50, 11);
    for (std::size_t i = 1; i < p.values.size(); ++i)
        REQUIRE(p.values[i] == -p.values[i - 1]);
}

TEST_CASE("strip decomposition splits at value changes", "[path]") {
    const std::vector<double> w = {1.0, 1.0, -1.0};
    const StripDecomposition d = strip_decompose(w);
    REQUIRE(d.complete_count() == 1);
    REQUIRE(d.ends == std::vector<int>{2});
    REQUIRE(d.lengths() == std::vector<int>{2});

    const std::vector<double> flat = {2.0, 2.0, 2.0, 2.0};
    REQUIRE(strip_decompose(flat).complete_count() == 0);

    const std::vector<double> alt = {1.0, -1.0, 1.0, -1.0, 1.0};
    const StripDecomposition da = strip_decompose(alt);
    REQUIRE(da.ends == std::vector<int>{1, 2, 3, 4});
    REQUIRE(da.lengths() == std::vector<int>{1, 1, 1, 1});

    REQUIRE(strip_decompose(std::vector<double>{3.0}).complete_count() == 0);
}

TEST_CASE("path overload of the strip decomposition agrees", "[path]") {
    const DisorderPath p = sample_path(testsup::stay_chain(0.4), 500, 21);
    const StripDecomposition a = strip_decompose(p);
    const StripDecomposition b = strip_decompose(p.values);
    REQUIRE(a.ends == b.ends);
}

TEST_CASE("seed streams separate cleanly", "[path]") {
    REQUIRE(derive_seed(1, 0) != derive_seed(1, 1));
    REQUIRE(derive_seed(1, 0) != derive_seed(2, 0));
    auto e1 = make_engine(5, 0);
    auto e2 = make_engine(5, 0);
    REQUIRE(e1() == e2());
    auto e3 = make_engine(5, 1);
    REQUIRE(e1() != e3());
}
