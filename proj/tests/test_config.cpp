#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "pinning/config.hpp"
#include "test_support.hpp"

using namespace pinning;
using nlohmann::json;
using Catch::Matchers::WithinAbs;

namespace {

json base_doc() {
    return json::parse(R"({
        "kernel": {"alpha": 0.5, "T_K": 2000},
        "chain": {
            "states": ["+", "-"],
            "f": [1.0, -1.0],
            "Q": [[0.3, 0.7], [0.7, 0.3]]
        },
        "grid": {"betas": [0.0, 1.0], "hs": [0.5], "N": [400]},
        "samples": 8,
        "seed": 11,
        "out": "run.csv"
    })");
}

}  // namespace

TEST_CASE("a full document parses into typed configuration", "[config]") {
    const RunConfig cfg = parse_run_config(base_doc());
    REQUIRE(cfg.kernel.alpha == 0.5);
    REQUIRE(cfg.kernel.cutoff == 2000);
    REQUIRE(cfg.kernel.variation.kind == SlowVariationKind::constant);
    REQUIRE(cfg.chain.has_value());
    REQUIRE_FALSE(cfg.family.has_value());
    REQUIRE(cfg.chain->states == std::vector<std::string>{"+", "-"});
    REQUIRE(cfg.chain->Q(0, 1) == 0.7);
    REQUIRE(cfg.betas == std::vector<double>{0.0, 1.0});
    REQUIRE(cfg.hs == std::vector<double>{0.5});
    REQUIRE(cfg.lengths == std::vector<int>{400});
    REQUIRE(cfg.samples == 8);
    REQUIRE(cfg.seed == 11);
    REQUIRE(cfg.out == "run.csv");
}

TEST_CASE("kernel prefactor variants parse", "[config]") {
    json d = base_doc();
    d["kernel"]["L"] = {{"variant", "log_power"}, {"rho", 0.7}};
    REQUIRE(parse_run_config(d).kernel.variation.kind == SlowVariationKind::log_power);
    REQUIRE(parse_run_config(d).kernel.variation.rho == 0.7);
    d["kernel"]["L"] = {{"variant", "table"}, {"table", {1.0, 2.0, 0.5}}};
    const SlowVariation v = parse_run_config(d).kernel.variation;
    REQUIRE(v.kind == SlowVariationKind::table);
    REQUIRE(v.table == std::vector<double>{1.0, 2.0, 0.5});
    d["kernel"]["L"] = {{"variant", "mystery"}};
    REQUIRE_THROWS_AS(parse_run_config(d), ConfigError);
}

TEST_CASE("moving-average chains parse from their own block", "[config]") {
    json d = base_doc();
    d["chain"] = {{"moving_average",
                   {{"weights", {1.0, 0.6}}, {"alphabet", {1.0, -1.0}}, {"probs", {0.5, 0.5}}}},
                  {"center", true}};
    const RunConfig cfg = parse_run_config(d);
    REQUIRE(cfg.chain->moving_average);
    REQUIRE(cfg.chain->center);
    const DisorderChain chain = make_chain(*cfg.chain);
    REQUIRE(chain.n_states() == 4);
    REQUIRE_THAT(chain.mean_score(), WithinAbs(0.0, 1e-14));
}

TEST_CASE("family documents parse and build", "[config]") {
    json d = base_doc();
    d.erase("chain");
    d["family"] = {{"states", {"+", "-"}},
                   {"f", {1.0, -1.0}},
                   {"Q", {{0.0, 1.0}, {1.0, 0.0}}},
                   {"gamma", 0.4}};
    const RunConfig cfg = parse_run_config(d);
    REQUIRE(cfg.family.has_value());
    const ScaledChainFamily fam = make_family(*cfg.family);
    REQUIRE(fam.gamma == 0.4);
    REQUIRE_THAT(fam.mu[0], WithinAbs(0.5, 1e-14));
}

TEST_CASE("unknown or malformed keys are named in the error", "[config]") {
    json d = base_doc();
    d["bogus"] = 1;
    REQUIRE_THROWS_WITH(parse_run_config(d), Catch::Matchers::ContainsSubstring("bogus"));

    d = base_doc();
    d["kernel"]["smoothing"] = true;
    REQUIRE_THROWS_WITH(parse_run_config(d), Catch::Matchers::ContainsSubstring("kernel"));

    d = base_doc();
    d["chain"]["extra"] = 1;
    REQUIRE_THROWS_AS(parse_run_config(d), ConfigError);

    d = base_doc();
    d.erase("kernel");
    REQUIRE_THROWS_WITH(parse_run_config(d), Catch::Matchers::ContainsSubstring("kernel"));

    d = base_doc();
    d["kernel"]["alpha"] = "half";
    REQUIRE_THROWS_WITH(parse_run_config(d), Catch::Matchers::ContainsSubstring("kernel.alpha"));

    d = base_doc();
    d["chain"]["Q"] = {{0.3, 0.7}};
    REQUIRE_THROWS_AS(parse_run_config(d), ConfigError);

    d = base_doc();
    d["grid"]["N"] = {0};
    REQUIRE_THROWS_AS(parse_run_config(d), ConfigError);

    d = base_doc();
    d["samples"] = -2;
    REQUIRE_THROWS_AS(parse_run_config(d), ConfigError);

    d = base_doc();
    d["seed"] = -5;
    REQUIRE_THROWS_AS(parse_run_config(d), ConfigError);
}

TEST_CASE("mismatched chain dimensions are rejected", "[config]") {
    json d = base_doc();
    d["chain"]["f"] = {1.0, -1.0, 0.0};
    REQUIRE_THROWS_AS(parse_run_config(d), ConfigError);
}

TEST_CASE("configuration hashes track the canonical document", "[config]") {
    RunConfig a = parse_run_config(base_doc());
    RunConfig b = parse_run_config(base_doc());
    REQUIRE(config_hash(a) == config_hash(b));

    override_seed(b, 999);
    REQUIRE(b.seed == 999);
    REQUIRE(config_hash(a) != config_hash(b));
    // the document itself reflects the override
    REQUIRE(b.doc.at("seed").get<std::uint64_t>() == 999);

    override_out(b, "elsewhere.csv");
    REQUIRE(b.out == "elsewhere.csv");
    REQUIRE(b.doc.at("out").get<std::string>() == "elsewhere.csv");
}

TEST_CASE("the hash follows the reference byte recipe", "[config]") {
    REQUIRE(fnv1a64("") == 0xcbf29ce484222325ULL);
    REQUIRE(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("built objects match direct construction", "[config]") {
    const RunConfig cfg = parse_run_config(base_doc());
    const RenewalKernel k = make_kernel(cfg.kernel);
    const RenewalKernel direct = build_kernel(0.5, SlowVariation::constant(), 2000);
    REQUIRE(k.probs == direct.probs);
    const DisorderChain c = make_chain(*cfg.chain);
    const DisorderChain dc = testsup::stay_chain(0.3);
    REQUIRE(c.scores == dc.scores);
    REQUIRE(c.Q.data() == dc.Q.data());
    REQUIRE(c.mu0 == dc.mu0);
}

TEST_CASE("config files load with filename context on errors", "[config]") {
    REQUIRE_THROWS_AS(load_run_config("/nonexistent/nowhere.json"), ConfigError);
    const std::string path = "bad_config_test.json";
    {
        std::ofstream out(path);
        out << "{ not json";
    }
    REQUIRE_THROWS_WITH(load_run_config(path), Catch::Matchers::ContainsSubstring(path));
    std::remove(path.c_str());

    const std::string good = "good_config_test.json";
    {
        std::ofstream out(good);
        out << base_doc().dump();
    }
    const RunConfig cfg = load_run_config(good);
    REQUIRE(cfg.seed == 11);
    std::remove(good.c_str());
}
