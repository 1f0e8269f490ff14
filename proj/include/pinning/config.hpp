// JSON run configuration: parsing with key-path error messages, canonical
// hashing for CSV provenance, and builders that turn the parsed blocks into
// model objects.
//
// Schema (all grids optional unless a command needs them):
//   {
//     "kernel": {"alpha": 0.5, "T_K": 100000,
//                "L": {"variant": "constant" | "log_power" | "table",
//                      "rho": 1.0, "table": [..]}},
//     "chain":  {"states": [..], "f": [..], "Q": [[..]], "center": false}
//             | {"moving_average": {"weights": [..], "alphabet": [..],
//                                   "probs": [..]}, "center": false},
//     "family": {"states": [..], "f": [..], "Q": [[..]], "gamma": 0.4},
//     "grid":   {"betas": [..], "hs": [..], "N": [..]},
//     "samples": 200, "seed": 42, "out": "run.csv"
//   }
#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pinning/disorder_chain.hpp"
#include "pinning/matrix.hpp"
#include "pinning/model_b.hpp"
#include "pinning/renewal_kernel.hpp"

namespace pinning {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct KernelConfig {
    double alpha = 0.5;
    SlowVariation variation;
    int cutoff = 1000;
};

struct ChainConfig {
    bool moving_average = false;
    bool center = false;
    // explicit chain
    std::vector<std::string> states;
    std::vector<double> scores;
    Matrix Q;
    // moving-average chain
    std::vector<double> weights, alphabet, alphabet_probs;
};

struct FamilyConfig {
    std::vector<std::string> states;
    std::vector<double> scores;
    Matrix Q;
    double gamma = 0.5;
};

struct RunConfig {
    KernelConfig kernel;
    std::optional<ChainConfig> chain;
    std::optional<FamilyConfig> family;
    std::vector<double> betas, hs;
    std::vector<int> lengths;
    int samples = 0;
    std::uint64_t seed = 0;
    std::string out;
    nlohmann::json doc;
};

namespace cfgdetail {

using nlohmann::json;

inline const json& require(const json& j, const std::string& key, const std::string& ctx) {
    if (!j.is_object() || !j.contains(key))
        throw ConfigError(ctx.empty() ? key + ": missing" : ctx + "." + key + ": missing");
    return j.at(key);
}

inline std::string path(const std::string& ctx, const std::string& key) {
    return ctx.empty() ? key : ctx + "." + key;
}

inline double number_at(const json& j, const std::string& ctx) {
    if (!j.is_number()) throw ConfigError(ctx + ": expected a number");
    return j.get<double>();
}

inline int integer_at(const json& j, const std::string& ctx) {
    if (!j.is_number_integer()) throw ConfigError(ctx + ": expected an integer");
    return j.get<int>();
}

inline std::vector<double> numbers_at(const json& j, const std::string& ctx) {
    if (!j.is_array()) throw ConfigError(ctx + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(number_at(j[i], ctx + "[" + std::to_string(i) + "]"));
    return out;
}

inline std::vector<int> integers_at(const json& j, const std::string& ctx) {
    if (!j.is_array()) throw ConfigError(ctx + ": expected an array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(integer_at(j[i], ctx + "[" + std::to_string(i) + "]"));
    return out;
}

inline std::vector<std::string> strings_at(const json& j, const std::string& ctx) {
    if (!j.is_array()) throw ConfigError(ctx + ": expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_string())
            throw ConfigError(ctx + "[" + std::to_string(i) + "]: expected a string");
        out.push_back(j[i].get<std::string>());
    }
    return out;
}

inline Matrix matrix_at(const json& j, const std::string& ctx) {
    if (!j.is_array() || j.empty()) throw ConfigError(ctx + ": expected an array of rows");
    const std::size_t n = j.size();
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::vector<double> row = numbers_at(j[i], ctx + "[" + std::to_string(i) + "]");
        if (row.size() != n) throw ConfigError(ctx + ": matrix must be square");
        for (std::size_t k = 0; k < n; ++k) m(i, k) = row[k];
    }
    return m;
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> known,
                           const std::string& ctx) {
    if (!j.is_object()) return;
    for (const auto& item : j.items()) {
        bool found = false;
        for (const char* k : known)
            if (item.key() == k) {
                found = true;
                break;
            }
        if (!found) throw ConfigError(path(ctx, item.key()) + ": unknown key");
    }
}

inline KernelConfig parse_kernel(const json& j) {
    reject_unknown(j, {"alpha", "T_K", "L"}, "kernel");
    KernelConfig k;
    k.alpha = number_at(require(j, "alpha", "kernel"), "kernel.alpha");
    k.cutoff = integer_at(require(j, "T_K", "kernel"), "kernel.T_K");
    if (j.contains("L")) {
        const json& l = j.at("L");
        reject_unknown(l, {"variant", "rho", "table"}, "kernel.L");
        const json& v = require(l, "variant", "kernel.L");
        if (!v.is_string()) throw ConfigError("kernel.L.variant: expected a string");
        const std::string name = v.get<std::string>();
        if (name == "constant") {
            k.variation = SlowVariation::constant();
        } else if (name == "log_power") {
            k.variation = SlowVariation::log_power(
                number_at(require(l, "rho", "kernel.L"), "kernel.L.rho"));
        } else if (name == "table") {
            k.variation = SlowVariation::from_table(
                numbers_at(require(l, "table", "kernel.L"), "kernel.L.table"));
        } else {
            throw ConfigError("kernel.L.variant: must be constant, log_power, or table");
        }
    }
    return k;
}

inline ChainConfig parse_chain(const json& j) {
    ChainConfig c;
    if (j.contains("moving_average")) {
        reject_unknown(j, {"moving_average", "center"}, "chain");
        const json& m = j.at("moving_average");
        reject_unknown(m, {"weights", "alphabet", "probs"}, "chain.moving_average");
        c.moving_average = true;
        c.weights = numbers_at(require(m, "weights", "chain.moving_average"),
                               "chain.moving_average.weights");
        c.alphabet = numbers_at(require(m, "alphabet", "chain.moving_average"),
                                "chain.moving_average.alphabet");
        c.alphabet_probs = numbers_at(require(m, "probs", "chain.moving_average"),
                                      "chain.moving_average.probs");
    } else {
        reject_unknown(j, {"states", "f", "Q", "center"}, "chain");
        c.states = strings_at(require(j, "states", "chain"), "chain.states");
        c.scores = numbers_at(require(j, "f", "chain"), "chain.f");
        c.Q = matrix_at(require(j, "Q", "chain"), "chain.Q");
        if (c.states.size() != c.scores.size() || c.states.size() != c.Q.size())
            throw ConfigError("chain: states, f, and Q must have matching sizes");
    }
    if (j.contains("center")) {
        if (!j.at("center").is_boolean()) throw ConfigError("chain.center: expected a boolean");
        c.center = j.at("center").get<bool>();
    }
    return c;
}

inline FamilyConfig parse_family(const json& j) {
    reject_unknown(j, {"states", "f", "Q", "gamma"}, "family");
    FamilyConfig f;
    f.states = strings_at(require(j, "states", "family"), "family.states");
    f.scores = numbers_at(require(j, "f", "family"), "family.f");
    f.Q = matrix_at(require(j, "Q", "family"), "family.Q");
    f.gamma = number_at(require(j, "gamma", "family"), "family.gamma");
    if (f.states.size() != f.scores.size() || f.states.size() != f.Q.size())
        throw ConfigError("family: states, f, and Q must have matching sizes");
    return f;
}

}  // namespace cfgdetail

inline RunConfig parse_run_config(const nlohmann::json& doc) {
    using namespace cfgdetail;
    reject_unknown(doc, {"kernel", "chain", "family", "grid", "samples", "seed", "out"}, "");
    RunConfig cfg;
    cfg.doc = doc;
    cfg.kernel = parse_kernel(require(doc, "kernel", ""));
    if (doc.contains("chain")) cfg.chain = parse_chain(doc.at("chain"));
    if (doc.contains("family")) cfg.family = parse_family(doc.at("family"));
    if (doc.contains("grid")) {
        const nlohmann::json& g = doc.at("grid");
        reject_unknown(g, {"betas", "hs", "N"}, "grid");
        if (g.contains("betas")) cfg.betas = numbers_at(g.at("betas"), "grid.betas");
        if (g.contains("hs")) cfg.hs = numbers_at(g.at("hs"), "grid.hs");
        if (g.contains("N")) cfg.lengths = integers_at(g.at("N"), "grid.N");
    }
    if (doc.contains("samples")) {
        cfg.samples = integer_at(doc.at("samples"), "samples");
        if (cfg.samples < 0) throw ConfigError("samples: must be >= 0");
    }
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned() && !doc.at("seed").is_number_integer())
            throw ConfigError("seed: expected a nonnegative integer");
        const long long v = doc.at("seed").get<long long>();
        if (v < 0) throw ConfigError("seed: must be >= 0");
        cfg.seed = std::uint64_t(v);
    }
    if (doc.contains("out")) {
        if (!doc.at("out").is_string()) throw ConfigError("out: expected a string");
        cfg.out = doc.at("out").get<std::string>();
    }
    for (int n : cfg.lengths)
        if (n < 1) throw ConfigError("grid.N: lengths must be >= 1");
    return cfg;
}

inline RunConfig load_run_config(const std::string& file_path) {
    std::ifstream in(file_path);
    if (!in) throw ConfigError(file_path + ": cannot open config file");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(file_path + ": " + e.what());
    }
    return parse_run_config(doc);
}

// Overrides keep the canonical document in sync so the hash reflects the
// parameters that actually ran.
inline void override_seed(RunConfig& cfg, std::uint64_t seed) {
    cfg.seed = seed;
    cfg.doc["seed"] = seed;
}
inline void override_out(RunConfig& cfg, const std::string& out) {
    cfg.out = out;
    cfg.doc["out"] = out;
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// nlohmann::json dumps object keys in sorted order, so this is a canonical
// fingerprint of the run parameters.
inline std::uint64_t config_hash(const RunConfig& cfg) { return fnv1a64(cfg.doc.dump()); }

inline RenewalKernel make_kernel(const KernelConfig& k) {
    return build_kernel(k.alpha, k.variation, k.cutoff);
}

inline DisorderChain make_chain(const ChainConfig& c) {
    if (c.moving_average)
        return build_moving_average_chain(c.weights, c.alphabet, c.alphabet_probs, c.center);
    return build_chain(c.states, c.scores, c.Q, c.center);
}

inline ScaledChainFamily make_family(const FamilyConfig& f) {
    return build_family(f.states, f.scores, f.Q, f.gamma);
}

}  // namespace pinning
