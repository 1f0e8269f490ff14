// Command-line front end. Subcommands map 1:1 onto the runner functions; all
// numeric work lives in the headers. Exit codes: 0 success, 1 failed
// validation or runtime failure, 2 config/usage error.
#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "pinning/config.hpp"
#include "pinning/csv.hpp"
#include "pinning/runner.hpp"

namespace {

struct SubArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
};

void add_common(CLI::App* sub, SubArgs& args) {
    sub->add_option("config", args.config_path, "JSON run configuration")->required();
    sub->add_option("--seed", args.seed, "override the config seed")
        ->each([&args](const std::string&) { args.seed_set = true; });
    sub->add_option("--out", args.out, "override the output path");
}

pinning::RunConfig load(const SubArgs& args) {
    pinning::RunConfig cfg = pinning::load_run_config(args.config_path);
    if (args.seed_set) pinning::override_seed(cfg, args.seed);
    if (!args.out.empty()) pinning::override_out(cfg, args.out);
    return cfg;
}

int emit_csv(const std::string& path, const std::string& csv) {
    pinning::write_text_file(path, csv);
    std::fprintf(stderr, "wrote %s\n", path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"renewal pinning models with Markov disorder"};
    app.require_subcommand(1);

    SubArgs args;
    CLI::App* curve = app.add_subcommand("critical-curve", "annealed critical curve h_c(beta)");
    CLI::App* free_energy = app.add_subcommand("free-energy", "annealed free energy on a grid");
    CLI::App* modelb = app.add_subcommand("modelb", "weakly inhomogeneous finite-N experiments");
    CLI::App* phase = app.add_subcommand("phase-diagram", "limit free energy over an h grid");
    CLI::App* validate = app.add_subcommand("validate", "oracle and identity self-checks");
    for (CLI::App* sub : {curve, free_energy, modelb, phase, validate}) add_common(sub, args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        pinning::RunConfig cfg = load(args);
        auto out_path = [&](const char* fallback) {
            return !cfg.out.empty() ? cfg.out : std::string(fallback);
        };
        if (curve->parsed())
            return emit_csv(out_path("critical-curve.csv"), pinning::run_critical_curve(cfg));
        if (free_energy->parsed())
            return emit_csv(out_path("free-energy.csv"), pinning::run_free_energy(cfg));
        if (modelb->parsed())
            return emit_csv(out_path("modelb.csv"), pinning::run_modelb(cfg));
        if (phase->parsed())
            return emit_csv(out_path("phase-diagram.csv"), pinning::run_phase_diagram(cfg));
        if (validate->parsed()) {
            const pinning::ValidateReport rep = pinning::run_validate(cfg);
            std::fputs(rep.text.c_str(), stdout);
            if (!cfg.out.empty()) pinning::write_text_file(cfg.out, rep.text);
            return rep.ok ? 0 : 1;
        }
    } catch (const pinning::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
