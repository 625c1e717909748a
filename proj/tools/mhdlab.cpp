// mhdlab: run one experiment from a JSON config and write its data plus a manifest.
// exit codes: 0 ok, 1 an asserted invariant failed, 2 bad config or arguments, 3 runtime error
#include "mhd/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"stochastic MHD numerics lab"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    int threads = 1;
    const char* kinds[] = {"identities", "renorm", "simulate", "galerkin", "noise-stats"};
    const char* blurbs[] = {"exact cancellation identities on random fields", "r_lambda table and chaos reports",
                            "split-system time stepping with diagnostics", "mollified levels on shared noise",
                            "OU mode moments against the closed form"};
    for (int k = 0; k < 5; ++k) {
        CLI::App* sub = app.add_subcommand(kinds[k], blurbs[k]);
        sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "base seed, overrides the config");
        sub->add_option("--out", out_dir, "output directory (default: config out, then $MHDLAB_OUT, then ./mhdlab_out)");
        sub->add_option("--threads", threads, "worker threads; results do not depend on it")->check(CLI::PositiveNumber);
    }
    CLI11_PARSE(app, argc, argv);
    const std::string kind = app.get_subcommands().front()->get_name();

    mhd::ExperimentConfig cfg;
    try {
        if (!config_path.empty()) cfg = mhd::parse_config(config_path);
        if (cfg.kind.empty()) cfg.kind = kind;
        if (cfg.kind != kind) {
            std::cerr << "config kind '" << cfg.kind << "' does not match subcommand '" << kind << "'\n";
            return 2;
        }
        if (app.get_subcommands().front()->count("--seed")) {
            cfg.seed = seed;
            cfg.seeds.clear();
        }
        mhd::validate(cfg);
    } catch (const mhd::ConfigError& e) {
        for (const auto& p : e.problems) std::cerr << "config: " << p << '\n';
        return 2;
    }
    if (out_dir.empty()) out_dir = cfg.out.empty() ? mhd::default_out_dir() : cfg.out;

    try {
        mhd::RunResult r = mhd::run_experiment(cfg, out_dir, threads);
        std::cout << r.summary << '\n';
        std::cout << (r.ok ? "PASS" : "FAIL") << ' ' << kind << " -> " << r.out_dir << " (" << r.files.size()
                  << " files)\n";
        return r.ok ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
