// geoflow: unified CLI for the experiment runners.
//
//   geoflow <module> <subcommand> --config <file> [--seed N] [--out DIR] [--sweep K]
//
// Exit codes: 0 success, 1 numeric failure (CFL violation, collapse,
// non-convergence), 2 usage/config error. GEOFLOW_THREADS caps the number of
// parallel runs in a seed sweep; each run stays single-threaded and
// deterministic.

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "geoflow/runner.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_override;
    std::string input_override;
    long long seed_override = -1;
    bool has_seed = false;
    int sweep = 1;
    double lambda = 1.0;
    bool has_lambda = false;
};

int max_threads() {
    const char* env = std::getenv("GEOFLOW_THREADS");
    if (!env) return 1;
    const int n = std::atoi(env);
    return n > 0 ? n : 1;
}

int run_one(geoflow::config::ExperimentConfig cfg) {
    const geoflow::runner::RunStatus status = geoflow::runner::run_experiment(cfg);
    if (status.exit_code != 0)
        std::cerr << "geoflow: " << status.message << "\n";
    else
        std::cout << cfg.experiment << " -> " << cfg.out_dir << " ("
                  << status.manifest["files"].size() << " files)\n";
    return status.exit_code;
}

int dispatch(const std::string& experiment, const CliOptions& opt) {
    geoflow::config::ExperimentConfig cfg;
    if (!opt.config_path.empty()) {
        std::ifstream is(opt.config_path);
        if (!is) {
            std::cerr << "geoflow: cannot open config " << opt.config_path << "\n";
            return 2;
        }
        std::stringstream ss;
        ss << is.rdbuf();
        const auto parsed =
            geoflow::config::parse_config(ss.str(), geoflow::runner::schema_for);
        if (!parsed.errors.empty()) {
            for (const auto& e : parsed.errors)
                std::cerr << "geoflow: config line " << e.line << ": " << e.message << "\n";
            return 2;
        }
        cfg = *parsed.config;
        if (cfg.experiment != experiment) {
            std::cerr << "geoflow: config is for '" << cfg.experiment
                      << "' but the command line asked for '" << experiment << "'\n";
            return 2;
        }
    } else {
        // configless invocation (topo3d direct mode); synthesize defaults
        const geoflow::config::Schema* schema = geoflow::runner::schema_for(experiment);
        if (!schema) {
            std::cerr << "geoflow: unknown experiment " << experiment << "\n";
            return 2;
        }
        cfg.experiment = experiment;
        for (const auto& [key, spec] : schema->keys)
            if (!spec.default_value.empty()) cfg.values[key] = spec.default_value;
        if (schema->stochastic && !opt.has_seed) {
            std::cerr << "geoflow: " << experiment << " requires --config or --seed\n";
            return 2;
        }
        if (experiment == "topo3d.helicity" || experiment == "topo3d.beltrami") {
            if (opt.input_override.empty()) {
                std::cerr << "geoflow: " << experiment << " requires --input\n";
                return 2;
            }
        }
    }
    if (opt.has_seed) {
        cfg.seed = static_cast<std::uint64_t>(opt.seed_override);
        cfg.has_seed = true;
    }
    if (!opt.out_override.empty()) cfg.out_dir = opt.out_override;
    if (!opt.input_override.empty()) cfg.values["topo3d.input"] = opt.input_override;
    if (opt.has_lambda) cfg.values["topo3d.lambda"] = geoflow::runner::fmt(opt.lambda);

    if (opt.sweep <= 1) return run_one(cfg);

    // seed sweep: member i runs with seed+i into out_dir/sweep_iii
    std::vector<geoflow::config::ExperimentConfig> cfgs;
    for (int i = 0; i < opt.sweep; ++i) {
        geoflow::config::ExperimentConfig c = cfg;
        c.seed = cfg.seed + static_cast<std::uint64_t>(i);
        char sub[32];
        std::snprintf(sub, sizeof(sub), "sweep_%03d", i);
        c.out_dir = cfg.out_dir + "/" + sub;
        cfgs.push_back(std::move(c));
    }
    std::vector<int> codes(cfgs.size(), 0);
    std::atomic<std::size_t> next{0};
    const int nthreads = std::min<int>(max_threads(), static_cast<int>(cfgs.size()));
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cfgs.size()) break;
            const auto status = geoflow::runner::run_experiment(cfgs[i]);
            codes[i] = status.exit_code;
        }
    };
    std::vector<std::thread> threads;
    for (int t = 0; t < nthreads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    int worst = 0;
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
        std::cout << cfgs[i].experiment << " seed=" << cfgs[i].seed << " -> "
                  << cfgs[i].out_dir << (codes[i] == 0 ? " ok" : " FAILED") << "\n";
        worst = std::max(worst, codes[i]);
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geoflow: geometric-hydrodynamics experiment runner"};
    app.require_subcommand(1);

    struct Leaf {
        std::string module, sub, experiment;
    };
    const std::vector<Leaf> leaves = {
        {"euler2d", "run", "euler2d.run"},
        {"zeitlin", "run", "zeitlin.run"},
        {"pv", "run", "pv.run"},
        {"sticky", "run", "sticky.run"},
        {"sticky", "minimize", "sticky.minimize"},
        {"sticky", "continuum", "sticky.continuum"},
        {"madelung", "verify", "madelung.verify"},
        {"filament", "run", "filament.run"},
        {"topo3d", "helicity", "topo3d.helicity"},
        {"topo3d", "beltrami", "topo3d.beltrami"},
        {"topo3d", "abc", "topo3d.abc"},
        {"entropy", "run", "entropy.run"},
    };

    std::map<std::string, CLI::App*> modules;
    auto opts = std::make_shared<CliOptions>();
    std::string chosen;
    for (const auto& leaf : leaves) {
        if (!modules.count(leaf.module))
            modules[leaf.module] = app.add_subcommand(leaf.module, leaf.module + " experiments");
        CLI::App* sub = modules[leaf.module]->add_subcommand(leaf.sub, leaf.experiment);
        sub->add_option("--config", opts->config_path, "experiment config file");
        sub->add_option("--out", opts->out_override, "output directory override");
        sub->add_option("--sweep", opts->sweep, "run a seed sweep of this many runs");
        auto* seed_opt =
            sub->add_option("--seed", opts->seed_override, "seed override (64-bit)");
        if (leaf.module == "topo3d") {
            sub->add_option("--input", opts->input_override, "GFL1 input field");
            auto* lam = sub->add_option("--lambda", opts->lambda, "Beltrami eigenvalue");
            sub->callback([opts, lam] { opts->has_lambda = lam->count() > 0; });
        }
        const std::string exp = leaf.experiment;
        sub->final_callback([&chosen, exp, opts, seed_opt] {
            chosen = exp;
            opts->has_seed = seed_opt->count() > 0;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors exit 2; --help exits 0
    }
    if (chosen.empty()) {
        std::cerr << "geoflow: no experiment selected\n";
        return 2;
    }
    return dispatch(chosen, *opts);
}
