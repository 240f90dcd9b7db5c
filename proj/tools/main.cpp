#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "cascade/cli.hpp"
#include "cascade/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"cross-community influence estimation from URL-sharing event streams"};
    app.fallthrough(true);

    std::string config_path, out_dir, log_level;
    std::uint64_t seed = 0;
    std::size_t parallel = 0;
    auto* opt_config =
        app.add_option("--config", config_path, "run configuration file (JSON)")
            ->required();
    auto* opt_out = app.add_option("--out", out_dir, "override the output directory");
    auto* opt_seed = app.add_option("--seed", seed, "override the run seed");
    auto* opt_parallel =
        app.add_option("--parallel", parallel, "worker threads (0 = all cores)");
    auto* opt_log = app.add_option("--log-level", log_level, "debug|info|warn|error");
    (void)opt_config;

    app.add_subcommand("ingest", "canonicalize URLs and build per-URL event sequences");
    app.add_subcommand("simulate", "generate sequences from a parameter file");
    app.add_subcommand("fit", "fit a Hawkes model per sequence and aggregate");
    app.add_subcommand("impact", "turn aggregated weights into influence percentages");
    app.add_subcommand("compare", "compare weight distributions across URL categories");
    app.add_subcommand("characterize", "account/tweet analytics over archives");
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad usage is a validation failure
    }

    try {
        auto config = cascade::cli::load_config(config_path);
        if (opt_out->count() > 0) config.out_dir = out_dir;
        if (opt_seed->count() > 0) config.seed = seed;
        if (opt_parallel->count() > 0) config.parallel = parallel;
        if (opt_log->count() > 0) config.log_level = log_level;
        config.validate();
        return cascade::cli::run_command(app.get_subcommands().front()->get_name(),
                                         config);
    } catch (const cascade::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
