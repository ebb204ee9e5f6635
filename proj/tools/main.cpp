#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sddem/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"truncated Euler-Maruyama experiments for SDDEs with variable delay"};
    app.require_subcommand(1);

    struct Common {
        std::string config;
        std::string problem;
        std::string out;
        std::uint64_t seed = 0;
        bool seed_set = false;
        unsigned workers = 0;
        bool workers_set = false;
        std::vector<double> delta_list;
    };

    Common opts;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config, "experiment config (JSON)");
        sub->add_option("--problem", opts.problem,
                        "built-in problem name (example1 | example2)");
        sub->add_option("--out", opts.out, "output CSV path");
        sub->add_option("--seed", opts.seed, "RNG seed (overrides config)")
            ->each([&](const std::string&) { opts.seed_set = true; });
        sub->add_option("--workers", opts.workers, "worker thread count")
            ->each([&](const std::string&) { opts.workers_set = true; });
        return sub;
    };

    add_common(app.add_subcommand("simulate", "one path, trajectory CSV"));
    add_common(app.add_subcommand("converge", "strong-error sweep and fitted order"));
    auto* stab = add_common(
        app.add_subcommand("stability-table", "epsilon and rate table per step size"));
    stab->add_option("--delta-list", opts.delta_list,
                     "step sizes for the table (overrides config)");
    add_common(app.add_subcommand("check", "run the invariant checks"));

    CLI11_PARSE(app, argc, argv);

    sddem::cli::Overrides ov;
    if (!opts.problem.empty()) ov.problem = opts.problem;
    if (!opts.out.empty()) ov.out = opts.out;
    if (opts.seed_set) ov.seed = opts.seed;
    if (opts.workers_set) ov.workers = opts.workers;
    if (!opts.delta_list.empty()) ov.delta_list = opts.delta_list;

    const std::string sub = app.get_subcommands().front()->get_name();
    std::optional<std::string> config_path;
    if (!opts.config.empty()) config_path = opts.config;
    return sddem::cli::run_command(sub, config_path, ov, std::cout);
}
