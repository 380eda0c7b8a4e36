#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "ibdl_tools/builtins.hpp"
#include "ibdl_tools/config.hpp"
#include "ibdl_tools/experiments.hpp"

namespace {

namespace fs = std::filesystem;
using namespace ibdl::tools;

// Exit codes: 0 success, 1 at least one solver failure, 2 bad input.
int execute(const RunConfig& cfg, const std::string& out_override, int threads) {
    const fs::path dir = out_override.empty() ? fs::path(cfg.output.directory) : fs::path(out_override);
    RunOptions opts;
    opts.threads = threads;
    opts.output_dir = dir;
    opts.log = &std::cerr;
    std::cerr << "running " << cfg.name << " (" << to_string(cfg.experiment) << ") into " << dir.string() << "\n";
    const ExperimentResult res = run_experiment(cfg, opts);
    for (const auto& path : write_result(cfg, res, dir)) std::cout << path.string() << "\n";
    std::cerr << cfg.name << ": " << res.failures << " failed row(s), " << res.wall_seconds << " s\n";
    return res.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Immersed boundary single/double layer experiment runner"};
    app.require_subcommand(1);

    std::string config_path, out_dir, bench_name;
    int threads = 1;

    auto* run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("config", config_path, "config file (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory (overrides output.directory)");
    run->add_option("--threads", threads, "rows of a sweep solved concurrently")->check(CLI::PositiveNumber);

    auto* list = app.add_subcommand("list-benchmarks", "print the names of the built-in configurations");
    bool show = false;
    list->add_flag("--show", show, "print each configuration in full");

    auto* bench = app.add_subcommand("run-benchmark", "run a built-in configuration");
    bench->add_option("name", bench_name, "built-in configuration name")->required();
    bench->add_option("--out", out_dir, "output directory (overrides output.directory)");
    bench->add_option("--threads", threads, "rows of a sweep solved concurrently")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*list) {
            for (const auto& c : builtin_benchmarks()) {
                if (show)
                    std::cout << serialize(c);
                else
                    std::cout << c.name << "\t" << to_string(c.experiment) << "\n";
            }
            return 0;
        }
        if (*bench) {
            auto cfg = find_builtin(bench_name);
            if (!cfg) {
                std::cerr << "unknown benchmark '" << bench_name << "'; see list-benchmarks\n";
                return 2;
            }
            return execute(*cfg, out_dir, threads);
        }
        return execute(load_config(config_path), out_dir, threads);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
