// Command-line front end: solve / verify / gen.
#include <CLI11.hpp>

#include <fairdiv/cli.hpp>

int main(int argc, char** argv) {
    CLI::App app{"Exact fair division of indivisible items with a divisible resource"};
    app.require_subcommand(1);

    fairdiv::RunConfig cfg;

    auto* solve = app.add_subcommand("solve", "Compute a fair allocation for an instance");
    solve->add_option("instance", cfg.instance_path, "Instance JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    solve->add_option("-o,--output", cfg.allocation_path, "Allocation output path");
    solve->add_option("--certificate", cfg.certificate_path, "Certificate output path");
    solve->add_option("--mode", cfg.mode, "discrete | efm")
        ->check(CLI::IsMember({"discrete", "efm"}))
        ->capture_default_str();
    solve->add_option("--budget", cfg.solve.search_budget, "Max candidates to evaluate")
        ->capture_default_str();
    solve->add_flag("--heuristic", cfg.solve.heuristic,
                    "Hill-climbing search instead of exhaustive enumeration");
    solve->add_option("--threads", cfg.solve.threads, "Worker threads for candidate scans")
        ->capture_default_str();

    auto* verify = app.add_subcommand("verify", "Check an allocation against its instance");
    verify->add_option("instance", cfg.instance_path, "Instance JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    verify->add_option("allocation", cfg.allocation_path, "Allocation JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    verify->add_option("--report", cfg.report_path, "Report output path");

    fairdiv::GenParams params;
    std::uint64_t seed = 0;
    std::string gen_out = "instance.json";
    auto* gen = app.add_subcommand("gen", "Generate a random instance");
    gen->add_option("--seed", seed, "RNG seed")->required();
    gen->add_option("-n,--agents", params.agents, "Number of agents")->capture_default_str();
    gen->add_option("-m,--items", params.items, "Number of items")->capture_default_str();
    gen->add_option("--umin", params.util_min, "Minimum utility")->capture_default_str();
    gen->add_option("--umax", params.util_max, "Maximum utility")->capture_default_str();
    gen->add_flag("--chores-only", params.chores_only, "All utilities negative");
    gen->add_flag("--cake", params.cake, "Attach a divisible resource");
    gen->add_option("--max-segments", params.max_segments, "Max density segments per agent")
        ->capture_default_str();
    gen->add_option("-o,--output", gen_out, "Instance output path")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Keep --help/--version at CLI11's exit 0; fold every usage error
        // (missing file, bad flag, unknown subcommand) into the parse code.
        const int code = app.exit(e);
        return code == 0 ? 0 : fairdiv::ExitParse;
    }

    if (solve->parsed()) return fairdiv::run_solve(cfg);
    if (verify->parsed()) return fairdiv::run_verify(cfg);
    return fairdiv::run_gen(params, seed, gen_out);
}
