// swsys command-line tool: certify input-to-state stability of switched
// nonlinear systems under duration/count-constrained switching signals, and
// simulate trajectories against the certified envelope.

#include <CLI11.hpp>

#include "swsys/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"swsys - ISS certification and simulation for switched nonlinear systems"};
    app.require_subcommand(1);

    swsys::CommandOptions opts;
    long long seed_flag = -1;

    auto add_common = [&](CLI::App* cmd, bool config_required) {
        auto* c = cmd->add_option("--config", opts.config_path, "configuration JSON file");
        if (config_required) c->required();
        cmd->add_option("--out", opts.out_dir, "output directory (default: out)");
        cmd->add_option("--seed", seed_flag, "override the configured seed");
    };

    CLI::App* check = app.add_subcommand(
        "check", "run assumption checks and assemble the stability certificate");
    add_common(check, true);

    CLI::App* simulate =
        app.add_subcommand("simulate", "run the seeded trajectory batch and envelope checks");
    add_common(simulate, true);
    simulate->add_flag("--allow-divergence", opts.allow_divergence,
                       "exit 0 even when runs diverge");

    CLI::App* generate =
        app.add_subcommand("generate", "generate the configured switching signal as CSV");
    add_common(generate, true);

    CLI::App* reproduce = app.add_subcommand(
        "reproduce-sec4", "run the bundled two-mode study end to end (generate, check, simulate)");
    add_common(reproduce, false);
    reproduce->add_flag("--allow-divergence", opts.allow_divergence,
                        "exit 0 even when runs diverge");

    CLI11_PARSE(app, argc, argv);
    if (seed_flag >= 0) opts.seed = static_cast<std::uint64_t>(seed_flag);

    try {
        if (check->parsed()) return swsys::cmd_check(opts);
        if (simulate->parsed()) return swsys::cmd_simulate(opts);
        if (generate->parsed()) return swsys::cmd_generate(opts);
        if (reproduce->parsed()) return swsys::cmd_reproduce_sec4(opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
