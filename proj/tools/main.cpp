// Command-line front end: conjugate / audit / solve / diagnose on a problem
// file, writing reports into an output directory.

#include "anisompa/commands.hpp"
#include "anisompa/config.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <functional>

int main(int argc, char** argv) {
    CLI::App app{"anisotropic Orlicz-Sobolev mountain-pass toolkit"};
    app.require_subcommand(1);

    anisompa::RunConfig rc;
    std::function<int(const anisompa::RunConfig&)> action;

    auto add_common = [&rc](CLI::App* sub) {
        sub->add_option("config", rc.input_path, "problem file")->required();
        sub->add_option("--out", rc.out_dir, "output directory (default: current)");
        sub->add_option("--override", rc.overrides,
                        "section.key=value applied after the file (repeatable)");
    };

    auto* conj = app.add_subcommand("conjugate",
                                    "radial profile, Sobolev conjugate, exponent report");
    add_common(conj);
    conj->callback([&] { action = anisompa::cmd_conjugate; });

    auto* audit = app.add_subcommand("audit", "verdicts for the structural hypotheses");
    add_common(audit);
    audit->callback([&] { action = anisompa::cmd_audit; });

    auto* solve = app.add_subcommand("solve", "mountain-pass solve with diagnostics");
    add_common(solve);
    solve->add_flag("--force", rc.force, "solve even when the audit fails");
    solve->callback([&] { action = anisompa::cmd_solve; });

    auto* diag = app.add_subcommand("diagnose",
                                    "concentration scan and recentering of a solved field");
    add_common(diag);
    diag->callback([&] { action = anisompa::cmd_diagnose; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : anisompa::kExitUsage;
    }

    try {
        return action(rc);
    } catch (const anisompa::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return anisompa::kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return anisompa::kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return anisompa::kExitFail;
    }
}
