#include <iostream>

#include <CLI11.hpp>

#include <billiards/cli.hpp>

using billiards::cli::RunConfig;

int main(int argc, char** argv)
{
    CLI::App app{"billiards: correspondence experiments on complex plane curves"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", cfg.seed, "seed for all random sampling");
        sub->add_option("--out", cfg.output_path, "output file (orbit: dump file)");
        sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    };
    auto add_curve = [&](CLI::App* sub) { sub->add_option("--curve", cfg.curve_path, "curve JSON file")->required(); };

    auto* spectral = app.add_subcommand("spectral", "cheap matrices, M_b, characteristic polynomial, degree sequence");
    spectral->add_option("--d", cfg.d, "curve degree")->required();
    spectral->add_option("--m-max", cfg.m_max, "last index of the degree sequence");
    add_common(spectral);

    auto* orbit = app.add_subcommand("orbit", "branch tree of the billiard correspondence, or a real trajectory");
    add_curve(orbit);
    orbit->add_option("--depth", cfg.depth, "tree depth, or number of real steps");
    orbit->add_flag("--real", cfg.real, "follow the real billiard map");
    add_common(orbit);

    auto* confine = app.add_subcommand("confine", "epsilon-limit confinement experiments at scratch points");
    add_curve(confine);
    confine->add_option("--scratch", cfg.scratch_index, "only this scratch point index");
    confine->add_option("--eps", cfg.eps, "epsilon schedule override");
    add_common(confine);

    auto* form = app.add_subcommand("form-check", "finite-difference check of the invariant 2-form");
    add_curve(form);
    form->add_option("--samples", cfg.samples, "number of phase-space samples");
    add_common(form);

    auto* scratch = app.add_subcommand("scratch", "list scratch points");
    add_curve(scratch);
    add_common(scratch);

    auto* gen = app.add_subcommand("genericity", "genericity report");
    add_curve(gen);
    add_common(gen);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return billiards::cli::InputError;
    }
    cfg.command = app.get_subcommands().front()->get_name();
    return billiards::cli::run(cfg, std::cout, std::cerr);
}
