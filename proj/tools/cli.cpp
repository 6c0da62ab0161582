#include "cli.hpp"

#include "ensheat/config.hpp"
#include "ensheat/errors.hpp"
#include "ensheat/expression.hpp"
#include "ensheat/io.hpp"
#include "ensheat/verification.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace ensheat {

namespace {

namespace fs = std::filesystem;

struct Common {
    std::string out;
    unsigned threads = 1;
    std::string solver = "cholesky";

    fs::path out_dir() const
    {
        if (!out.empty())
            return out;
        if (const char* env = std::getenv("ENSHEAT_OUT"); env && *env)
            return env;
        return ".";
    }

    SolverKind solver_kind() const
    {
        return solver == "pcg" ? SolverKind::pcg : SolverKind::cholesky;
    }

    StudyOptions study() const { return {threads, solver_kind()}; }
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--out", c.out, "Output directory (default: $ENSHEAT_OUT or .)");
    cmd->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--solver", c.solver, "Linear solver")
        ->check(CLI::IsMember({"cholesky", "pcg"}));
}

BoundaryKind boundary_kind(const std::string& s)
{
    return s == "robin" ? BoundaryKind::robin : BoundaryKind::mixed;
}

void print_convergence(std::ostream& out, const ConvergenceTable& t)
{
    out << "m,dt,err_inf_l2,rate,err_l2_h1,rate\n";
    for (const auto& r : t.rows)
        out << r.m << ',' << io::sci(r.dt) << ',' << io::sci(r.err_inf_l2) << ','
            << (r.rate_inf_l2 ? io::sci(*r.rate_inf_l2) : "") << ',' << io::sci(r.err_l2_h1) << ','
            << (r.rate_l2_h1 ? io::sci(*r.rate_l2_h1) : "") << '\n';
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Ensemble heat conduction with temperature-dependent conductivity", "ensheat"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "ensheat 0.1.0");

    const std::vector<std::string> kinds{"mixed", "robin"};

    // converge
    Common conv_c;
    std::string conv_kind;
    std::vector<int> conv_ms{4, 8, 16, 32, 64};
    int conv_l = 1;
    int conv_J = 4;
    auto* conv = app.add_subcommand("converge", "Mean-error convergence study, dt = 0.5/m");
    conv->add_option("kind", conv_kind, "mixed or robin")->required()->check(CLI::IsMember(kinds));
    conv->add_option("--ms", conv_ms, "Mesh resolutions")->delimiter(',')->check(CLI::PositiveNumber);
    conv->add_option("--l", conv_l, "Perturbation exponent")->check(CLI::NonNegativeNumber);
    conv->add_option("--J", conv_J, "Ensemble size")->check(CLI::PositiveNumber);
    add_common(conv, conv_c);

    // perturb
    Common pert_c;
    std::string pert_kind;
    std::vector<int> pert_ms{4, 8, 16, 32, 64};
    std::vector<int> pert_ls{0, 1, 2, 3, 4};
    int pert_J = 4;
    auto* pert = app.add_subcommand("perturb", "L-inf(L2) mean error by mesh and perturbation size");
    pert->add_option("kind", pert_kind, "mixed or robin")->required()->check(CLI::IsMember(kinds));
    pert->add_option("--ms", pert_ms, "Mesh resolutions")->delimiter(',')->check(CLI::PositiveNumber);
    pert->add_option("--l", pert_ls, "Perturbation exponents")
        ->delimiter(',')
        ->check(CLI::NonNegativeNumber);
    pert->add_option("--J", pert_J, "Ensemble size")->check(CLI::PositiveNumber);
    add_common(pert, pert_c);

    // ensemble-size
    Common size_c;
    std::string size_kind = "mixed";
    std::vector<std::size_t> size_Js{1, 2, 4, 8, 16, 32, 64};
    int size_m = 16;
    int size_l = 1;
    auto* esize = app.add_subcommand("ensemble-size", "Mean error against ensemble size");
    esize->add_option("kind", size_kind, "mixed or robin")->check(CLI::IsMember(kinds));
    esize->add_option("--Js", size_Js, "Ensemble sizes")->delimiter(',')->check(CLI::PositiveNumber);
    esize->add_option("--m", size_m, "Mesh resolution")->check(CLI::PositiveNumber);
    esize->add_option("--l", size_l, "Perturbation exponent")->check(CLI::NonNegativeNumber);
    add_common(esize, size_c);

    // steady
    Common steady_c;
    std::vector<int> steady_ms{8, 16};
    double steady_tol = 1e-6;
    auto* steady = app.add_subcommand("steady", "Steady nonlinear conduction against the analytic solution");
    steady->add_option("--ms", steady_ms, "Mesh resolutions")->delimiter(',')->check(CLI::PositiveNumber);
    steady->add_option("--tol", steady_tol, "Steady-state tolerance on ||dT||/dt")
        ->check(CLI::PositiveNumber);
    add_common(steady, steady_c);

    // print3d
    Common print_c;
    int print_m = 64;
    std::size_t print_every = 8;
    auto* print = app.add_subcommand("print3d", "Laser pulse on a plate, three initial temperatures");
    print->add_option("--m", print_m, "Mesh resolution")->check(CLI::PositiveNumber);
    print->add_option("--snapshot-every", print_every, "Steps between VTK snapshots (0: none)");
    add_common(print, print_c);

    // run
    Common run_c;
    std::string run_path;
    auto* runcmd = app.add_subcommand("run", "Run a scenario file");
    runcmd->add_option("config", run_path, "YAML scenario")->required();
    add_common(runcmd, run_c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << (dynamic_cast<const CLI::CallForVersion*>(&e) ? e.what() : app.help()) << '\n';
            return 0;
        }
        err << "error: " << e.what() << "\n" << "run 'ensheat --help' for usage\n";
        return 2;
    }

    try {
        if (*conv) {
            const auto table = convergence_study(boundary_kind(conv_kind), conv_ms, conv_l,
                                                 static_cast<std::size_t>(conv_J), conv_c.study());
            const auto path = conv_c.out_dir() / ("convergence_" + conv_kind + ".csv");
            io::write_convergence_csv(path, table);
            print_convergence(out, table);
            out << "wrote " << path.string() << '\n';
        } else if (*pert) {
            const auto table = perturbation_study(boundary_kind(pert_kind), pert_ms, pert_ls,
                                                  static_cast<std::size_t>(pert_J), pert_c.study());
            const auto path = pert_c.out_dir() / ("perturbation_" + pert_kind + ".csv");
            io::write_perturbation_csv(path, table);
            out << "wrote " << path.string() << '\n';
        } else if (*esize) {
            const auto rows =
                ensemble_size_study(boundary_kind(size_kind), size_Js, size_m, size_l, size_c.study());
            const auto path = size_c.out_dir() / "ensemble_size.csv";
            io::write_ensemble_size_csv(path, rows);
            out << "wrote " << path.string() << '\n';
        } else if (*steady) {
            const auto table = steady_state_study(steady_ms, steady_tol, steady_c.study());
            const auto path = steady_c.out_dir() / "steady_state.csv";
            io::write_steady_csv(path, table);
            for (const auto& col : table.columns)
                out << "m=" << col.m << ": steady after " << col.steps << " steps\n";
            out << "wrote " << path.string() << '\n';
        } else if (*print) {
            const auto scenario = printing_scenario(print_m, print_every);
            RunOptions ro;
            ro.threads = print_c.threads;
            ro.solver = print_c.solver_kind();
            const auto series = run(scenario, ro);
            const auto dir = print_c.out_dir();
            io::write_norms_csv(dir / "printing_norms.csv", series);
            const auto vtk = io::write_snapshots(dir, "printing", *scenario.mesh, series);
            out << "wrote " << (dir / "printing_norms.csv").string() << " and " << vtk.size()
                << " snapshots\n";
        } else if (*runcmd) {
            const auto cfg = load_config(run_path);
            RunOptions ro;
            ro.threads = run_c.threads;
            ro.solver = run_c.solver_kind();
            const auto series = run(cfg.scenario, ro);
            const fs::path dir = !run_c.out.empty() ? fs::path(run_c.out)
                                 : cfg.output_dir  ? *cfg.output_dir
                                                   : run_c.out_dir();
            io::write_norms_csv(dir / cfg.norms_file, series);
            const auto vtk = io::write_snapshots(dir, cfg.snapshot_prefix, *cfg.scenario.mesh, series);
            std::size_t violations = 0;
            for (const auto& r : series.reports)
                for (auto v : r.bound_violations)
                    violations += v;
            out << "wrote " << (dir / cfg.norms_file).string() << " and " << vtk.size()
                << " snapshots\n";
            if (violations > 0)
                err << "warning: conductivity clamped at " << violations
                    << " quadrature samples; check kappa_min/kappa_max\n";
        }
    } catch (const FormatError& e) {
        err << "error: " << (*runcmd ? run_path + ": " : std::string()) << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        err << "error: " << (*runcmd ? run_path + ": " : std::string()) << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace ensheat
