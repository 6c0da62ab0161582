#include "ensheat/ensemble.hpp"

#include "ensheat/errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ensheat {

double StepReport::max_increment_rate() const
{
    double m = 0.0;
    for (double r : increment_rate)
        m = std::max(m, r);
    return m;
}

namespace {

Scenario validated(Scenario s)
{
    s.validate();
    return s;
}

} // namespace

EnsembleProblem::EnsembleProblem(Scenario scenario)
    : scenario_(validated(std::move(scenario))), scheme_(scenario_.scheme()),
      space_(scenario_.mesh), kappa_max_(scenario_.kappa_max())
{
    mass_ = space_.assemble_mass();
    diffusion_ = space_.assemble_stiffness({}, nullptr, StiffnessMode::identity);
    boundary_mass_ = SparseSymMatrix(space_.pattern());
    for (std::size_t e = 0; e < scenario_.boundary.size(); ++e) {
        const auto& entry = scenario_.boundary[e];
        const std::string label[] = {entry.label};
        if (entry.condition.kind == BcKind::robin)
            boundary_mass_.axpy(1.0, space_.assemble_boundary_mass(label, entry.condition.alpha));
        if (entry.condition.kind != BcKind::dirichlet && entry.condition.data)
            flux_labels_.emplace_back(entry.label, e);
    }

    shared_ = SparseSymMatrix(space_.pattern());
    shared_.axpy(1.0 / scenario_.dt, mass_);
    shared_.axpy(kappa_max_, diffusion_);
    if (scheme_ == SchemeKind::robin)
        shared_.axpy(1.0, boundary_mass_);

    // Dirichlet nodes; the first listed label wins at shared vertices.
    const auto& mesh = *scenario_.mesh;
    std::vector<std::size_t> owner(mesh.num_vertices(), SparsityPattern::npos);
    for (std::size_t e = 0; e < scenario_.boundary.size(); ++e) {
        const auto& entry = scenario_.boundary[e];
        if (entry.condition.kind != BcKind::dirichlet)
            continue;
        for (const auto& edge : mesh.boundary_edges())
            if (edge.label == entry.label)
                for (auto v : edge.vertices)
                    if (owner[v] == SparsityPattern::npos)
                        owner[v] = e;
    }
    std::vector<std::size_t> nodes;
    for (std::size_t v = 0; v < owner.size(); ++v)
        if (owner[v] != SparsityPattern::npos) {
            nodes.push_back(v);
            dirichlet_points_.push_back(mesh.vertices()[v]);
            dirichlet_entry_.push_back(owner[v]);
        }
    lift_ = DirichletLift(shared_, std::move(nodes));
    lift_.constrain(shared_);
}

std::unique_ptr<BlockSolver> EnsembleProblem::make_solver(SolverKind kind, double pcg_tol) const
{
    if (kind == SolverKind::pcg)
        return std::make_unique<PcgSolver>(shared_, pcg_tol);
    return std::make_unique<SpdFactor>(shared_);
}

EnsembleState EnsembleProblem::initial_state() const
{
    EnsembleState s;
    s.step = 0;
    s.time = 0.0;
    s.members.reserve(scenario_.members);
    for (std::size_t j = 0; j < scenario_.members; ++j)
        s.members.push_back(interpolate(
            *scenario_.mesh,
            [&](double x, double y, double t) { return scenario_.initial(j, x, y, t); }, 0.0));
    return s;
}

double EnsembleProblem::energy(std::span<const double> T) const
{
    return mass_.quadratic_form(T) + kappa_max_ * diffusion_.quadratic_form(T);
}

double EnsembleProblem::l2_norm(std::span<const double> T) const
{
    return std::sqrt(std::max(0.0, mass_.quadratic_form(T)));
}

std::vector<double> EnsembleProblem::member_rhs(std::size_t member, std::span<const double> T_n,
                                                std::size_t next_step, AssemblyStats* stats) const
{
    const double t = scenario_.time_at(next_step);
    const auto n = space_.num_dofs();
    if (T_n.size() != n)
        throw std::invalid_argument("member_rhs: state has wrong length");

    std::vector<double> b = mass_.multiply(T_n);
    for (auto& v : b)
        v /= scenario_.dt;

    SparseSymMatrix fluct(space_.pattern());
    space_.assemble_stiffness_into(fluct, T_n, &scenario_.conductivity_of(member),
                                   StiffnessMode::kappa_prime_of, stats);
    const auto nt = fluct.multiply(T_n);
    for (std::size_t i = 0; i < n; ++i)
        b[i] += nt[i];

    if (scenario_.source)
        space_.add_load(
            b, [&](double x, double y, double tt) { return scenario_.source(member, x, y, tt); }, t);

    for (const auto& [label, e] : flux_labels_) {
        const auto& data = scenario_.boundary[e].condition.data;
        const std::string labels[] = {label};
        space_.add_boundary_load(
            b, labels, [&](double x, double y, double tt) { return data(member, x, y, tt); }, t);
    }

    if (!lift_.empty()) {
        std::vector<double> g(dirichlet_points_.size(), 0.0);
        for (std::size_t k = 0; k < g.size(); ++k) {
            const auto& data = scenario_.boundary[dirichlet_entry_[k]].condition.data;
            if (data)
                g[k] = data(member, dirichlet_points_[k].x, dirichlet_points_[k].y, t);
        }
        lift_.lift(b, g);
    }
    return b;
}

std::pair<EnsembleState, StepReport> advance(const EnsembleProblem& problem,
                                             const EnsembleState& state, const BlockSolver& solver,
                                             unsigned threads)
{
    if (solver.matrix_fingerprint() != problem.shared_matrix().fingerprint())
        throw StaleFactorError("solver was built for a different coefficient matrix");
    const auto J = state.members.size();
    if (J == 0)
        throw std::invalid_argument("ensemble state has no members");

    const auto next = state.step + 1;
    std::vector<std::vector<double>> rhs(J);
    std::vector<AssemblyStats> stats(J);
    detail::parallel_for(J, threads, [&](std::size_t j) {
        rhs[j] = problem.member_rhs(j, state.members[j], next, &stats[j]);
    });

    auto solutions = solver.solve_block(rhs, threads);

    StepReport report;
    report.step = next;
    report.time = problem.scenario().time_at(next);
    report.energy.resize(J);
    report.l2_norm.resize(J);
    report.bound_violations.resize(J);
    report.residual.resize(J);
    report.increment_rate.resize(J);
    detail::parallel_for(J, threads, [&](std::size_t j) {
        const auto& x = solutions[j];
        report.energy[j] = problem.energy(x);
        report.l2_norm[j] = problem.l2_norm(x);
        report.bound_violations[j] = stats[j].bound_violations;
        report.residual[j] = residual_norm(problem.shared_matrix(), x, rhs[j]);
        std::vector<double> diff(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            diff[i] = x[i] - state.members[j][i];
        report.increment_rate[j] = problem.l2_norm(diff) / problem.scenario().dt;
    });

    EnsembleState out;
    out.step = next;
    out.time = report.time;
    out.members = std::move(solutions);
    return {std::move(out), std::move(report)};
}

std::pair<EnsembleState, StepReport> step_mixed(const EnsembleProblem& problem,
                                                const EnsembleState& state,
                                                const BlockSolver& solver, unsigned threads)
{
    if (problem.scheme() != SchemeKind::mixed)
        throw std::invalid_argument("step_mixed: scenario uses robin boundary conditions");
    return advance(problem, state, solver, threads);
}

std::pair<EnsembleState, StepReport> step_robin(const EnsembleProblem& problem,
                                                const EnsembleState& state,
                                                const BlockSolver& solver, unsigned threads)
{
    if (problem.scheme() != SchemeKind::robin)
        throw std::invalid_argument("step_robin: scenario does not use robin boundary conditions");
    return advance(problem, state, solver, threads);
}

NodalField ensemble_mean(std::span<const NodalField> members)
{
    if (members.empty())
        throw std::invalid_argument("ensemble_mean: no members");
    NodalField mean(members.front().size(), 0.0);
    for (const auto& m : members) {
        if (m.size() != mean.size())
            throw std::invalid_argument("ensemble_mean: members differ in length");
        for (std::size_t i = 0; i < mean.size(); ++i)
            mean[i] += m[i];
    }
    const double inv = 1.0 / static_cast<double>(members.size());
    for (auto& v : mean)
        v *= inv;
    return mean;
}

NodalField ensemble_mean(const EnsembleState& state) { return ensemble_mean(state.members); }

namespace {

void record(TimeSeries& series, const EnsembleProblem& problem, const EnsembleState& state)
{
    const auto J = state.members.size();
    std::vector<double> l2(J);
    std::vector<double> energy(J);
    for (std::size_t j = 0; j < J; ++j) {
        l2[j] = problem.l2_norm(state.members[j]);
        energy[j] = problem.energy(state.members[j]);
    }
    series.times.push_back(state.time);
    series.member_l2.push_back(std::move(l2));
    series.energy.push_back(std::move(energy));
    series.mean_l2.push_back(problem.l2_norm(ensemble_mean(state)));
}

void snapshot(TimeSeries& series, const EnsembleState& state)
{
    series.snapshots.push_back({state.step, state.time, state.members, ensemble_mean(state)});
}

} // namespace

TimeSeries run(const EnsembleProblem& problem, const RunOptions& options)
{
    const auto& sc = problem.scenario();
    const auto steps = sc.num_steps();

    TimeSeries series;
    series.dt = sc.dt;
    series.matrix_fingerprint = problem.shared_matrix().fingerprint();

    const auto solver = problem.make_solver(options.solver, options.pcg_tol);
    if (options.solver == SolverKind::cholesky)
        series.factorizations = 1;

    EnsembleState state = problem.initial_state();
    record(series, problem, state);
    if (sc.snapshot_every > 0)
        snapshot(series, state);
    if (options.observer)
        options.observer(problem, state);

    for (std::size_t n = 0; n < steps; ++n) {
        auto [next, report] = advance(problem, state, *solver, options.threads);
        state = std::move(next);
        const bool steady = options.steady_tol && report.max_increment_rate() < *options.steady_tol;
        series.reports.push_back(std::move(report));
        record(series, problem, state);
        const bool last = (n + 1 == steps) || steady;
        if (sc.snapshot_every > 0 && (state.step % sc.snapshot_every == 0 || last))
            snapshot(series, state);
        if (options.observer)
            options.observer(problem, state);
        if (steady)
            break;
    }
    series.final_state = std::move(state);
    return series;
}

TimeSeries run(const Scenario& scenario, const RunOptions& options)
{
    (void)scenario.num_steps();
    return run(EnsembleProblem(scenario), options);
}

std::optional<std::pair<std::size_t, double>> detect_steady_state(const TimeSeries& series,
                                                                  double tol)
{
    if (!(tol > 0.0))
        throw std::invalid_argument("detect_steady_state: tol must be positive");
    for (std::size_t n = 0; n < series.reports.size(); ++n)
        if (series.reports[n].max_increment_rate() < tol)
            return std::make_pair(n, series.times[n]);
    return std::nullopt;
}

} // namespace ensheat
