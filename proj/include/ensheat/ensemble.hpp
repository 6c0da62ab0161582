#pragma once

#include "ensheat/assembly.hpp"
#include "ensheat/scenario.hpp"
#include "ensheat/solver.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace ensheat {

struct EnsembleState {
    std::size_t step = 0;
    double time = 0.0;
    std::vector<NodalField> members;
};

/// Per-member diagnostics for one step n -> n+1 (indexed by member).
struct StepReport {
    std::size_t step = 0; ///< the new time level n+1
    double time = 0.0;
    std::vector<double> energy;  ///< ||T||^2 + kappa_max ||grad T||^2
    std::vector<double> l2_norm; ///< ||T||
    std::vector<std::size_t> bound_violations;
    std::vector<double> residual;       ///< ||A x - b||_2 of the shared solve
    std::vector<double> increment_rate; ///< ||T^{n+1} - T^n|| / dt

    double max_increment_rate() const;
};

enum class SolverKind { cholesky, pcg };

/// Scenario plus the time-independent matrices shared by all members:
/// M, D, the Robin boundary mass R and A = M/dt + kappa_max D (+ R) with the
/// Dirichlet rows/columns eliminated.
class EnsembleProblem {
public:
    explicit EnsembleProblem(Scenario scenario);

    const Scenario& scenario() const noexcept { return scenario_; }
    SchemeKind scheme() const noexcept { return scheme_; }
    const P1Space& space() const noexcept { return space_; }
    const SparseSymMatrix& mass() const noexcept { return mass_; }
    const SparseSymMatrix& diffusion() const noexcept { return diffusion_; }
    const SparseSymMatrix& shared_matrix() const noexcept { return shared_; }
    const DirichletLift& dirichlet() const noexcept { return lift_; }
    double kappa_max() const noexcept { return kappa_max_; }

    std::unique_ptr<BlockSolver> make_solver(SolverKind kind = SolverKind::cholesky,
                                             double pcg_tol = 1e-10) const;
    EnsembleState initial_state() const;

    double energy(std::span<const double> T) const;
    double l2_norm(std::span<const double> T) const;

    /// Right-hand side of member j for the step landing on time level n+1,
    /// Dirichlet lifting included.
    std::vector<double> member_rhs(std::size_t member, std::span<const double> T_n,
                                   std::size_t next_step, AssemblyStats* stats = nullptr) const;

private:
    Scenario scenario_;
    SchemeKind scheme_;
    P1Space space_;
    double kappa_max_;
    SparseSymMatrix mass_;
    SparseSymMatrix diffusion_;
    SparseSymMatrix boundary_mass_;
    SparseSymMatrix shared_;
    DirichletLift lift_;
    std::vector<Point> dirichlet_points_;
    std::vector<std::size_t> dirichlet_entry_; // boundary entry supplying each node
    std::vector<std::pair<std::string, std::size_t>> flux_labels_; // label, entry index
};

/// One step of the mixed-boundary scheme. Throws StaleFactorError when
/// `solver` was built for a different matrix.
std::pair<EnsembleState, StepReport> step_mixed(const EnsembleProblem& problem,
                                                const EnsembleState& state,
                                                const BlockSolver& solver, unsigned threads = 1);
/// One step of the Robin-boundary scheme.
std::pair<EnsembleState, StepReport> step_robin(const EnsembleProblem& problem,
                                                const EnsembleState& state,
                                                const BlockSolver& solver, unsigned threads = 1);
/// Dispatches on problem.scheme().
std::pair<EnsembleState, StepReport> advance(const EnsembleProblem& problem,
                                             const EnsembleState& state, const BlockSolver& solver,
                                             unsigned threads = 1);

struct Snapshot {
    std::size_t step = 0;
    double time = 0.0;
    std::vector<NodalField> members;
    NodalField mean;
};

struct RunOptions {
    unsigned threads = 1;
    SolverKind solver = SolverKind::cholesky;
    double pcg_tol = 1e-10;
    /// Stop after the first step whose max increment rate drops below this.
    std::optional<double> steady_tol;
    /// Called with the initial state and after every step.
    std::function<void(const EnsembleProblem&, const EnsembleState&)> observer;
};

struct TimeSeries {
    double dt = 0.0;
    std::vector<double> times;                  ///< t^0 .. t^N
    std::vector<std::vector<double>> member_l2; ///< [n][j]
    std::vector<double> mean_l2;                ///< ||<T>^n||
    std::vector<std::vector<double>> energy;    ///< [n][j]
    std::vector<StepReport> reports;            ///< reports[n] covers n -> n+1
    std::vector<Snapshot> snapshots;
    std::size_t factorizations = 0;
    std::uint64_t matrix_fingerprint = 0;
    EnsembleState final_state;
};

TimeSeries run(const EnsembleProblem& problem, const RunOptions& options = {});
TimeSeries run(const Scenario& scenario, const RunOptions& options = {});

NodalField ensemble_mean(const EnsembleState& state);
NodalField ensemble_mean(std::span<const NodalField> members);

/// First n with max_j ||T_j^{n+1} - T_j^n|| / dt < tol, as (n, t^n).
std::optional<std::pair<std::size_t, double>> detect_steady_state(const TimeSeries& series,
                                                                  double tol);

} // namespace ensheat
