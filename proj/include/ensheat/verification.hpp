#pragma once

#include "ensheat/assembly.hpp"
#include "ensheat/ensemble.hpp"
#include "ensheat/scenario.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ensheat {

// ---------------------------------------------------------------------------
// Manufactured solution on the unit square
//
//   T(x, y, t) = 20 cos(t) (cos(x(x-1)) sin(y(y-1)) - y(y-1)),  kappa = exp(c T)
//
// Member j uses (1 + eps_j) T with eps_j = base_j * 10^-l.
// ---------------------------------------------------------------------------

namespace manufactured {

inline constexpr double kC = -0.1;
inline constexpr double kRobinAlpha = 0.5;
inline constexpr std::array<double, 4> kPerturbationBases{0.9578666373, 0.9721124752,
                                                          0.35623152985, 0.4332194024};

double temperature(double x, double y, double t);
std::array<double, 2> gradient(double x, double y, double t);
double time_derivative(double x, double y, double t);
double laplacian(double x, double y, double t);

/// f = T_t - div(kappa(T) grad T) for the solution scale * T.
double source(double scale, double x, double y, double t);

/// kappa grad T . n + alpha T on the named side of the unit square for scale * T.
double robin_data(double scale, const std::string& side, double x, double y, double t);
double normal_flux(double scale, const std::string& side, double x, double y, double t);

} // namespace manufactured

enum class BoundaryKind { mixed, robin };

/// Perturbation bases for J members: the four recorded values first, then
/// seeded uniform draws on [0, 1).
std::vector<double> perturbation_bases(std::size_t members);

struct ManufacturedCase {
    BoundaryKind kind = BoundaryKind::mixed;
    int exponent = 1; ///< l in eps_j = base_j 10^-l
    std::vector<double> epsilons;
    double kappa_min = 0.0;
    double kappa_max = 0.0;

    double scale(std::size_t j) const { return 1.0 + epsilons.at(j); }
    double mean_scale() const;
    ConductivityModel conductivity() const;
};

ManufacturedCase manufactured_case(BoundaryKind kind, int exponent, std::size_t members);

struct ManufacturedOptions {
    BoundaryKind kind = BoundaryKind::mixed;
    int exponent = 1;
    std::size_t members = 4;
    int m = 8;
    double dt = 1.0 / 16.0;
    double t_star = 1.0;
    /// Drop the source and boundary data (energy-decay experiments).
    bool zero_data = false;
};

Scenario manufactured_scenario(const ManufacturedOptions& options);
Scenario manufactured_scenario(BoundaryKind kind, int exponent, std::size_t members, int m,
                               double dt);

/// Discrete-in-time L-infinity(L2) and L2(H1-seminorm) norms.
struct TripleNorms {
    double inf_l2 = 0.0;
    double l2_h1 = 0.0;
};

/// max_n ||e^n|| and (dt sum_{n=0}^{N} ||grad e^n||^2)^{1/2}.
TripleNorms triple_norms(std::span<const ErrorNorms> history, double dt);

/// Error of the ensemble mean against the mean exact solution at every time level.
struct MeanErrorRun {
    std::vector<ErrorNorms> history;
    TripleNorms norms;
    TimeSeries series;
};

MeanErrorRun run_manufactured(const ManufacturedOptions& options, const RunOptions& run_options = {});

double convergence_rate(double e1, double dt1, double e2, double dt2);

struct ConvergenceRow {
    int m = 0;
    double dt = 0.0;
    double err_inf_l2 = 0.0;
    std::optional<double> rate_inf_l2;
    double err_l2_h1 = 0.0;
    std::optional<double> rate_l2_h1;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
};

struct StudyOptions {
    unsigned threads = 1;
    SolverKind solver = SolverKind::cholesky;
};

/// dt = 0.5 / m for every m.
ConvergenceTable convergence_study(BoundaryKind kind, std::span<const int> ms, int exponent = 1,
                                   std::size_t members = 4, const StudyOptions& options = {});

struct PerturbationTable {
    std::vector<int> ms;
    std::vector<int> exponents;
    std::vector<std::vector<double>> err_inf_l2; ///< [m][l]
};

PerturbationTable perturbation_study(BoundaryKind kind, std::span<const int> ms,
                                     std::span<const int> exponents, std::size_t members = 4,
                                     const StudyOptions& options = {});

struct EnsembleSizeRow {
    std::size_t members = 0;
    double err_inf_l2 = 0.0;
    double err_l2_h1 = 0.0;
};

std::vector<EnsembleSizeRow> ensemble_size_study(BoundaryKind kind,
                                                 std::span<const std::size_t> sizes, int m = 16,
                                                 int exponent = 1,
                                                 const StudyOptions& options = {});

// ---------------------------------------------------------------------------
// Steady nonlinear conduction with kappa = (400 / (400 * 9000)) T, T = 200 on
// x = 0 and T = 100 on the other walls.
// ---------------------------------------------------------------------------

/// Harmonic w on the unit square with w = 1 on x = 0 and 0 elsewhere, from
/// the sine series summed in closed form by images (exponentially convergent,
/// exact on the boundary).
double unit_side_harmonic(double x, double y);
/// The same function from `terms` odd sine-series terms (direct summation).
double unit_side_harmonic_series(double x, double y, std::size_t terms);

/// Kirchhoff transform: T = sqrt(100^2 + (200^2 - 100^2) w).
double steady_state_analytic(double x, double y);

struct SteadyStatePosition {
    double x;
    double y;
};

/// The eight sample positions of the steady-state comparison.
std::span<const SteadyStatePosition> steady_state_positions();

Scenario steady_state_scenario(int m, double dt = 50.0, std::size_t max_steps = 50000);

struct SteadyStateColumn {
    int m = 0;
    std::vector<double> temperature;
    std::vector<double> percent_error;
    std::size_t steps = 0;
};

struct SteadyStateTable {
    std::vector<SteadyStatePosition> positions;
    std::vector<double> analytic;
    std::vector<SteadyStateColumn> columns;
};

SteadyStateTable steady_state_study(std::span<const int> ms, double tol = 1e-6,
                                    const StudyOptions& options = {});

/// Value of the P1 field at (x, y); throws std::out_of_range outside the mesh.
double evaluate_field(const Mesh& mesh, std::span<const double> field, double x, double y);

// ---------------------------------------------------------------------------
// Gaussian laser pulse on a plate, three initial temperatures.
// ---------------------------------------------------------------------------

namespace printing {

inline constexpr double kPulseAmplitude = 4000.0;
inline constexpr double kPulseWidth = 8.0;
inline constexpr double kPulseEnd = 0.0005;
inline constexpr double kDt = 0.00025;
inline constexpr double kTStar = 0.01;
inline constexpr std::array<double, 3> kInitialTemperatures{1.0, 1.25, 1.5};

double source(double x, double y, double t);
ConductivityModel conductivity();

} // namespace printing

Scenario printing_scenario(int m = 64, std::size_t snapshot_every = 0);

} // namespace ensheat
