#include "ensheat/verification.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace ensheat {

namespace manufactured {

// T = 20 cos(t) (cos(p) sin(q) - q), p = x(x-1), q = y(y-1).

double temperature(double x, double y, double t)
{
    const double p = x * (x - 1.0);
    const double q = y * (y - 1.0);
    return 20.0 * std::cos(t) * (std::cos(p) * std::sin(q) - q);
}

std::array<double, 2> gradient(double x, double y, double t)
{
    const double p = x * (x - 1.0);
    const double q = y * (y - 1.0);
    const double a = 20.0 * std::cos(t);
    return {a * (-std::sin(p) * (2.0 * x - 1.0) * std::sin(q)),
            a * (std::cos(p) * std::cos(q) - 1.0) * (2.0 * y - 1.0)};
}

double time_derivative(double x, double y, double t)
{
    const double p = x * (x - 1.0);
    const double q = y * (y - 1.0);
    return -20.0 * std::sin(t) * (std::cos(p) * std::sin(q) - q);
}

double laplacian(double x, double y, double t)
{
    const double p = x * (x - 1.0);
    const double q = y * (y - 1.0);
    const double dp = 2.0 * x - 1.0;
    const double dq = 2.0 * y - 1.0;
    const double a = 20.0 * std::cos(t);
    const double txx = a * std::sin(q) * (-std::cos(p) * dp * dp - 2.0 * std::sin(p));
    const double tyy = a * (std::cos(p) * (-std::sin(q) * dq * dq + 2.0 * std::cos(q)) - 2.0);
    return txx + tyy;
}

double source(double scale, double x, double y, double t)
{
    // div(exp(cT) grad T) = exp(cT) (lap T + c |grad T|^2), applied to scale*T.
    // Same closed forms as above with the trig terms evaluated once.
    const double p = x * (x - 1.0);
    const double q = y * (y - 1.0);
    const double dp = 2.0 * x - 1.0;
    const double dq = 2.0 * y - 1.0;
    const double cp = std::cos(p), sp = std::sin(p), cq = std::cos(q), sq = std::sin(q);
    const double a = 20.0 * std::cos(t);
    const double g = cp * sq - q;
    const double gx = -sp * dp * sq;
    const double gy = (cp * cq - 1.0) * dq;
    const double lap = sq * (-cp * dp * dp - 2.0 * sp) + cp * (-sq * dq * dq + 2.0 * cq) - 2.0;
    const double T = scale * a * g;
    const double grad2 = scale * scale * a * a * (gx * gx + gy * gy);
    return -scale * 20.0 * std::sin(t) * g - std::exp(kC * T) * (scale * a * lap + kC * grad2);
}

namespace {

std::array<double, 2> outward_normal(const std::string& side)
{
    if (side == "bottom")
        return {0.0, -1.0};
    if (side == "right")
        return {1.0, 0.0};
    if (side == "top")
        return {0.0, 1.0};
    if (side == "left")
        return {-1.0, 0.0};
    throw std::invalid_argument("unknown side '" + side + "'");
}

} // namespace

double normal_flux(double scale, const std::string& side, double x, double y, double t)
{
    const auto n = outward_normal(side);
    const auto g = gradient(x, y, t);
    const double T = scale * temperature(x, y, t);
    return std::exp(kC * T) * scale * (g[0] * n[0] + g[1] * n[1]);
}

double robin_data(double scale, const std::string& side, double x, double y, double t)
{
    return kRobinAlpha * scale * temperature(x, y, t) + normal_flux(scale, side, x, y, t);
}

} // namespace manufactured

std::vector<double> perturbation_bases(std::size_t members)
{
    std::vector<double> out;
    out.reserve(members);
    for (std::size_t j = 0; j < std::min(members, manufactured::kPerturbationBases.size()); ++j)
        out.push_back(manufactured::kPerturbationBases[j]);
    std::mt19937_64 rng(20240517);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (out.size() < members)
        out.push_back(unit(rng));
    return out;
}

double ManufacturedCase::mean_scale() const
{
    double s = 0.0;
    for (double e : epsilons)
        s += 1.0 + e;
    return s / static_cast<double>(epsilons.size());
}

ConductivityModel ManufacturedCase::conductivity() const
{
    return ConductivityModel(kappa::Exponential{manufactured::kC}, kappa_min, kappa_max,
                             std::abs(manufactured::kC) * kappa_max);
}

ManufacturedCase manufactured_case(BoundaryKind kind, int exponent, std::size_t members)
{
    if (members == 0)
        throw std::invalid_argument("manufactured_case: need at least one member");
    ManufacturedCase c;
    c.kind = kind;
    c.exponent = exponent;
    const double factor = std::pow(10.0, -exponent);
    double eps_max = 0.0;
    for (double b : perturbation_bases(members)) {
        c.epsilons.push_back(b * factor);
        eps_max = std::max(eps_max, b * factor);
    }
    // For t in [0, 1] every member lies in [0, 20 g_max (1 + eps_max)], where
    // g = cos(p) sin(q) - q peaks at the centre (p = q = -1/4) and vanishes on the walls.
    const double g_max = std::cos(-0.25) * std::sin(-0.25) + 0.25;
    const double t_lo = 0.0;
    const double t_hi = 20.0 * g_max * (1.0 + eps_max);
    c.kappa_min = std::exp(manufactured::kC * t_hi);
    c.kappa_max = std::exp(manufactured::kC * t_lo);
    return c;
}

Scenario manufactured_scenario(const ManufacturedOptions& o)
{
    const auto mc = manufactured_case(o.kind, o.exponent, o.members);
    Scenario s;
    s.mesh = std::make_shared<const Mesh>(build_structured_mesh(o.m));
    s.conductivity = {mc.conductivity()};
    s.members = o.members;
    s.dt = o.dt;
    s.t_star = o.t_star;
    s.initial = [mc](std::size_t j, double x, double y, double) {
        return mc.scale(j) * manufactured::temperature(x, y, 0.0);
    };
    if (!o.zero_data)
        s.source = [mc](std::size_t j, double x, double y, double t) {
            return manufactured::source(mc.scale(j), x, y, t);
        };

    const std::array<std::string, 4> sides{"bottom", "right", "top", "left"};
    if (o.kind == BoundaryKind::robin) {
        for (const auto& side : sides) {
            MemberFn beta;
            if (!o.zero_data)
                beta = [mc, side](std::size_t j, double x, double y, double t) {
                    return manufactured::robin_data(mc.scale(j), side, x, y, t);
                };
            s.boundary.push_back({side, BoundaryCondition::robin(manufactured::kRobinAlpha, beta)});
        }
    } else {
        for (const auto& side : {std::string("bottom"), std::string("top")}) {
            MemberFn g;
            if (!o.zero_data)
                g = [mc](std::size_t j, double x, double y, double t) {
                    return mc.scale(j) * manufactured::temperature(x, y, t);
                };
            s.boundary.push_back({side, BoundaryCondition::dirichlet(g)});
        }
        for (const auto& side : {std::string("right"), std::string("left")}) {
            MemberFn q;
            if (!o.zero_data)
                q = [mc, side](std::size_t j, double x, double y, double t) {
                    return manufactured::normal_flux(mc.scale(j), side, x, y, t);
                };
            s.boundary.push_back({side, BoundaryCondition::neumann(q)});
        }
    }
    return s;
}

Scenario manufactured_scenario(BoundaryKind kind, int exponent, std::size_t members, int m,
                               double dt)
{
    ManufacturedOptions o;
    o.kind = kind;
    o.exponent = exponent;
    o.members = members;
    o.m = m;
    o.dt = dt;
    return manufactured_scenario(o);
}

TripleNorms triple_norms(std::span<const ErrorNorms> history, double dt)
{
    TripleNorms out;
    double sum = 0.0;
    for (const auto& e : history) {
        out.inf_l2 = std::max(out.inf_l2, e.l2);
        sum += e.h1_semi * e.h1_semi;
    }
    out.l2_h1 = std::sqrt(dt * sum);
    return out;
}

MeanErrorRun run_manufactured(const ManufacturedOptions& options, const RunOptions& run_options)
{
    const auto mc = manufactured_case(options.kind, options.exponent, options.members);
    const double scale = mc.mean_scale();
    const SpaceTimeFn exact = [scale](double x, double y, double t) {
        return scale * manufactured::temperature(x, y, t);
    };
    const GradientFn grad = [scale](double x, double y, double t) {
        auto g = manufactured::gradient(x, y, t);
        return std::array<double, 2>{scale * g[0], scale * g[1]};
    };

    MeanErrorRun out;
    RunOptions opts = run_options;
    const auto user_observer = run_options.observer;
    opts.observer = [&](const EnsembleProblem& problem, const EnsembleState& state) {
        const auto mean = ensemble_mean(state);
        out.history.push_back(error_norms(*problem.scenario().mesh, mean, exact, grad, state.time));
        if (user_observer)
            user_observer(problem, state);
    };
    out.series = run(manufactured_scenario(options), opts);
    out.norms = triple_norms(out.history, options.dt);
    return out;
}

double convergence_rate(double e1, double dt1, double e2, double dt2)
{
    if (!(e1 > 0.0) || !(e2 > 0.0) || !(dt1 > 0.0) || !(dt2 > 0.0))
        throw std::invalid_argument("convergence_rate: errors and step sizes must be positive");
    if (dt1 == dt2)
        throw std::invalid_argument("convergence_rate: step sizes must differ");
    return std::log2(e1 / e2) / std::log2(dt1 / dt2);
}

namespace {

RunOptions to_run_options(const StudyOptions& o)
{
    RunOptions r;
    r.threads = 1;
    r.solver = o.solver;
    return r;
}

} // namespace

ConvergenceTable convergence_study(BoundaryKind kind, std::span<const int> ms, int exponent,
                                   std::size_t members, const StudyOptions& options)
{
    std::vector<TripleNorms> norms(ms.size());
    detail::parallel_for(ms.size(), options.threads, [&](std::size_t i) {
        ManufacturedOptions o;
        o.kind = kind;
        o.exponent = exponent;
        o.members = members;
        o.m = ms[i];
        o.dt = 0.5 / ms[i];
        norms[i] = run_manufactured(o, to_run_options(options)).norms;
    });
    ConvergenceTable table;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        ConvergenceRow row;
        row.m = ms[i];
        row.dt = 0.5 / ms[i];
        row.err_inf_l2 = norms[i].inf_l2;
        row.err_l2_h1 = norms[i].l2_h1;
        if (i > 0) {
            const auto& prev = table.rows.back();
            row.rate_inf_l2 = convergence_rate(prev.err_inf_l2, prev.dt, row.err_inf_l2, row.dt);
            row.rate_l2_h1 = convergence_rate(prev.err_l2_h1, prev.dt, row.err_l2_h1, row.dt);
        }
        table.rows.push_back(row);
    }
    return table;
}

PerturbationTable perturbation_study(BoundaryKind kind, std::span<const int> ms,
                                     std::span<const int> exponents, std::size_t members,
                                     const StudyOptions& options)
{
    PerturbationTable t;
    t.ms.assign(ms.begin(), ms.end());
    t.exponents.assign(exponents.begin(), exponents.end());
    t.err_inf_l2.assign(ms.size(), std::vector<double>(exponents.size(), 0.0));
    const auto cells = ms.size() * exponents.size();
    detail::parallel_for(cells, options.threads, [&](std::size_t c) {
        const auto i = c / exponents.size();
        const auto k = c % exponents.size();
        ManufacturedOptions o;
        o.kind = kind;
        o.exponent = exponents[k];
        o.members = members;
        o.m = ms[i];
        o.dt = 0.5 / ms[i];
        t.err_inf_l2[i][k] = run_manufactured(o, to_run_options(options)).norms.inf_l2;
    });
    return t;
}

std::vector<EnsembleSizeRow> ensemble_size_study(BoundaryKind kind,
                                                 std::span<const std::size_t> sizes, int m,
                                                 int exponent, const StudyOptions& options)
{
    std::vector<EnsembleSizeRow> rows(sizes.size());
    detail::parallel_for(sizes.size(), options.threads, [&](std::size_t i) {
        ManufacturedOptions o;
        o.kind = kind;
        o.exponent = exponent;
        o.members = sizes[i];
        o.m = m;
        o.dt = 0.5 / m;
        const auto r = run_manufactured(o, to_run_options(options));
        rows[i] = {sizes[i], r.norms.inf_l2, r.norms.l2_h1};
    });
    return rows;
}

// ---------------------------------------------------------------------------

namespace {

// Harmonic in the half-strip s > 0, 0 < y < 1 with value 1 on s = 0:
// sum over odd n of 4/(n pi) sin(n pi y) exp(-n pi s).
double half_strip(double s, double y)
{
    using std::numbers::pi;
    return 2.0 / pi * std::atan2(std::sin(pi * y), std::sinh(pi * s));
}

} // namespace

double unit_side_harmonic(double x, double y)
{
    // sinh(a(1-x))/sinh(a) = sum_k exp(-a(x+2k)) - exp(-a(2k+2-x)).
    double w = 0.0;
    for (int k = 0; k < 40; ++k) {
        const double term = half_strip(x + 2.0 * k, y) - half_strip(2.0 * k + 2.0 - x, y);
        w += term;
        if (k > 0 && std::abs(term) < 1e-18)
            break;
    }
    return w;
}

double unit_side_harmonic_series(double x, double y, std::size_t terms)
{
    using std::numbers::pi;
    double w = 0.0;
    for (std::size_t i = 0; i < terms; ++i) {
        const double n = static_cast<double>(2 * i + 1);
        const double ratio = std::exp(-n * pi * x) * (1.0 - std::exp(-2.0 * n * pi * (1.0 - x))) /
                             (1.0 - std::exp(-2.0 * n * pi));
        w += 4.0 / (n * pi) * std::sin(n * pi * y) * ratio;
    }
    return w;
}

double steady_state_analytic(double x, double y)
{
    constexpr double lo = 100.0 * 100.0;
    constexpr double hi = 200.0 * 200.0;
    return std::sqrt(lo + (hi - lo) * unit_side_harmonic(x, y));
}

std::span<const SteadyStatePosition> steady_state_positions()
{
    static const std::array<SteadyStatePosition, 8> positions{{
        {0.25, 0.50},
        {0.375, 0.625},
        {0.50, 0.50},
        {0.50, 0.75},
        {0.625, 0.625},
        {0.75, 0.50},
        {0.75, 0.75},
        {0.25, 0.75},
    }};
    return positions;
}

Scenario steady_state_scenario(int m, double dt, std::size_t max_steps)
{
    Scenario s;
    s.mesh = std::make_shared<const Mesh>(build_structured_mesh(m));
    const double slope = 400.0 / (400.0 * 9000.0);
    s.conductivity = {ConductivityModel(kappa::Linear{slope}, slope * 100.0, slope * 200.0, slope)};
    s.members = 1;
    s.dt = dt;
    s.t_star = dt * static_cast<double>(max_steps);
    s.initial = [](std::size_t, double, double, double) { return 100.0; };
    const auto wall = [](double v) {
        return [v](std::size_t, double, double, double) { return v; };
    };
    s.boundary = {
        {"left", BoundaryCondition::dirichlet(wall(200.0))},
        {"bottom", BoundaryCondition::dirichlet(wall(100.0))},
        {"right", BoundaryCondition::dirichlet(wall(100.0))},
        {"top", BoundaryCondition::dirichlet(wall(100.0))},
    };
    return s;
}

double evaluate_field(const Mesh& mesh, std::span<const double> field, double x, double y)
{
    const auto& v = mesh.vertices();
    for (std::size_t k = 0; k < mesh.num_triangles(); ++k) {
        const auto& t = mesh.triangles()[k];
        const auto& a = v[t[0]];
        const auto& b = v[t[1]];
        const auto& c = v[t[2]];
        const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
        const double l1 = ((x - a.x) * (c.y - a.y) - (c.x - a.x) * (y - a.y)) / det;
        const double l2 = ((b.x - a.x) * (y - a.y) - (x - a.x) * (b.y - a.y)) / det;
        const double l0 = 1.0 - l1 - l2;
        constexpr double eps = -1e-12;
        if (l0 >= eps && l1 >= eps && l2 >= eps)
            return l0 * field[t[0]] + l1 * field[t[1]] + l2 * field[t[2]];
    }
    throw std::out_of_range("evaluate_field: point outside mesh");
}

SteadyStateTable steady_state_study(std::span<const int> ms, double tol,
                                    const StudyOptions& options)
{
    SteadyStateTable table;
    for (const auto& p : steady_state_positions()) {
        table.positions.push_back(p);
        table.analytic.push_back(steady_state_analytic(p.x, p.y));
    }
    table.columns.resize(ms.size());
    detail::parallel_for(ms.size(), options.threads, [&](std::size_t i) {
        RunOptions ro = to_run_options(options);
        ro.steady_tol = tol;
        const auto scenario = steady_state_scenario(ms[i]);
        const auto series = run(scenario, ro);
        auto& col = table.columns[i];
        col.m = ms[i];
        col.steps = series.final_state.step;
        for (std::size_t k = 0; k < table.positions.size(); ++k) {
            const auto& p = table.positions[k];
            const double T = evaluate_field(*scenario.mesh, series.final_state.members[0], p.x, p.y);
            col.temperature.push_back(T);
            col.percent_error.push_back(std::abs(T - table.analytic[k]) / table.analytic[k] * 100.0);
        }
    });
    return table;
}

// ---------------------------------------------------------------------------

namespace printing {

double source(double x, double y, double t)
{
    if (t > kPulseEnd)
        return 0.0;
    const double dx = x - 0.5;
    const double dy = y - 0.5;
    return kPulseAmplitude * std::exp(-kPulseWidth * (dx * dx + dy * dy));
}

ConductivityModel conductivity()
{
    // kappa ranges over [50, 150] for T in [1, inf); 1 is the coldest wall and initial value.
    return ConductivityModel(kappa::HeavisideQuadratic{100.0, 2.0, 50.0}, 50.0, 150.0, 200.0);
}

} // namespace printing

Scenario printing_scenario(int m, std::size_t snapshot_every)
{
    Scenario s;
    s.mesh = std::make_shared<const Mesh>(build_structured_mesh(m));
    s.conductivity = {printing::conductivity()};
    s.members = printing::kInitialTemperatures.size();
    s.dt = printing::kDt;
    s.t_star = printing::kTStar;
    s.snapshot_every = snapshot_every;
    s.initial = [](std::size_t j, double, double, double) {
        return printing::kInitialTemperatures.at(j);
    };
    s.source = [](std::size_t, double x, double y, double t) { return printing::source(x, y, t); };
    const MemberFn one = [](std::size_t, double, double, double) { return 1.0; };
    s.boundary = {
        {"left", BoundaryCondition::dirichlet(one)},
        {"bottom", BoundaryCondition::dirichlet(one)},
        {"top", BoundaryCondition::neumann(one)},
        {"right", BoundaryCondition::neumann(one)},
    };
    return s;
}

} // namespace ensheat
