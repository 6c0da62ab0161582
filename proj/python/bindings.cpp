#include "ensheat/config.hpp"
#include "ensheat/ensemble.hpp"
#include "ensheat/errors.hpp"
#include "ensheat/io.hpp"
#include "ensheat/solver.hpp"
#include "ensheat/verification.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace ensheat;

namespace {

BoundaryKind kind_of(const std::string& s)
{
    if (s == "mixed")
        return BoundaryKind::mixed;
    if (s == "robin")
        return BoundaryKind::robin;
    throw std::invalid_argument("kind must be 'mixed' or 'robin', got '" + s + "'");
}

SolverKind solver_of(const std::string& s)
{
    if (s == "cholesky")
        return SolverKind::cholesky;
    if (s == "pcg")
        return SolverKind::pcg;
    throw std::invalid_argument("solver must be 'cholesky' or 'pcg', got '" + s + "'");
}

py::array_t<double> matrix(const std::vector<std::vector<double>>& rows)
{
    const auto n = rows.size();
    const auto m = n ? rows.front().size() : 0;
    py::array_t<double> out({n, m});
    auto w = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            w(i, j) = rows[i][j];
    return out;
}

py::array_t<double> vector(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::dict series_dict(const TimeSeries& s, const Mesh& mesh)
{
    py::dict d;
    d["dt"] = s.dt;
    d["times"] = vector(s.times);
    d["member_l2"] = matrix(s.member_l2);
    d["mean_l2"] = vector(s.mean_l2);
    d["energy"] = matrix(s.energy);
    d["members"] = matrix(s.final_state.members);
    d["mean"] = vector(ensemble_mean(s.final_state));
    d["factorizations"] = s.factorizations;
    std::vector<std::vector<double>> xy;
    for (const auto& p : mesh.vertices())
        xy.push_back({p.x, p.y});
    d["vertices"] = matrix(xy);
    std::size_t clamped = 0;
    for (const auto& r : s.reports)
        for (auto v : r.bound_violations)
            clamped += v;
    d["clamped_samples"] = clamped;
    return d;
}

RunOptions run_options(unsigned threads, const std::string& solver)
{
    RunOptions o;
    o.threads = threads;
    o.solver = solver_of(solver);
    return o;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Ensemble heat conduction with temperature-dependent conductivity";

    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<FactorizationError>(m, "FactorizationError", PyExc_RuntimeError);

    py::class_<Mesh, std::shared_ptr<Mesh>>(m, "Mesh")
        .def_static("structured", [](int n) { return std::make_shared<Mesh>(build_structured_mesh(n)); },
                    py::arg("m"))
        .def_static("from_text", [](const std::string& t) { return std::make_shared<Mesh>(import_mesh(t)); })
        .def("to_text", [](const Mesh& mesh) { return export_mesh(mesh); })
        .def_property_readonly("num_vertices", &Mesh::num_vertices)
        .def_property_readonly("num_triangles", &Mesh::num_triangles)
        .def_property_readonly("labels", &Mesh::labels)
        .def_property_readonly("h", [](const Mesh& mesh) { return mesh_size(mesh); })
        .def_property_readonly("vertices", [](const Mesh& mesh) {
            std::vector<std::vector<double>> xy;
            for (const auto& p : mesh.vertices())
                xy.push_back({p.x, p.y});
            return matrix(xy);
        });

    py::class_<ConductivityModel>(m, "Conductivity")
        .def_static("exponential",
                    [](double c, double lo, double hi) { return ConductivityModel(kappa::Exponential{c}, lo, hi); },
                    py::arg("c"), py::arg("kappa_min"), py::arg("kappa_max"))
        .def_static("heaviside_quadratic",
                    [](double a, double tc, double base, double lo, double hi) {
                        return ConductivityModel(kappa::HeavisideQuadratic{a, tc, base}, lo, hi);
                    },
                    py::arg("a"), py::arg("t_c"), py::arg("base"), py::arg("kappa_min"), py::arg("kappa_max"))
        .def_static("linear",
                    [](double s, double lo, double hi) { return ConductivityModel(kappa::Linear{s}, lo, hi); },
                    py::arg("slope"), py::arg("kappa_min"), py::arg("kappa_max"))
        .def_static("constant", &ConductivityModel::constant, py::arg("value"))
        .def("__call__", &ConductivityModel::eval, py::arg("T"))
        .def("raw", &ConductivityModel::raw, py::arg("T"))
        .def_property_readonly("kappa_min", &ConductivityModel::kappa_min)
        .def_property_readonly("kappa_max", &ConductivityModel::kappa_max)
        .def_property_readonly("kind", &ConductivityModel::kind_name);

    m.def("manufactured_temperature", &manufactured::temperature, py::arg("x"), py::arg("y"), py::arg("t"));
    m.def("manufactured_source", &manufactured::source, py::arg("scale"), py::arg("x"), py::arg("y"),
          py::arg("t"));
    m.def("convergence_rate", &convergence_rate, py::arg("e1"), py::arg("dt1"), py::arg("e2"), py::arg("dt2"));
    m.def("steady_state_analytic", &steady_state_analytic, py::arg("x"), py::arg("y"));
    m.def("factorization_count", &factorization_count);

    m.def(
        "convergence_study",
        [](const std::string& kind, std::vector<int> ms, int exponent, std::size_t members, unsigned threads,
           const std::string& solver) {
            py::gil_scoped_release release;
            const auto t = convergence_study(kind_of(kind), ms, exponent, members, {threads, solver_of(solver)});
            py::gil_scoped_acquire acquire;
            py::list rows;
            for (const auto& r : t.rows) {
                py::dict d;
                d["m"] = r.m;
                d["dt"] = r.dt;
                d["err_inf_l2"] = r.err_inf_l2;
                d["rate_inf_l2"] = r.rate_inf_l2;
                d["err_l2_h1"] = r.err_l2_h1;
                d["rate_l2_h1"] = r.rate_l2_h1;
                rows.append(d);
            }
            return rows;
        },
        py::arg("kind"), py::arg("ms") = std::vector<int>{4, 8, 16, 32, 64}, py::arg("exponent") = 1,
        py::arg("members") = 4, py::arg("threads") = 1, py::arg("solver") = "cholesky");

    m.def(
        "perturbation_study",
        [](const std::string& kind, std::vector<int> ms, std::vector<int> ls, std::size_t members,
           unsigned threads) {
            py::gil_scoped_release release;
            const auto t = perturbation_study(kind_of(kind), ms, ls, members, {threads, SolverKind::cholesky});
            py::gil_scoped_acquire acquire;
            py::dict d;
            d["ms"] = t.ms;
            d["exponents"] = t.exponents;
            d["err_inf_l2"] = matrix(t.err_inf_l2);
            return d;
        },
        py::arg("kind"), py::arg("ms") = std::vector<int>{4, 8, 16, 32, 64},
        py::arg("exponents") = std::vector<int>{0, 1, 2, 3, 4}, py::arg("members") = 4, py::arg("threads") = 1);

    m.def(
        "ensemble_size_study",
        [](const std::string& kind, std::vector<std::size_t> sizes, int mesh, int exponent, unsigned threads) {
            py::gil_scoped_release release;
            const auto rows =
                ensemble_size_study(kind_of(kind), sizes, mesh, exponent, {threads, SolverKind::cholesky});
            py::gil_scoped_acquire acquire;
            py::list out;
            for (const auto& r : rows)
                out.append(py::make_tuple(r.members, r.err_inf_l2, r.err_l2_h1));
            return out;
        },
        py::arg("kind") = "mixed", py::arg("sizes") = std::vector<std::size_t>{1, 2, 4, 8, 16, 32, 64},
        py::arg("m") = 16, py::arg("exponent") = 1, py::arg("threads") = 1);

    m.def(
        "steady_state_study",
        [](std::vector<int> ms, double tol, unsigned threads) {
            py::gil_scoped_release release;
            const auto t = steady_state_study(ms, tol, {threads, SolverKind::cholesky});
            py::gil_scoped_acquire acquire;
            py::dict d;
            py::list pos;
            for (const auto& p : t.positions)
                pos.append(py::make_tuple(p.x, p.y));
            d["positions"] = pos;
            d["analytic"] = t.analytic;
            py::dict cols;
            for (const auto& c : t.columns) {
                py::dict col;
                col["temperature"] = c.temperature;
                col["percent_error"] = c.percent_error;
                col["steps"] = c.steps;
                cols[py::int_(c.m)] = col;
            }
            d["columns"] = cols;
            return d;
        },
        py::arg("ms") = std::vector<int>{8, 16}, py::arg("tol") = 1e-6, py::arg("threads") = 1);

    m.def(
        "run_printing",
        [](int mesh, unsigned threads, const std::string& solver) {
            const auto s = printing_scenario(mesh);
            TimeSeries series;
            {
                py::gil_scoped_release release;
                series = run(s, run_options(threads, solver));
            }
            return series_dict(series, *s.mesh);
        },
        py::arg("m") = 64, py::arg("threads") = 1, py::arg("solver") = "cholesky");

    m.def(
        "run_manufactured",
        [](const std::string& kind, int mesh, double dt, std::size_t members, int exponent, bool zero_data,
           double t_star, unsigned threads) {
            ManufacturedOptions o;
            o.kind = kind_of(kind);
            o.m = mesh;
            o.dt = dt;
            o.members = members;
            o.exponent = exponent;
            o.zero_data = zero_data;
            o.t_star = t_star;
            const auto s = manufactured_scenario(o);
            TimeSeries series;
            {
                py::gil_scoped_release release;
                series = run(s, run_options(threads, "cholesky"));
            }
            return series_dict(series, *s.mesh);
        },
        py::arg("kind") = "mixed", py::arg("m") = 8, py::arg("dt") = 1.0 / 16, py::arg("members") = 4,
        py::arg("exponent") = 1, py::arg("zero_data") = false, py::arg("t_star") = 1.0, py::arg("threads") = 1);

    m.def(
        "run_config",
        [](const std::filesystem::path& path, unsigned threads, const std::string& solver) {
            const auto cfg = load_config(path);
            TimeSeries series;
            {
                py::gil_scoped_release release;
                series = run(cfg.scenario, run_options(threads, solver));
            }
            return series_dict(series, *cfg.scenario.mesh);
        },
        py::arg("path"), py::arg("threads") = 1, py::arg("solver") = "cholesky");

    m.attr("__version__") = "0.1.0";
}
