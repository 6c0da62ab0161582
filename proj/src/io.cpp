#include "ensheat/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ensheat::io {

namespace {

std::ofstream open(const std::filesystem::path& path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path)
{
    out.flush();
    if (!out)
        throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::string opt(const std::optional<double>& v) { return v ? sci(*v) : std::string(); }

std::string g9(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5e", v);
    return buf;
}

void write_convergence_csv(const std::filesystem::path& path, const ConvergenceTable& table)
{
    auto out = open(path);
    out << "m,dt,err_inf_l2,rate,err_l2_h1,rate\n";
    for (const auto& r : table.rows)
        out << r.m << ',' << sci(r.dt) << ',' << sci(r.err_inf_l2) << ',' << opt(r.rate_inf_l2)
            << ',' << sci(r.err_l2_h1) << ',' << opt(r.rate_l2_h1) << '\n';
    finish(out, path);
}

void write_perturbation_csv(const std::filesystem::path& path, const PerturbationTable& table)
{
    auto out = open(path);
    out << 'm';
    for (int l : table.exponents)
        out << ",err_inf_l2_l" << l;
    out << '\n';
    for (std::size_t i = 0; i < table.ms.size(); ++i) {
        out << table.ms[i];
        for (double e : table.err_inf_l2[i])
            out << ',' << sci(e);
        out << '\n';
    }
    finish(out, path);
}

void write_ensemble_size_csv(const std::filesystem::path& path,
                             std::span<const EnsembleSizeRow> rows)
{
    auto out = open(path);
    out << "J,err_inf_l2,err_l2_h1\n";
    for (const auto& r : rows)
        out << r.members << ',' << sci(r.err_inf_l2) << ',' << sci(r.err_l2_h1) << '\n';
    finish(out, path);
}

void write_steady_csv(const std::filesystem::path& path, const SteadyStateTable& table)
{
    auto out = open(path);
    out << "x,y";
    for (const auto& c : table.columns)
        out << ",T_m" << c.m << ",pct_err_m" << c.m;
    out << ",analytical\n";
    for (std::size_t k = 0; k < table.positions.size(); ++k) {
        out << g9(table.positions[k].x) << ',' << g9(table.positions[k].y);
        for (const auto& c : table.columns)
            out << ',' << sci(c.temperature[k]) << ',' << sci(c.percent_error[k]);
        out << ',' << sci(table.analytic[k]) << '\n';
    }
    finish(out, path);
}

void write_norms_csv(const std::filesystem::path& path, const TimeSeries& series)
{
    auto out = open(path);
    const auto J = series.member_l2.empty() ? 0 : series.member_l2.front().size();
    out << 't';
    for (std::size_t j = 0; j < J; ++j)
        out << ",T" << j + 1;
    out << ",mean\n";
    for (std::size_t n = 0; n < series.times.size(); ++n) {
        out << sci(series.times[n]);
        for (double v : series.member_l2[n])
            out << ',' << sci(v);
        out << ',' << sci(series.mean_l2[n]) << '\n';
    }
    finish(out, path);
}

void write_vtk(const std::filesystem::path& path, const Mesh& mesh,
               std::span<const NamedField> fields, const std::string& title)
{
    for (const auto& [name, values] : fields)
        if (values.size() != mesh.num_vertices())
            throw std::invalid_argument("field '" + name + "' does not match the mesh");
    auto out = open(path);
    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.num_vertices() << " double\n";
    for (const auto& p : mesh.vertices())
        out << g9(p.x) << ' ' << g9(p.y) << " 0\n";
    const auto nt = mesh.num_triangles();
    out << "CELLS " << nt << ' ' << 4 * nt << '\n';
    for (const auto& t : mesh.triangles())
        out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    out << "CELL_TYPES " << nt << '\n';
    for (std::size_t k = 0; k < nt; ++k)
        out << "5\n";
    if (!fields.empty()) {
        out << "POINT_DATA " << mesh.num_vertices() << '\n';
        for (const auto& [name, values] : fields) {
            out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
            for (double v : values)
                out << g9(v) << '\n';
        }
    }
    finish(out, path);
}

std::vector<std::filesystem::path> write_snapshots(const std::filesystem::path& dir,
                                                   const std::string& prefix, const Mesh& mesh,
                                                   const TimeSeries& series)
{
    std::vector<std::filesystem::path> written;
    for (const auto& s : series.snapshots) {
        std::vector<NamedField> fields;
        std::vector<std::string> names;
        names.reserve(s.members.size());
        for (std::size_t j = 0; j < s.members.size(); ++j)
            names.push_back("T" + std::to_string(j + 1));
        for (std::size_t j = 0; j < s.members.size(); ++j)
            fields.emplace_back(names[j], s.members[j]);
        fields.emplace_back("mean", s.mean);
        char step[16];
        std::snprintf(step, sizeof step, "%05zu", s.step);
        auto path = dir / (prefix + "_" + step + ".vtk");
        write_vtk(path, mesh, fields, prefix + " t=" + g9(s.time));
        written.push_back(std::move(path));
    }
    return written;
}

} // namespace ensheat::io
