#include "ensheat/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace ensheat {

namespace {

// Degree-2, 3-point rule on the reference triangle (barycentric, weights sum to 1).
constexpr std::array<std::array<double, 3>, 3> kAssemblyPoints{{
    {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
    {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
    {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0},
}};
constexpr double kAssemblyWeight = 1.0 / 3.0;

// Degree-4, 6-point Dunavant rule.
struct QuadPoint {
    std::array<double, 3> bary;
    double weight;
};

constexpr double kA1 = 0.445948490915965, kB1 = 1.0 - 2.0 * kA1;
constexpr double kA2 = 0.091576213509771, kB2 = 1.0 - 2.0 * kA2;
constexpr double kW1 = 0.223381589678011, kW2 = 0.109951743655322;
constexpr std::array<QuadPoint, 6> kNormRule{{
    {{kB1, kA1, kA1}, kW1},
    {{kA1, kB1, kA1}, kW1},
    {{kA1, kA1, kB1}, kW1},
    {{kB2, kA2, kA2}, kW2},
    {{kA2, kB2, kA2}, kW2},
    {{kA2, kA2, kB2}, kW2},
}};

// Two-point Gauss-Legendre on [0, 1].
constexpr double kGaussLo = 0.5 - 0.28867513459481287;
constexpr double kGaussHi = 0.5 + 0.28867513459481287;

std::array<std::array<double, 2>, 3> basis_gradients(const Point& p0, const Point& p1,
                                                     const Point& p2, double area)
{
    const double inv = 1.0 / (2.0 * area);
    return {{{(p1.y - p2.y) * inv, (p2.x - p1.x) * inv},
             {(p2.y - p0.y) * inv, (p0.x - p2.x) * inv},
             {(p0.y - p1.y) * inv, (p1.x - p0.x) * inv}}};
}

} // namespace

P1Space::P1Space(std::shared_ptr<const Mesh> mesh)
    : mesh_(std::move(mesh)), pattern_(SparsityPattern::from_mesh(*mesh_))
{
    const auto& v = mesh_->vertices();
    elements_.reserve(mesh_->num_triangles());
    for (std::size_t k = 0; k < mesh_->num_triangles(); ++k) {
        const auto& t = mesh_->triangles()[k];
        Element e;
        e.v = t;
        e.area = mesh_->area(k);
        e.grad = basis_gradients(v[t[0]], v[t[1]], v[t[2]], e.area);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                e.slots[3 * a + b] = pattern_->slot(t[a], t[b]);
        elements_.push_back(e);
    }
}

SparseSymMatrix P1Space::assemble_mass() const
{
    SparseSymMatrix m(pattern_);
    auto vals = m.values();
    for (const auto& e : elements_) {
        const double off = e.area / 12.0;
        const double diag = 2.0 * off;
        for (int a = 0; a < 3; ++a) {
            vals[e.slots[3 * a + a]] += diag;
            for (int b = a + 1; b < 3; ++b) {
                vals[e.slots[3 * a + b]] += off;
                vals[e.slots[3 * b + a]] += off;
            }
        }
    }
    return m;
}

SparseSymMatrix P1Space::assemble_stiffness(std::span<const double> coeff,
                                            const ConductivityModel* model, StiffnessMode mode,
                                            AssemblyStats* stats) const
{
    SparseSymMatrix k(pattern_);
    assemble_stiffness_into(k, coeff, model, mode, stats);
    return k;
}

void P1Space::assemble_stiffness_into(SparseSymMatrix& out, std::span<const double> coeff,
                                      const ConductivityModel* model, StiffnessMode mode,
                                      AssemblyStats* stats) const
{
    if (out.pattern_ptr() != pattern_)
        throw std::invalid_argument("assemble_stiffness: output matrix uses a different pattern");
    if (mode != StiffnessMode::identity) {
        if (model == nullptr)
            throw std::invalid_argument("assemble_stiffness: mode requires a conductivity model");
        if (coeff.size() != num_dofs())
            throw std::invalid_argument("assemble_stiffness: coefficient field has wrong length");
    }
    auto vals = out.values();
    std::fill(vals.begin(), vals.end(), 0.0);

    std::size_t evaluations = 0;
    std::size_t violations = 0;
    for (const auto& e : elements_) {
        double c = 1.0;
        if (mode != StiffnessMode::identity) {
            double sum = 0.0;
            for (const auto& q : kAssemblyPoints) {
                const double T = q[0] * coeff[e.v[0]] + q[1] * coeff[e.v[1]] + q[2] * coeff[e.v[2]];
                const auto s = model->sample(T);
                violations += s.clamped ? 1 : 0;
                sum += kAssemblyWeight *
                       (mode == StiffnessMode::kappa_of ? s.value : model->kappa_max() - s.value);
            }
            evaluations += kAssemblyPoints.size();
            c = sum;
        }
        const double scale = c * e.area;
        for (int a = 0; a < 3; ++a) {
            const auto& ga = e.grad[a];
            vals[e.slots[3 * a + a]] += scale * (ga[0] * ga[0] + ga[1] * ga[1]);
            for (int b = a + 1; b < 3; ++b) {
                const auto& gb = e.grad[b];
                const double v = scale * (ga[0] * gb[0] + ga[1] * gb[1]);
                vals[e.slots[3 * a + b]] += v;
                vals[e.slots[3 * b + a]] += v;
            }
        }
    }
    if (stats) {
        stats->kappa_evaluations += evaluations;
        stats->bound_violations += violations;
    }
}

std::vector<std::size_t> P1Space::edges_with_labels(std::span<const std::string> labels) const
{
    for (const auto& l : labels)
        if (!mesh_->has_label(l))
            throw std::invalid_argument("unknown boundary label '" + l + "'");
    std::vector<std::size_t> out;
    const auto& edges = mesh_->boundary_edges();
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (std::find(labels.begin(), labels.end(), edges[i].label) != labels.end())
            out.push_back(i);
    return out;
}

SparseSymMatrix P1Space::assemble_boundary_mass(std::span<const std::string> labels,
                                                double alpha) const
{
    const auto selected = edges_with_labels(labels);
    SparseSymMatrix r(pattern_);
    const auto& v = mesh_->vertices();
    for (auto idx : selected) {
        const auto [i, j] = mesh_->boundary_edges()[idx].vertices;
        const double len = std::hypot(v[j].x - v[i].x, v[j].y - v[i].y);
        const double off = alpha * len / 6.0;
        r.add(i, i, 2.0 * off);
        r.add(j, j, 2.0 * off);
        r.add_sym(i, j, off);
    }
    return r;
}

void P1Space::add_load(std::span<double> b, const SpaceTimeFn& f, double t) const
{
    if (b.size() != num_dofs())
        throw std::invalid_argument("add_load: vector has wrong length");
    const auto& v = mesh_->vertices();
    for (const auto& e : elements_) {
        const auto& p0 = v[e.v[0]];
        const auto& p1 = v[e.v[1]];
        const auto& p2 = v[e.v[2]];
        std::array<double, 3> local{};
        for (const auto& q : kAssemblyPoints) {
            const double x = q[0] * p0.x + q[1] * p1.x + q[2] * p2.x;
            const double y = q[0] * p0.y + q[1] * p1.y + q[2] * p2.y;
            const double fw = kAssemblyWeight * f(x, y, t);
            for (int a = 0; a < 3; ++a)
                local[a] += fw * q[a];
        }
        for (int a = 0; a < 3; ++a)
            b[e.v[a]] += e.area * local[a];
    }
}

void P1Space::add_boundary_load(std::span<double> b, std::span<const std::string> labels,
                                const SpaceTimeFn& g, double t) const
{
    if (b.size() != num_dofs())
        throw std::invalid_argument("add_boundary_load: vector has wrong length");
    const auto selected = edges_with_labels(labels);
    const auto& v = mesh_->vertices();
    for (auto idx : selected) {
        const auto [i, j] = mesh_->boundary_edges()[idx].vertices;
        const auto& pi = v[i];
        const auto& pj = v[j];
        const double len = std::hypot(pj.x - pi.x, pj.y - pi.y);
        double bi = 0.0;
        double bj = 0.0;
        for (double s : {kGaussLo, kGaussHi}) {
            const double gv = 0.5 * len * g(pi.x + s * (pj.x - pi.x), pi.y + s * (pj.y - pi.y), t);
            bi += gv * (1.0 - s);
            bj += gv * s;
        }
        b[i] += bi;
        b[j] += bj;
    }
}

std::vector<double> P1Space::assemble_load(const SpaceTimeFn& f, double t) const
{
    std::vector<double> b(num_dofs(), 0.0);
    add_load(b, f, t);
    return b;
}

std::vector<double> P1Space::assemble_boundary_load(std::span<const std::string> labels,
                                                    const SpaceTimeFn& g, double t) const
{
    std::vector<double> b(num_dofs(), 0.0);
    add_boundary_load(b, labels, g, t);
    return b;
}

namespace {

std::shared_ptr<const Mesh> borrow(const Mesh& mesh)
{
    return std::shared_ptr<const Mesh>(&mesh, [](const Mesh*) {});
}

} // namespace

SparseSymMatrix assemble_mass(const Mesh& mesh) { return P1Space(borrow(mesh)).assemble_mass(); }

SparseSymMatrix assemble_stiffness(const Mesh& mesh, std::span<const double> coeff,
                                   const ConductivityModel* model, StiffnessMode mode,
                                   AssemblyStats* stats)
{
    return P1Space(borrow(mesh)).assemble_stiffness(coeff, model, mode, stats);
}

SparseSymMatrix assemble_boundary_mass(const Mesh& mesh, std::span<const std::string> labels,
                                       double alpha)
{
    return P1Space(borrow(mesh)).assemble_boundary_mass(labels, alpha);
}

std::vector<double> assemble_load(const Mesh& mesh, const SpaceTimeFn& f, double t)
{
    return P1Space(borrow(mesh)).assemble_load(f, t);
}

std::vector<double> assemble_boundary_load(const Mesh& mesh, std::span<const std::string> labels,
                                           const SpaceTimeFn& g, double t)
{
    return P1Space(borrow(mesh)).assemble_boundary_load(labels, g, t);
}

DirichletLift::DirichletLift(const SparseSymMatrix& unconstrained, std::vector<std::size_t> nodes)
    : nodes_(std::move(nodes)), constrained_(unconstrained.size(), 0)
{
    for (auto i : nodes_) {
        if (i >= unconstrained.size())
            throw std::invalid_argument("Dirichlet node index out of range");
        if (constrained_[i])
            throw std::invalid_argument("Dirichlet node listed twice");
        constrained_[i] = 1;
    }
    const auto& p = unconstrained.pattern();
    const auto vals = unconstrained.values();
    coupling_.resize(nodes_.size());
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        const auto i = nodes_[k];
        // Column i equals row i by symmetry.
        for (auto s = p.row_ptr[i]; s < p.row_ptr[i + 1]; ++s) {
            const auto j = p.col[s];
            if (!constrained_[j] && vals[s] != 0.0)
                coupling_[k].emplace_back(j, vals[s]);
        }
    }
}

void DirichletLift::constrain(SparseSymMatrix& a) const
{
    if (nodes_.empty())
        return;
    if (a.size() != constrained_.size())
        throw std::invalid_argument("DirichletLift::constrain: dimension mismatch");
    const auto& p = a.pattern();
    auto vals = a.values();
    for (std::size_t i = 0; i < a.size(); ++i)
        for (auto s = p.row_ptr[i]; s < p.row_ptr[i + 1]; ++s) {
            const auto j = p.col[s];
            if (constrained_[i] || constrained_[j])
                vals[s] = (i == j) ? 1.0 : 0.0;
        }
}

void DirichletLift::lift(std::span<double> b, std::span<const double> values) const
{
    if (values.size() != nodes_.size())
        throw std::invalid_argument("DirichletLift::lift: expected one value per node");
    if (!nodes_.empty() && b.size() != constrained_.size())
        throw std::invalid_argument("DirichletLift::lift: dimension mismatch");
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        const double g = values[k];
        if (g == 0.0)
            continue;
        for (const auto& [j, aji] : coupling_[k])
            b[j] -= aji * g;
    }
    for (std::size_t k = 0; k < nodes_.size(); ++k)
        b[nodes_[k]] = values[k];
}

void apply_dirichlet(SparseSymMatrix& a, std::vector<double>& b,
                     std::span<const DirichletValue> values)
{
    if (b.size() != a.size())
        throw std::invalid_argument("apply_dirichlet: dimension mismatch");
    std::map<std::size_t, double> unique;
    for (const auto& dv : values) {
        if (dv.node >= a.size())
            throw std::invalid_argument("apply_dirichlet: node index out of range");
        auto [it, inserted] = unique.emplace(dv.node, dv.value);
        if (!inserted && it->second != dv.value)
            throw std::invalid_argument("apply_dirichlet: node " + std::to_string(dv.node) +
                                        " has conflicting values");
    }
    std::vector<std::size_t> nodes;
    std::vector<double> g;
    for (const auto& [n, v] : unique) {
        nodes.push_back(n);
        g.push_back(v);
    }
    DirichletLift lift(a, nodes);
    lift.lift(b, g);
    lift.constrain(a);
}

NodalField interpolate(const Mesh& mesh, const SpaceTimeFn& u, double t)
{
    NodalField out;
    out.reserve(mesh.num_vertices());
    for (const auto& p : mesh.vertices())
        out.push_back(u(p.x, p.y, t));
    return out;
}

ErrorNorms error_norms(const Mesh& mesh, std::span<const double> u_h, const SpaceTimeFn& u_exact,
                       const GradientFn& grad_exact, double t)
{
    if (u_h.size() != mesh.num_vertices())
        throw std::invalid_argument("error_norms: field has wrong length");
    const auto& v = mesh.vertices();
    double l2 = 0.0;
    double h1 = 0.0;
    for (std::size_t k = 0; k < mesh.num_triangles(); ++k) {
        const auto& tri = mesh.triangles()[k];
        const auto& p0 = v[tri[0]];
        const auto& p1 = v[tri[1]];
        const auto& p2 = v[tri[2]];
        const double area = mesh.area(k);
        const auto grad = basis_gradients(p0, p1, p2, area);
        std::array<double, 2> gh{0.0, 0.0};
        for (int a = 0; a < 3; ++a) {
            gh[0] += u_h[tri[a]] * grad[a][0];
            gh[1] += u_h[tri[a]] * grad[a][1];
        }
        double el2 = 0.0;
        double eh1 = 0.0;
        for (const auto& q : kNormRule) {
            const double x = q.bary[0] * p0.x + q.bary[1] * p1.x + q.bary[2] * p2.x;
            const double y = q.bary[0] * p0.y + q.bary[1] * p1.y + q.bary[2] * p2.y;
            const double uh =
                q.bary[0] * u_h[tri[0]] + q.bary[1] * u_h[tri[1]] + q.bary[2] * u_h[tri[2]];
            const double d = uh - u_exact(x, y, t);
            const auto ge = grad_exact(x, y, t);
            const double dx = gh[0] - ge[0];
            const double dy = gh[1] - ge[1];
            el2 += q.weight * d * d;
            eh1 += q.weight * (dx * dx + dy * dy);
        }
        l2 += area * el2;
        h1 += area * eh1;
    }
    return {std::sqrt(l2), std::sqrt(h1)};
}

} // namespace ensheat
