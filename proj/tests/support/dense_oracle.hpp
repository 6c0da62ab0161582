#pragma once

// Dense re-assembly of one time step, written without the sparse/CSR code
// paths: local matrices from closed forms, Dirichlet nodes removed by
// restricting to the free block, Gaussian elimination with partial pivoting.

#include "ensheat/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense zeros(std::size_t n) { return Dense(n, std::vector<double>(n, 0.0)); }

inline std::vector<double> gauss_solve(Dense a, std::vector<double> b)
{
    const auto n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[p][k]))
                p = i;
        if (a[p][k] == 0.0)
            throw std::runtime_error("singular dense system");
        std::swap(a[p], a[k]);
        std::swap(b[p], b[k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i][k] / a[k][k];
            if (f == 0.0)
                continue;
            for (std::size_t j = k; j < n; ++j)
                a[i][j] -= f * a[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j)
            s -= a[k][j] * x[j];
        x[k] = s / a[k][k];
    }
    return x;
}

struct Local {
    double area;
    std::array<std::array<double, 2>, 3> grad;
    std::array<ensheat::Point, 3> p;
};

inline Local local(const ensheat::Mesh& mesh, std::size_t k)
{
    const auto& t = mesh.triangles()[k];
    Local l{};
    for (int a = 0; a < 3; ++a)
        l.p[a] = mesh.vertices()[t[a]];
    const double det = (l.p[1].x - l.p[0].x) * (l.p[2].y - l.p[0].y) -
                       (l.p[2].x - l.p[0].x) * (l.p[1].y - l.p[0].y);
    l.area = 0.5 * det;
    // grad lambda_a = (y_b - y_c, x_c - x_b) / det for (a, b, c) cyclic.
    for (int a = 0; a < 3; ++a) {
        const auto& pb = l.p[(a + 1) % 3];
        const auto& pc = l.p[(a + 2) % 3];
        l.grad[a] = {(pb.y - pc.y) / det, (pc.x - pb.x) / det};
    }
    return l;
}

/// One step of the shared-matrix scheme for member j from state T_n to level n+1.
inline std::vector<double> one_step(const ensheat::Scenario& sc, std::size_t j,
                                    const std::vector<double>& T_n, std::size_t next_step)
{
    const auto& mesh = *sc.mesh;
    const auto n = mesh.num_vertices();
    const double dt = sc.dt;
    const double t = static_cast<double>(next_step) * dt;
    const auto& model = sc.conductivity_of(j);
    const double kmax = model.kappa_max();

    Dense A = zeros(n);
    std::vector<double> rhs(n, 0.0);
    const double bary[3][3] = {{2.0 / 3, 1.0 / 6, 1.0 / 6},
                               {1.0 / 6, 2.0 / 3, 1.0 / 6},
                               {1.0 / 6, 1.0 / 6, 2.0 / 3}};

    for (std::size_t k = 0; k < mesh.num_triangles(); ++k) {
        const auto& tri = mesh.triangles()[k];
        const auto L = local(mesh, k);
        double kprime_int = 0.0; // integral of kappa_max - kappa(T_h) over the element
        std::array<double, 3> f_load{};
        for (const auto& lam : bary) {
            double Tq = 0.0, xq = 0.0, yq = 0.0;
            for (int a = 0; a < 3; ++a) {
                Tq += lam[a] * T_n[tri[a]];
                xq += lam[a] * L.p[a].x;
                yq += lam[a] * L.p[a].y;
            }
            kprime_int += L.area / 3.0 * (kmax - model.eval(Tq));
            if (sc.source) {
                const double fq = sc.source(j, xq, yq, t);
                for (int a = 0; a < 3; ++a)
                    f_load[a] += L.area / 3.0 * fq * lam[a];
            }
        }
        for (int a = 0; a < 3; ++a) {
            rhs[tri[a]] += f_load[a];
            for (int b = 0; b < 3; ++b) {
                const double mass = L.area / 12.0 * (a == b ? 2.0 : 1.0);
                const double gg = L.grad[a][0] * L.grad[b][0] + L.grad[a][1] * L.grad[b][1];
                A[tri[a]][tri[b]] += mass / dt + kmax * L.area * gg;
                rhs[tri[a]] += (mass / dt + kprime_int * gg) * T_n[tri[b]];
            }
        }
    }

    const double g0 = 0.5 - std::sqrt(3.0) / 6.0;
    const double g1 = 0.5 + std::sqrt(3.0) / 6.0;
    std::vector<int> owner(n, -1);
    for (std::size_t e = 0; e < sc.boundary.size(); ++e) {
        const auto& entry = sc.boundary[e];
        for (const auto& edge : mesh.boundary_edges()) {
            if (edge.label != entry.label)
                continue;
            const auto a = edge.vertices[0], b = edge.vertices[1];
            const auto& pa = mesh.vertices()[a];
            const auto& pb = mesh.vertices()[b];
            const double len = std::hypot(pb.x - pa.x, pb.y - pa.y);
            const auto& c = entry.condition;
            if (c.kind == ensheat::BcKind::dirichlet) {
                for (auto v : {a, b})
                    if (owner[v] < 0)
                        owner[v] = static_cast<int>(e);
                continue;
            }
            if (c.kind == ensheat::BcKind::robin) {
                A[a][a] += c.alpha * len / 3.0;
                A[b][b] += c.alpha * len / 3.0;
                A[a][b] += c.alpha * len / 6.0;
                A[b][a] += c.alpha * len / 6.0;
            }
            if (c.data)
                for (double s : {g0, g1}) {
                    const double val = c.data(j, pa.x + s * (pb.x - pa.x), pa.y + s * (pb.y - pa.y), t);
                    rhs[a] += 0.5 * len * val * (1.0 - s);
                    rhs[b] += 0.5 * len * val * s;
                }
        }
    }

    std::vector<double> x(n, 0.0);
    std::vector<std::size_t> free;
    for (std::size_t v = 0; v < n; ++v) {
        if (owner[v] < 0) {
            free.push_back(v);
            continue;
        }
        const auto& data = sc.boundary[static_cast<std::size_t>(owner[v])].condition.data;
        x[v] = data ? data(j, mesh.vertices()[v].x, mesh.vertices()[v].y, t) : 0.0;
    }
    Dense Aff = zeros(free.size());
    std::vector<double> bf(free.size());
    for (std::size_t r = 0; r < free.size(); ++r) {
        bf[r] = rhs[free[r]];
        for (std::size_t v = 0; v < n; ++v)
            if (owner[v] >= 0)
                bf[r] -= A[free[r]][v] * x[v];
        for (std::size_t c = 0; c < free.size(); ++c)
            Aff[r][c] = A[free[r]][free[c]];
    }
    const auto xf = gauss_solve(std::move(Aff), std::move(bf));
    for (std::size_t r = 0; r < free.size(); ++r)
        x[free[r]] = xf[r];
    return x;
}

} // namespace oracle
