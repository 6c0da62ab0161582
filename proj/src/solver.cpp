#include "ensheat/solver.hpp"

#include "ensheat/errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>

namespace ensheat {

namespace {

std::atomic<std::size_t> g_factorizations{0};

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

} // namespace

std::size_t factorization_count() { return g_factorizations.load(); }
void reset_factorization_count() { g_factorizations.store(0); }

std::vector<std::vector<double>> BlockSolver::solve_block(std::span<const std::vector<double>> rhs,
                                                          unsigned threads) const
{
    for (const auto& b : rhs)
        if (b.size() != size())
            throw std::invalid_argument("solve_block: right-hand side has dimension " +
                                        std::to_string(b.size()) + ", expected " +
                                        std::to_string(size()));
    std::vector<std::vector<double>> out(rhs.size());
    detail::parallel_for(rhs.size(), threads, [&](std::size_t j) { out[j] = solve(rhs[j]); });
    return out;
}

std::vector<std::vector<double>> solve_block(const BlockSolver& solver,
                                             std::span<const std::vector<double>> rhs,
                                             unsigned threads)
{
    return solver.solve_block(rhs, threads);
}

std::vector<std::size_t> reverse_cuthill_mckee(const SparsityPattern& p)
{
    const auto n = p.n;
    std::vector<std::size_t> degree(n);
    for (std::size_t i = 0; i < n; ++i)
        degree[i] = p.row_ptr[i + 1] - p.row_ptr[i];

    std::vector<char> visited(n, 0);
    std::vector<std::size_t> order;
    order.reserve(n);
    std::vector<std::size_t> nbrs;

    // BFS from `start` over unvisited nodes; returns the level structure's last node.
    const auto bfs = [&](std::size_t start, std::vector<std::size_t>& out) {
        out.clear();
        std::deque<std::size_t> queue{start};
        visited[start] = 1;
        while (!queue.empty()) {
            const auto u = queue.front();
            queue.pop_front();
            out.push_back(u);
            nbrs.clear();
            for (auto s = p.row_ptr[u]; s < p.row_ptr[u + 1]; ++s)
                if (!visited[p.col[s]])
                    nbrs.push_back(p.col[s]);
            std::stable_sort(nbrs.begin(), nbrs.end(),
                             [&](std::size_t a, std::size_t b) { return degree[a] < degree[b]; });
            for (auto v : nbrs) {
                visited[v] = 1;
                queue.push_back(v);
            }
        }
    };

    std::vector<std::size_t> component;
    for (std::size_t seed = 0; seed < n; ++seed) {
        if (visited[seed])
            continue;
        // Pick a low-degree start within the component, then move to the far
        // end of one BFS sweep as a pseudo-peripheral node.
        bfs(seed, component);
        std::size_t start = component.front();
        for (auto v : component)
            if (degree[v] < degree[start])
                start = v;
        for (auto v : component)
            visited[v] = 0;
        bfs(start, component);
        const auto far = component.back();
        for (auto v : component)
            visited[v] = 0;
        bfs(far, component);
        order.insert(order.end(), component.begin(), component.end());
    }
    std::reverse(order.begin(), order.end());
    return order;
}

SpdFactor::SpdFactor(const SparseSymMatrix& a)
    : n_(a.size()), fingerprint_(a.fingerprint())
{
    ++g_factorizations;
    const auto& pa = a.pattern();
    const auto av = a.values();

    perm_ = reverse_cuthill_mckee(pa);
    inv_perm_.assign(n_, 0);
    for (std::size_t k = 0; k < n_; ++k)
        inv_perm_[perm_[k]] = k;

    // Upper triangle of the permuted matrix, by column: for column k store
    // rows i <= k of C = P A P^T.
    std::vector<std::size_t> c_ptr(n_ + 1, 0);
    for (std::size_t r = 0; r < n_; ++r)
        for (auto s = pa.row_ptr[r]; s < pa.row_ptr[r + 1]; ++s) {
            const auto i = inv_perm_[r];
            const auto k = inv_perm_[pa.col[s]];
            if (i <= k)
                ++c_ptr[k + 1];
        }
    for (std::size_t k = 0; k < n_; ++k)
        c_ptr[k + 1] += c_ptr[k];
    std::vector<std::size_t> c_row(c_ptr[n_]);
    std::vector<double> c_val(c_ptr[n_]);
    {
        std::vector<std::size_t> next(c_ptr.begin(), c_ptr.end() - 1);
        for (std::size_t r = 0; r < n_; ++r)
            for (auto s = pa.row_ptr[r]; s < pa.row_ptr[r + 1]; ++s) {
                const auto i = inv_perm_[r];
                const auto k = inv_perm_[pa.col[s]];
                if (i <= k) {
                    c_row[next[k]] = i;
                    c_val[next[k]++] = av[s];
                }
            }
    }

    // Elimination tree.
    std::vector<std::size_t> parent(n_, kNone);
    {
        std::vector<std::size_t> ancestor(n_, kNone);
        for (std::size_t k = 0; k < n_; ++k)
            for (auto s = c_ptr[k]; s < c_ptr[k + 1]; ++s) {
                for (auto i = c_row[s]; i != kNone && i < k;) {
                    const auto next = ancestor[i];
                    ancestor[i] = k;
                    if (next == kNone)
                        parent[i] = k;
                    i = next;
                }
            }
    }

    // Nonzero pattern of row k of L, topologically ordered, in stack[top..n).
    std::vector<std::size_t> stack(n_);
    std::vector<std::size_t> path(n_);
    std::vector<std::size_t> mark(n_, kNone);
    const auto ereach = [&](std::size_t k) {
        std::size_t top = n_;
        mark[k] = k;
        for (auto s = c_ptr[k]; s < c_ptr[k + 1]; ++s) {
            auto i = c_row[s];
            if (i >= k)
                continue;
            std::size_t len = 0;
            for (; mark[i] != k; i = parent[i]) {
                path[len++] = i;
                mark[i] = k;
            }
            while (len > 0)
                stack[--top] = path[--len];
        }
        return top;
    };

    std::vector<std::size_t> counts(n_, 1);
    for (std::size_t k = 0; k < n_; ++k)
        for (auto t = ereach(k); t < n_; ++t)
            ++counts[stack[t]];
    l_ptr_.assign(n_ + 1, 0);
    for (std::size_t k = 0; k < n_; ++k)
        l_ptr_[k + 1] = l_ptr_[k] + counts[k];
    l_row_.assign(l_ptr_[n_], 0);
    l_val_.assign(l_ptr_[n_], 0.0);

    std::fill(mark.begin(), mark.end(), kNone);
    std::vector<std::size_t> fill(l_ptr_.begin(), l_ptr_.end() - 1);
    std::vector<double> x(n_, 0.0);
    for (std::size_t k = 0; k < n_; ++k) {
        const auto top = ereach(k);
        for (auto s = c_ptr[k]; s < c_ptr[k + 1]; ++s)
            x[c_row[s]] = c_val[s];
        double d = x[k];
        x[k] = 0.0;
        for (auto t = top; t < n_; ++t) {
            const auto i = stack[t];
            const double lki = x[i] / l_val_[l_ptr_[i]];
            x[i] = 0.0;
            for (auto p = l_ptr_[i] + 1; p < fill[i]; ++p)
                x[l_row_[p]] -= l_val_[p] * lki;
            d -= lki * lki;
            const auto p = fill[i]++;
            l_row_[p] = k;
            l_val_[p] = lki;
        }
        if (!(d > 0.0))
            throw FactorizationError("matrix is not positive definite: nonpositive pivot at row " +
                                         std::to_string(perm_[k]),
                                     perm_[k]);
        const auto p = fill[k]++;
        l_row_[p] = k;
        l_val_[p] = std::sqrt(d);
    }
}

std::vector<double> SpdFactor::solve(std::span<const double> b) const
{
    if (b.size() != n_)
        throw std::invalid_argument("SpdFactor::solve: dimension mismatch");
    std::vector<double> y(n_);
    for (std::size_t k = 0; k < n_; ++k)
        y[k] = b[perm_[k]];
    for (std::size_t j = 0; j < n_; ++j) {
        y[j] /= l_val_[l_ptr_[j]];
        const double yj = y[j];
        for (auto p = l_ptr_[j] + 1; p < l_ptr_[j + 1]; ++p)
            y[l_row_[p]] -= l_val_[p] * yj;
    }
    for (std::size_t j = n_; j-- > 0;) {
        double s = y[j];
        for (auto p = l_ptr_[j] + 1; p < l_ptr_[j + 1]; ++p)
            s -= l_val_[p] * y[l_row_[p]];
        y[j] = s / l_val_[l_ptr_[j]];
    }
    std::vector<double> x(n_);
    for (std::size_t k = 0; k < n_; ++k)
        x[perm_[k]] = y[k];
    return x;
}

std::vector<double> SpdFactor::reconstruct_dense() const
{
    std::vector<double> l(n_ * n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j)
        for (auto p = l_ptr_[j]; p < l_ptr_[j + 1]; ++p)
            l[l_row_[p] * n_ + j] = l_val_[p];
    std::vector<double> a(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k <= std::min(i, j); ++k)
                s += l[i * n_ + k] * l[j * n_ + k];
            a[perm_[i] * n_ + perm_[j]] = s;
        }
    return a;
}

SpdFactor factorize(const SparseSymMatrix& a) { return SpdFactor(a); }

namespace {

double norm2(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return std::sqrt(s);
}

} // namespace

double residual_norm(const SparseSymMatrix& a, std::span<const double> x, std::span<const double> b)
{
    auto r = a.multiply(x);
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] -= b[i];
    return norm2(r);
}

PcgResult pcg_solve(const SparseSymMatrix& a, std::span<const double> b, double tol,
                    std::size_t max_iter)
{
    const auto n = a.size();
    if (b.size() != n)
        throw std::invalid_argument("pcg_solve: dimension mismatch");
    std::vector<double> inv_diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a(i, i);
        if (!(d > 0.0))
            throw SolverError("pcg_solve: nonpositive diagonal at row " + std::to_string(i));
        inv_diag[i] = 1.0 / d;
    }

    PcgResult res;
    res.x.assign(n, 0.0);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }
    std::vector<double> r(b.begin(), b.end());
    std::vector<double> z(n), p(n), q(n);
    for (std::size_t i = 0; i < n; ++i)
        z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        rz += r[i] * z[i];

    while (res.iterations < max_iter) {
        a.multiply(p, q);
        double pq = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            pq += p[i] * q[i];
        if (!(pq > 0.0))
            throw SolverError("pcg_solve: breakdown (p^T A p <= 0)");
        const double alpha = rz / pq;
        for (std::size_t i = 0; i < n; ++i) {
            res.x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        ++res.iterations;
        res.relative_residual = norm2(r) / bnorm;
        if (res.relative_residual <= tol) {
            res.converged = true;
            return res;
        }
        double rz_next = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = inv_diag[i] * r[i];
            rz_next += r[i] * z[i];
        }
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i)
            p[i] = z[i] + beta * p[i];
    }
    return res;
}

PcgSolver::PcgSolver(SparseSymMatrix a, double tol, std::size_t max_iter)
    : a_(std::move(a)), fingerprint_(a_.fingerprint()), tol_(tol), max_iter_(max_iter)
{
}

std::vector<double> PcgSolver::solve(std::span<const double> b) const
{
    auto res = pcg_solve(a_, b, tol_, max_iter_);
    if (!res.converged)
        throw SolverError("pcg did not converge in " + std::to_string(max_iter_) +
                          " iterations (relative residual " +
                          std::to_string(res.relative_residual) + ")");
    return std::move(res.x);
}

} // namespace ensheat
