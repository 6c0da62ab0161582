#include "ensheat/sparse.hpp"

#include "ensheat/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace ensheat {

std::size_t SparsityPattern::find(std::size_t i, std::size_t j) const noexcept
{
    if (i >= n)
        return npos;
    const auto first = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
    const auto last = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j)
        return npos;
    return static_cast<std::size_t>(it - col.begin());
}

std::size_t SparsityPattern::slot(std::size_t i, std::size_t j) const
{
    const auto s = find(i, j);
    if (s == npos)
        throw std::out_of_range("entry (" + std::to_string(i) + ", " + std::to_string(j) +
                                ") not in sparsity pattern");
    return s;
}

std::shared_ptr<const SparsityPattern>
SparsityPattern::from_entries(std::size_t n,
                              std::span<const std::pair<std::size_t, std::size_t>> entries)
{
    std::vector<std::vector<std::size_t>> rows(n);
    for (auto [i, j] : entries) {
        if (i >= n || j >= n)
            throw std::out_of_range("sparsity entry out of range");
        rows[i].push_back(j);
    }
    auto p = std::make_shared<SparsityPattern>();
    p->n = n;
    p->row_ptr.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto& r = rows[i];
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
        p->row_ptr[i + 1] = p->row_ptr[i] + r.size();
    }
    p->col.reserve(p->row_ptr[n]);
    for (const auto& r : rows)
        p->col.insert(p->col.end(), r.begin(), r.end());
    return p;
}

std::shared_ptr<const SparsityPattern> SparsityPattern::from_mesh(const Mesh& mesh)
{
    std::vector<std::pair<std::size_t, std::size_t>> entries;
    entries.reserve(9 * mesh.num_triangles());
    for (const auto& t : mesh.triangles())
        for (auto a : t)
            for (auto b : t)
                entries.emplace_back(a, b);
    return from_entries(mesh.num_vertices(), entries);
}

SparseSymMatrix::SparseSymMatrix(std::shared_ptr<const SparsityPattern> pattern)
    : pattern_(std::move(pattern)), values_(pattern_->nnz(), 0.0)
{
}

SparseSymMatrix SparseSymMatrix::identity(std::size_t n)
{
    std::vector<std::pair<std::size_t, std::size_t>> diag;
    diag.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        diag.emplace_back(i, i);
    SparseSymMatrix a(SparsityPattern::from_entries(n, diag));
    std::fill(a.values_.begin(), a.values_.end(), 1.0);
    return a;
}

SparseSymMatrix SparseSymMatrix::from_dense(std::size_t n, std::span<const double> dense)
{
    if (dense.size() != n * n)
        throw std::invalid_argument("from_dense: expected n*n values");
    std::vector<std::pair<std::size_t, std::size_t>> entries;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (dense[i * n + j] != 0.0 || dense[j * n + i] != 0.0 || i == j)
                entries.emplace_back(i, j);
    SparseSymMatrix a(SparsityPattern::from_entries(n, entries));
    for (auto [i, j] : entries)
        a.values_[a.pattern_->slot(i, j)] = dense[i * n + j];
    return a;
}

double SparseSymMatrix::operator()(std::size_t i, std::size_t j) const
{
    const auto s = pattern_->find(i, j);
    return s == SparsityPattern::npos ? 0.0 : values_[s];
}

void SparseSymMatrix::add_sym(std::size_t i, std::size_t j, double v)
{
    values_[pattern_->slot(i, j)] += v;
    if (i != j)
        values_[pattern_->slot(j, i)] += v;
}

void SparseSymMatrix::multiply(std::span<const double> x, std::span<double> y) const
{
    const auto n = size();
    if (x.size() != n || y.size() != n)
        throw std::invalid_argument("multiply: dimension mismatch");
    const auto& rp = pattern_->row_ptr;
    const auto& ci = pattern_->col;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (auto k = rp[i]; k < rp[i + 1]; ++k)
            s += values_[k] * x[ci[k]];
        y[i] = s;
    }
}

std::vector<double> SparseSymMatrix::multiply(std::span<const double> x) const
{
    std::vector<double> y(size());
    multiply(x, y);
    return y;
}

double SparseSymMatrix::quadratic_form(std::span<const double> x) const
{
    const auto n = size();
    if (x.size() != n)
        throw std::invalid_argument("quadratic_form: dimension mismatch");
    const auto& rp = pattern_->row_ptr;
    const auto& ci = pattern_->col;
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (auto k = rp[i]; k < rp[i + 1]; ++k)
            s += values_[k] * x[ci[k]];
        q += x[i] * s;
    }
    return q;
}

SparseSymMatrix& SparseSymMatrix::axpy(double alpha, const SparseSymMatrix& other)
{
    if (pattern_ != other.pattern_)
        throw std::invalid_argument("axpy: matrices must share a sparsity pattern");
    for (std::size_t k = 0; k < values_.size(); ++k)
        values_[k] += alpha * other.values_[k];
    return *this;
}

SparseSymMatrix& SparseSymMatrix::scale(double alpha)
{
    for (auto& v : values_)
        v *= alpha;
    return *this;
}

bool SparseSymMatrix::is_symmetric() const
{
    const auto n = size();
    const auto& rp = pattern_->row_ptr;
    const auto& ci = pattern_->col;
    for (std::size_t i = 0; i < n; ++i)
        for (auto k = rp[i]; k < rp[i + 1]; ++k) {
            const auto t = pattern_->find(ci[k], i);
            if (t == SparsityPattern::npos || values_[t] != values_[k])
                return false;
        }
    return true;
}

double SparseSymMatrix::max_abs() const
{
    double m = 0.0;
    for (double v : values_)
        m = std::max(m, std::abs(v));
    return m;
}

std::uint64_t SparseSymMatrix::fingerprint() const
{
    std::uint64_t h = 1469598103934665603ULL;
    const auto mix = [&h](const void* data, std::size_t bytes) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < bytes; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    };
    const auto n = size();
    mix(&n, sizeof n);
    if (pattern_) {
        mix(pattern_->row_ptr.data(), pattern_->row_ptr.size() * sizeof(std::size_t));
        mix(pattern_->col.data(), pattern_->col.size() * sizeof(std::size_t));
    }
    mix(values_.data(), values_.size() * sizeof(double));
    return h;
}

std::vector<double> SparseSymMatrix::to_dense() const
{
    const auto n = size();
    std::vector<double> d(n * n, 0.0);
    const auto& rp = pattern_->row_ptr;
    const auto& ci = pattern_->col;
    for (std::size_t i = 0; i < n; ++i)
        for (auto k = rp[i]; k < rp[i + 1]; ++k)
            d[i * n + ci[k]] = values_[k];
    return d;
}

} // namespace ensheat
