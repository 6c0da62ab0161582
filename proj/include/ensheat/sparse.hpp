#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace ensheat {

class Mesh;

/// Compressed-row sparsity structure with sorted column indices per row.
/// Shared (read-only) by every matrix assembled on the same mesh.
struct SparsityPattern {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> col;

    std::size_t nnz() const noexcept { return col.size(); }
    /// Storage slot of (i, j); throws std::out_of_range if (i, j) is not in the pattern.
    std::size_t slot(std::size_t i, std::size_t j) const;
    /// Storage slot of (i, j) or npos.
    std::size_t find(std::size_t i, std::size_t j) const noexcept;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    /// Vertex adjacency of the P1 space on `mesh`, diagonal included.
    static std::shared_ptr<const SparsityPattern> from_mesh(const Mesh& mesh);
    /// Pattern from a list of (row, col) pairs; duplicates are merged.
    static std::shared_ptr<const SparsityPattern>
    from_entries(std::size_t n, std::span<const std::pair<std::size_t, std::size_t>> entries);
};

/// Square CSR matrix with a structurally symmetric pattern. Assembly routines
/// write (i,j) and (j,i) from the same computed value so symmetric matrices
/// are symmetric bit-for-bit.
class SparseSymMatrix {
public:
    SparseSymMatrix() = default;
    explicit SparseSymMatrix(std::shared_ptr<const SparsityPattern> pattern);

    static SparseSymMatrix identity(std::size_t n);
    /// Dense row-major input; zeros are not stored.
    static SparseSymMatrix from_dense(std::size_t n, std::span<const double> dense);

    std::size_t size() const noexcept { return pattern_ ? pattern_->n : 0; }
    std::size_t nnz() const noexcept { return values_.size(); }
    const SparsityPattern& pattern() const { return *pattern_; }
    const std::shared_ptr<const SparsityPattern>& pattern_ptr() const noexcept { return pattern_; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    double operator()(std::size_t i, std::size_t j) const;
    /// Adds `v` to (i, j); the entry must be in the pattern.
    void add(std::size_t i, std::size_t j, double v) { values_[pattern_->slot(i, j)] += v; }
    /// Adds `v` to (i, j) and, when i != j, to (j, i).
    void add_sym(std::size_t i, std::size_t j, double v);

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> multiply(std::span<const double> x) const;
    /// x^T A x
    double quadratic_form(std::span<const double> x) const;

    /// this += alpha * other (patterns must be the same object).
    SparseSymMatrix& axpy(double alpha, const SparseSymMatrix& other);
    SparseSymMatrix& scale(double alpha);

    bool is_symmetric() const;
    double max_abs() const;
    /// FNV-1a over dimension, pattern and value bytes.
    std::uint64_t fingerprint() const;

    std::vector<double> to_dense() const;

private:
    std::shared_ptr<const SparsityPattern> pattern_;
    std::vector<double> values_;
};

} // namespace ensheat
