#pragma once

#include "ensheat/sparse.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ensheat {

/// Anything that solves A X = B for a fixed SPD matrix A and a block of
/// right-hand sides. Implementations are immutable and thread-safe to call.
class BlockSolver {
public:
    virtual ~BlockSolver() = default;

    virtual std::size_t size() const = 0;
    /// Fingerprint of the matrix this solver was built for.
    virtual std::uint64_t matrix_fingerprint() const = 0;
    virtual std::vector<double> solve(std::span<const double> b) const = 0;

    /// Solves every column; `threads` > 1 spreads columns over worker threads.
    std::vector<std::vector<double>> solve_block(std::span<const std::vector<double>> rhs,
                                                 unsigned threads = 1) const;
};

/// Sparse Cholesky factor P A P^T = L L^T with a reverse Cuthill-McKee
/// ordering and an up-looking numeric factorization.
class SpdFactor final : public BlockSolver {
public:
    /// Throws FactorizationError (with the pivot index in A's numbering) if A
    /// is not numerically SPD.
    explicit SpdFactor(const SparseSymMatrix& a);

    std::size_t size() const override { return n_; }
    std::uint64_t matrix_fingerprint() const override { return fingerprint_; }
    std::vector<double> solve(std::span<const double> b) const override;

    /// perm()[k] is the original index placed at position k.
    const std::vector<std::size_t>& perm() const noexcept { return perm_; }
    std::size_t factor_nnz() const noexcept { return l_val_.size(); }

    /// Dense L L^T mapped back to the original ordering (testing aid, O(n^2) memory).
    std::vector<double> reconstruct_dense() const;

private:
    std::size_t n_ = 0;
    std::uint64_t fingerprint_ = 0;
    std::vector<std::size_t> perm_;
    std::vector<std::size_t> inv_perm_;
    // L in compressed-column form, diagonal first in each column.
    std::vector<std::size_t> l_ptr_;
    std::vector<std::size_t> l_row_;
    std::vector<double> l_val_;
};

SpdFactor factorize(const SparseSymMatrix& a);
std::vector<std::vector<double>> solve_block(const BlockSolver& solver,
                                             std::span<const std::vector<double>> rhs,
                                             unsigned threads = 1);

/// Number of SpdFactor constructions since start (or the last reset).
std::size_t factorization_count();
void reset_factorization_count();

/// Reverse Cuthill-McKee permutation of a structurally symmetric pattern.
std::vector<std::size_t> reverse_cuthill_mckee(const SparsityPattern& pattern);

struct PcgResult {
    std::vector<double> x;
    std::size_t iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Jacobi-preconditioned conjugate gradients from a zero initial guess.
/// Throws SolverError for a nonpositive diagonal or a breakdown.
PcgResult pcg_solve(const SparseSymMatrix& a, std::span<const double> b, double tol = 1e-10,
                    std::size_t max_iter = 10000);

/// BlockSolver backed by PCG; holds its own copy of the matrix.
class PcgSolver final : public BlockSolver {
public:
    explicit PcgSolver(SparseSymMatrix a, double tol = 1e-10, std::size_t max_iter = 10000);

    std::size_t size() const override { return a_.size(); }
    std::uint64_t matrix_fingerprint() const override { return fingerprint_; }
    /// Throws SolverError if PCG does not reach the tolerance.
    std::vector<double> solve(std::span<const double> b) const override;

private:
    SparseSymMatrix a_;
    std::uint64_t fingerprint_;
    double tol_;
    std::size_t max_iter_;
};

/// ||A x - b||_2
double residual_norm(const SparseSymMatrix& a, std::span<const double> x,
                     std::span<const double> b);

} // namespace ensheat
