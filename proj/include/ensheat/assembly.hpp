#pragma once

#include "ensheat/conductivity.hpp"
#include "ensheat/mesh.hpp"
#include "ensheat/sparse.hpp"

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ensheat {

using SpaceTimeFn = std::function<double(double x, double y, double t)>;
using GradientFn = std::function<std::array<double, 2>(double x, double y, double t)>;

/// Coefficients of a P1 function, one per mesh vertex.
using NodalField = std::vector<double>;

enum class StiffnessMode {
    identity,       ///< c = 1
    kappa_of,       ///< c = kappa(T_h)
    kappa_prime_of, ///< c = kappa_max - kappa(T_h)
};

/// Counters accumulated while assembling coefficient-weighted matrices.
struct AssemblyStats {
    std::size_t kappa_evaluations = 0;
    std::size_t bound_violations = 0;
};

/// P1 Lagrange space on a fixed mesh: element geometry, basis gradients and
/// the CSR slots each element scatters into are computed once.
class P1Space {
public:
    explicit P1Space(std::shared_ptr<const Mesh> mesh);

    const Mesh& mesh() const noexcept { return *mesh_; }
    const std::shared_ptr<const Mesh>& mesh_ptr() const noexcept { return mesh_; }
    const std::shared_ptr<const SparsityPattern>& pattern() const noexcept { return pattern_; }
    std::size_t num_dofs() const noexcept { return mesh_->num_vertices(); }

    SparseSymMatrix assemble_mass() const;
    SparseSymMatrix assemble_stiffness(std::span<const double> coeff,
                                       const ConductivityModel* model, StiffnessMode mode,
                                       AssemblyStats* stats = nullptr) const;
    /// Writes into `out`, which must already use this space's pattern.
    void assemble_stiffness_into(SparseSymMatrix& out, std::span<const double> coeff,
                                 const ConductivityModel* model, StiffnessMode mode,
                                 AssemblyStats* stats = nullptr) const;
    SparseSymMatrix assemble_boundary_mass(std::span<const std::string> labels, double alpha) const;

    std::vector<double> assemble_load(const SpaceTimeFn& f, double t) const;
    std::vector<double> assemble_boundary_load(std::span<const std::string> labels,
                                               const SpaceTimeFn& g, double t) const;
    /// Accumulating variants used by the time stepper.
    void add_load(std::span<double> b, const SpaceTimeFn& f, double t) const;
    void add_boundary_load(std::span<double> b, std::span<const std::string> labels,
                           const SpaceTimeFn& g, double t) const;

    /// Indices of the boundary edges carrying one of `labels`; throws
    /// std::invalid_argument for an unknown label.
    std::vector<std::size_t> edges_with_labels(std::span<const std::string> labels) const;

private:
    struct Element {
        std::array<std::size_t, 3> v{};
        double area = 0.0;
        std::array<std::array<double, 2>, 3> grad{};
        std::array<std::size_t, 9> slots{}; // row-major local (a, b)
    };

    std::shared_ptr<const Mesh> mesh_;
    std::shared_ptr<const SparsityPattern> pattern_;
    std::vector<Element> elements_;
};

// Free-function forms on a bare mesh. Each builds a temporary P1Space.
SparseSymMatrix assemble_mass(const Mesh& mesh);
SparseSymMatrix assemble_stiffness(const Mesh& mesh, std::span<const double> coeff,
                                   const ConductivityModel* model, StiffnessMode mode,
                                   AssemblyStats* stats = nullptr);
SparseSymMatrix assemble_boundary_mass(const Mesh& mesh, std::span<const std::string> labels,
                                       double alpha);
std::vector<double> assemble_load(const Mesh& mesh, const SpaceTimeFn& f, double t);
std::vector<double> assemble_boundary_load(const Mesh& mesh, std::span<const std::string> labels,
                                           const SpaceTimeFn& g, double t);

struct DirichletValue {
    std::size_t node = 0;
    double value = 0.0;
};

/// Symmetric elimination of prescribed nodal values. Built once from the
/// unconstrained matrix; remembers the coupling columns so that right-hand
/// sides of later solves can be lifted without the original matrix.
class DirichletLift {
public:
    DirichletLift() = default;
    DirichletLift(const SparseSymMatrix& unconstrained, std::vector<std::size_t> nodes);

    const std::vector<std::size_t>& nodes() const noexcept { return nodes_; }
    bool empty() const noexcept { return nodes_.empty(); }
    bool is_constrained(std::size_t i) const { return !constrained_.empty() && constrained_[i]; }

    /// Zero rows/columns of constrained nodes, unit diagonal.
    void constrain(SparseSymMatrix& a) const;
    /// b_j -= A_ji g_i for free j, then b_i = g_i. `values` parallels nodes().
    void lift(std::span<double> b, std::span<const double> values) const;

private:
    std::vector<std::size_t> nodes_;
    std::vector<char> constrained_;
    // coupling_[k] = (free row j, A_{j, nodes_[k]})
    std::vector<std::vector<std::pair<std::size_t, double>>> coupling_;
};

/// One-shot symmetric elimination on (A, b). Duplicate nodes with equal values
/// are merged; conflicting duplicates throw std::invalid_argument.
void apply_dirichlet(SparseSymMatrix& a, std::vector<double>& b,
                     std::span<const DirichletValue> values);

NodalField interpolate(const Mesh& mesh, const SpaceTimeFn& u, double t);

struct ErrorNorms {
    double l2 = 0.0;
    double h1_semi = 0.0;
};

/// ||u_h - u|| and ||grad u_h - grad u|| with a degree-4 triangle rule.
ErrorNorms error_norms(const Mesh& mesh, std::span<const double> u_h, const SpaceTimeFn& u_exact,
                       const GradientFn& grad_exact, double t);

} // namespace ensheat
