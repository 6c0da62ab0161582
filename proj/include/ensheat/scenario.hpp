#pragma once

#include "ensheat/conductivity.hpp"
#include "ensheat/mesh.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace ensheat {

/// Data that may differ per ensemble member: f(j, x, y, t).
using MemberFn = std::function<double(std::size_t member, double x, double y, double t)>;

enum class BcKind { dirichlet, neumann, robin };

/// Boundary condition on one label.
///   dirichlet: T = data
///   neumann:   kappa grad T . n = data
///   robin:     alpha T + kappa grad T . n = data
struct BoundaryCondition {
    BcKind kind = BcKind::neumann;
    MemberFn data; ///< empty means identically zero
    double alpha = 0.0;

    static BoundaryCondition dirichlet(MemberFn g) { return {BcKind::dirichlet, std::move(g), 0.0}; }
    static BoundaryCondition neumann(MemberFn q) { return {BcKind::neumann, std::move(q), 0.0}; }
    static BoundaryCondition robin(double alpha, MemberFn beta)
    {
        return {BcKind::robin, std::move(beta), alpha};
    }
};

struct BoundaryEntry {
    std::string label;
    BoundaryCondition condition;
};

/// Ordered label -> condition map. Where two Dirichlet labels meet at a
/// vertex, the entry listed first supplies the value.
using BoundaryPartition = std::vector<BoundaryEntry>;

enum class SchemeKind {
    mixed, ///< Dirichlet and/or Neumann labels
    robin, ///< Robin on every label
};

/// Everything needed to run one ensemble experiment.
struct Scenario {
    std::shared_ptr<const Mesh> mesh;
    BoundaryPartition boundary;
    /// One model per member, or a single model shared by all members. All
    /// models must declare the same kappa_max.
    std::vector<ConductivityModel> conductivity;
    MemberFn source;  ///< empty means f = 0
    MemberFn initial; ///< T_j(x, y, 0); interpolated at vertices
    std::size_t members = 1;
    double dt = 0.0;
    double t_star = 0.0;
    /// Store full fields every k steps (and at the final step); 0 disables.
    std::size_t snapshot_every = 0;

    /// Throws ValidationError describing the first violated invariant.
    void validate() const;
    SchemeKind scheme() const;
    /// t_star / dt; throws std::invalid_argument unless it is a positive integer.
    std::size_t num_steps() const;
    const ConductivityModel& conductivity_of(std::size_t member) const;
    double kappa_max() const;
    /// t^n = n dt, computed as a product.
    double time_at(std::size_t n) const { return static_cast<double>(n) * dt; }
};

} // namespace ensheat
