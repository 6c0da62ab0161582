#include "ensheat/scenario.hpp"

#include "ensheat/errors.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace ensheat {

void Scenario::validate() const
{
    if (!mesh)
        throw ValidationError("scenario has no mesh");
    if (members == 0)
        throw ValidationError("ensemble needs at least one member");
    if (conductivity.empty())
        throw ValidationError("scenario has no conductivity model");
    if (conductivity.size() != 1 && conductivity.size() != members)
        throw ValidationError("conductivity must list one model or one per member");
    for (const auto& c : conductivity)
        if (c.kappa_max() != conductivity.front().kappa_max())
            throw ValidationError("all members must declare the same kappa_max");
    if (!initial)
        throw ValidationError("scenario has no initial condition");
    if (!(dt > 0.0) || !(t_star > 0.0))
        throw ValidationError("dt and t_star must be positive");

    std::set<std::string> seen;
    for (const auto& e : boundary) {
        if (!seen.insert(e.label).second)
            throw ValidationError("boundary label '" + e.label + "' listed twice");
        if (!mesh->has_label(e.label))
            throw ValidationError("boundary label '" + e.label + "' does not exist on the mesh");
        if (e.condition.kind == BcKind::robin &&
            !(e.condition.alpha >= 0.0 && e.condition.alpha <= 1.0))
            throw ValidationError("robin alpha on '" + e.label + "' must lie in [0, 1]");
    }
    for (const auto& label : mesh->labels())
        if (!seen.contains(label))
            throw ValidationError("mesh boundary label '" + label + "' has no condition");
    (void)scheme();
}

SchemeKind Scenario::scheme() const
{
    bool any_robin = false;
    bool any_other = false;
    for (const auto& e : boundary)
        (e.condition.kind == BcKind::robin ? any_robin : any_other) = true;
    if (any_robin && any_other)
        throw ValidationError("robin conditions cannot be mixed with dirichlet/neumann labels");
    return any_robin ? SchemeKind::robin : SchemeKind::mixed;
}

std::size_t Scenario::num_steps() const
{
    if (!(dt > 0.0) || !(t_star > 0.0))
        throw std::invalid_argument("dt and t_star must be positive");
    const double ratio = t_star / dt;
    const double n = std::round(ratio);
    if (n < 1.0 || std::abs(ratio - n) > 1e-9 * std::max(1.0, n))
        throw std::invalid_argument("dt must divide t_star");
    return static_cast<std::size_t>(n);
}

const ConductivityModel& Scenario::conductivity_of(std::size_t member) const
{
    return conductivity.size() == 1 ? conductivity.front() : conductivity.at(member);
}

double Scenario::kappa_max() const { return conductivity.front().kappa_max(); }

} // namespace ensheat
