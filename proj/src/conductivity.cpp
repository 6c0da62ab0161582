#include "ensheat/conductivity.hpp"

#include "ensheat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ensheat {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

} // namespace

ConductivityModel::ConductivityModel(KappaLaw law, double kappa_min, double kappa_max,
                                     double c_kappa)
    : law_(std::move(law)), kappa_min_(kappa_min), kappa_max_(kappa_max), c_kappa_(c_kappa)
{
    if (!(kappa_min > 0.0) || !(kappa_min <= kappa_max) || !std::isfinite(kappa_max))
        throw ValidationError("conductivity bounds must satisfy 0 < kappa_min <= kappa_max < inf");
    if (c_kappa < 0.0)
        throw ValidationError("conductivity Lipschitz constant must be nonnegative");
    if (const auto* tab = std::get_if<kappa::Tabulated>(&law_)) {
        if (tab->points.empty())
            throw ValidationError("tabulated conductivity needs at least one point");
        for (std::size_t i = 0; i < tab->points.size(); ++i) {
            const auto [T, k] = tab->points[i];
            if (i > 0 && !(T > tab->points[i - 1].first))
                throw ValidationError("tabulated conductivity: T values must be strictly increasing");
            if (k < kappa_min || k > kappa_max)
                throw ValidationError("tabulated conductivity: value outside [kappa_min, kappa_max]");
        }
    }
}

double ConductivityModel::raw(double T) const
{
    return std::visit(
        overloaded{
            [T](const kappa::Exponential& e) { return std::exp(e.c * T); },
            [T](const kappa::HeavisideQuadratic& h) {
                const double d = T - h.t_c;
                return (T < h.t_c ? h.a * d * d : 0.0) + h.base;
            },
            [T](const kappa::Linear& l) { return l.slope * T; },
            [](const kappa::Constant& c) { return c.value; },
            [T](const kappa::Tabulated& tab) {
                const auto& p = tab.points;
                if (T <= p.front().first)
                    return p.front().second;
                if (T >= p.back().first)
                    return p.back().second;
                auto hi = std::upper_bound(p.begin(), p.end(), T,
                                           [](double v, const auto& pt) { return v < pt.first; });
                auto lo = hi - 1;
                const double s = (T - lo->first) / (hi->first - lo->first);
                return lo->second + s * (hi->second - lo->second);
            },
        },
        law_);
}

KappaSample ConductivityModel::sample(double T) const
{
    const double k = raw(T);
    if (k < kappa_min_)
        return {kappa_min_, true};
    if (k > kappa_max_)
        return {kappa_max_, true};
    if (std::isnan(k))
        return {kappa_max_, true};
    return {k, false};
}

std::string ConductivityModel::kind_name() const
{
    return std::visit(overloaded{
                          [](const kappa::Exponential&) { return std::string("exponential"); },
                          [](const kappa::HeavisideQuadratic&) {
                              return std::string("heaviside_quadratic");
                          },
                          [](const kappa::Linear&) { return std::string("linear"); },
                          [](const kappa::Constant&) { return std::string("constant"); },
                          [](const kappa::Tabulated&) { return std::string("tabulated"); },
                      },
                      law_);
}

ConductivityModel ConductivityModel::with_kappa_max(double kappa_max) const
{
    return ConductivityModel(law_, kappa_min_, kappa_max, c_kappa_);
}

double kappa_eval(const ConductivityModel& model, double T) { return model.eval(T); }

double kappa_prime_field(const ConductivityModel& model, double T) { return model.fluctuation(T); }

} // namespace ensheat
