#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ensheat {

namespace kappa {

/// exp(c T)
struct Exponential {
    double c = 0.0;
};

/// a (T - T_c)^2 H(T_c - T) + base
struct HeavisideQuadratic {
    double a = 0.0;
    double t_c = 0.0;
    double base = 0.0;
};

/// slope * T
struct Linear {
    double slope = 0.0;
};

struct Constant {
    double value = 0.0;
};

/// Piecewise-linear through sorted (T, kappa) samples; flat outside the table.
struct Tabulated {
    std::vector<std::pair<double, double>> points;
};

} // namespace kappa

using KappaLaw = std::variant<kappa::Exponential, kappa::HeavisideQuadratic, kappa::Linear,
                              kappa::Constant, kappa::Tabulated>;

struct KappaSample {
    double value = 0.0;
    bool clamped = false;
};

/// Temperature-dependent conductivity with declared admissible range
/// [kappa_min, kappa_max]. Raw values outside that range are clamped; the
/// caller can see whether a clamp happened through `sample`.
class ConductivityModel {
public:
    ConductivityModel(KappaLaw law, double kappa_min, double kappa_max, double c_kappa = 0.0);

    static ConductivityModel constant(double value)
    {
        return ConductivityModel(kappa::Constant{value}, value, value);
    }

    /// Closed-form value before clamping.
    double raw(double T) const;
    KappaSample sample(double T) const;
    double eval(double T) const { return sample(T).value; }
    /// kappa_max - kappa(T), nonnegative by construction.
    double fluctuation(double T) const { return kappa_max_ - eval(T); }

    double kappa_min() const noexcept { return kappa_min_; }
    double kappa_max() const noexcept { return kappa_max_; }
    /// Lipschitz constant; carried for reporting only.
    double c_kappa() const noexcept { return c_kappa_; }
    const KappaLaw& law() const noexcept { return law_; }
    std::string kind_name() const;

    /// Same law with a different declared upper bound.
    ConductivityModel with_kappa_max(double kappa_max) const;

private:
    KappaLaw law_;
    double kappa_min_;
    double kappa_max_;
    double c_kappa_;
};

double kappa_eval(const ConductivityModel& model, double T);
double kappa_prime_field(const ConductivityModel& model, double T);

} // namespace ensheat
