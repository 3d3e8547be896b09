#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rcnlin {

enum class AxiomClass { ConvexPotential, RelaxedOnly, Neither };

std::string_view to_string(AxiomClass c);

/// A scalar margin loss phi(z) together with its derivative.
///
/// Immutable after construction. `kinks` lists the points where phi is not
/// differentiable; `deriv` returns a fixed subgradient there.
class PotentialFunction {
public:
    using ScalarFn = std::function<double(double)>;

    PotentialFunction(std::string name, ScalarFn eval, ScalarFn deriv, AxiomClass axiom_class,
                      std::vector<double> kinks = {});

    const std::string& name() const { return name_; }
    AxiomClass axiom_class() const { return axiom_class_; }
    const std::vector<double>& kinks() const { return kinks_; }

    double eval(double z) const { return eval_(z); }
    double deriv(double z) const { return deriv_(z); }
    double operator()(double z) const { return eval_(z); }

private:
    std::string name_;
    ScalarFn eval_;
    ScalarFn deriv_;
    AxiomClass axiom_class_;
    std::vector<double> kinks_;
};

/// Names accepted by make_loss, in Table order.
const std::vector<std::string>& loss_names();

/// exponential, mixed_linear_exponential, logistic, hinge or unhinged.
/// Throws InvalidInput listing the valid names otherwise.
PotentialFunction make_loss(std::string_view name);

/// Margins below this make exp(-z) overflow; such evaluations throw
/// LossDomainError instead of returning inf.
inline constexpr double kMinExpMargin = -700.0;

struct CheckResult {
    std::string name;
    bool pass = false;
    std::optional<double> witness_z;
    std::optional<double> witness_value;
};

struct PredicateReport {
    std::string loss;
    std::string definition; // "convex_potential" or "relaxed_convex_potential"
    std::vector<CheckResult> checks;

    bool passed() const;
    const CheckResult& check(std::string_view name) const;
};

/// Evenly spaced grid on [-50, 50] with step 0.25; contains 0 and 1.
std::vector<double> default_check_grid();

// Checks performed, by name:
//   convex                  midpoint test on every grid pair
//   nonincreasing           consecutive grid values
//   c1                      one-sided finite differences agree at every grid point
//   slope_at_zero_negative  phi'(0) < 0
//   limit_zero_proxy        phi(z_max) < 1e-6 and phi >= -1e-12 on the grid (def1 only)
//
// The limit clause cannot be decided from finitely many evaluations; the
// proxy classifies every shipped loss correctly.
PredicateReport check_def1(const PotentialFunction& phi, std::span<const double> grid);
PredicateReport check_def3(const PotentialFunction& phi, std::span<const double> grid);

inline PredicateReport check_def1(const PotentialFunction& phi) {
    const auto g = default_check_grid();
    return check_def1(phi, g);
}
inline PredicateReport check_def3(const PotentialFunction& phi) {
    const auto g = default_check_grid();
    return check_def3(phi, g);
}

} // namespace rcnlin
