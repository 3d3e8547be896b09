#include "rcnlin/loss_zoo.hpp"

#include "rcnlin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace rcnlin {

namespace {

constexpr double kFdStep = 1e-6;
constexpr double kC1RelTol = 1e-3;
constexpr double kConvexSlack = 1e-12;
constexpr double kLimitThreshold = 1e-6;
constexpr double kNonnegSlack = 1e-12;

double checked_exp_neg(double z) {
    if (z < kMinExpMargin)
        throw LossDomainError("exp(-z) overflows for margin " + std::to_string(z), z);
    return std::exp(-z);
}

double logistic_eval(double z) {
    // ln(1 + e^{-2z}) = max(0, -2z) + log1p(e^{-|2z|})
    const double t = -2.0 * z;
    return std::fmax(0.0, t) + std::log1p(std::exp(-std::fabs(t)));
}

double logistic_deriv(double z) {
    // -2 / (1 + e^{2z})
    const double t = 2.0 * z;
    if (t >= 0.0) {
        const double e = std::exp(-t);
        return -2.0 * e / (1.0 + e);
    }
    return -2.0 / (1.0 + std::exp(t));
}

void validate_grid(std::span<const double> grid) {
    if (grid.size() < 3)
        throw InvalidInput("check grid needs at least 3 points");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1]))
            throw InvalidInput("check grid must be strictly increasing");
    }
    if (grid.front() > -50.0 || grid.back() < 50.0)
        throw InvalidInput("check grid must span at least [-50, 50]");
    if (!std::binary_search(grid.begin(), grid.end(), 0.0))
        throw InvalidInput("check grid must contain 0");
}

CheckResult check_convex(const PotentialFunction& phi, std::span<const double> grid,
                         std::span<const double> values) {
    CheckResult r{"convex", true, std::nullopt, std::nullopt};
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = i + 1; j < grid.size(); ++j) {
            const double mid = 0.5 * (grid[i] + grid[j]);
            const double avg = 0.5 * (values[i] + values[j]);
            const double excess = phi(mid) - avg;
            if (excess > kConvexSlack * std::fmax(1.0, std::fabs(avg)) && excess > worst) {
                worst = excess;
                r.pass = false;
                r.witness_z = mid;
                r.witness_value = excess;
            }
        }
    }
    return r;
}

CheckResult check_nonincreasing(std::span<const double> grid, std::span<const double> values) {
    CheckResult r{"nonincreasing", true, std::nullopt, std::nullopt};
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double rise = values[i] - values[i - 1];
        if (rise > kConvexSlack * std::fmax(1.0, std::fabs(values[i - 1]))) {
            r.pass = false;
            r.witness_z = grid[i];
            r.witness_value = rise;
            break;
        }
    }
    return r;
}

CheckResult check_c1(const PotentialFunction& phi, std::span<const double> grid) {
    CheckResult r{"c1", true, std::nullopt, std::nullopt};
    for (double z : grid) {
        const double f = phi(z);
        const double left = (f - phi(z - kFdStep)) / kFdStep;
        const double right = (phi(z + kFdStep) - f) / kFdStep;
        const double scale = std::fmax(1.0, std::fmax(std::fabs(left), std::fabs(right)));
        if (std::fabs(right - left) > kC1RelTol * scale) {
            r.pass = false;
            r.witness_z = z;
            r.witness_value = right - left;
            break;
        }
    }
    return r;
}

CheckResult check_slope_at_zero(const PotentialFunction& phi) {
    const double d0 = phi.deriv(0.0);
    return CheckResult{"slope_at_zero_negative", d0 < 0.0, 0.0, d0};
}

CheckResult check_limit_proxy(std::span<const double> grid, std::span<const double> values) {
    CheckResult r{"limit_zero_proxy", true, grid.back(), values.back()};
    const auto min_it = std::min_element(values.begin(), values.end());
    if (*min_it < -kNonnegSlack) {
        const auto idx = static_cast<std::size_t>(min_it - values.begin());
        r.pass = false;
        r.witness_z = grid[idx];
        r.witness_value = *min_it;
    } else if (!(values.back() < kLimitThreshold)) {
        r.pass = false;
    }
    return r;
}

PredicateReport run_checks(const PotentialFunction& phi, std::span<const double> grid,
                           bool with_limit) {
    validate_grid(grid);
    std::vector<double> values(grid.size());
    std::transform(grid.begin(), grid.end(), values.begin(), [&](double z) { return phi(z); });

    PredicateReport rep;
    rep.loss = phi.name();
    rep.definition = with_limit ? "convex_potential" : "relaxed_convex_potential";
    rep.checks.push_back(check_convex(phi, grid, values));
    rep.checks.push_back(check_nonincreasing(grid, values));
    rep.checks.push_back(check_c1(phi, grid));
    rep.checks.push_back(check_slope_at_zero(phi));
    if (with_limit)
        rep.checks.push_back(check_limit_proxy(grid, values));
    return rep;
}

} // namespace

std::string_view to_string(AxiomClass c) {
    switch (c) {
    case AxiomClass::ConvexPotential:
        return "convex_potential";
    case AxiomClass::RelaxedOnly:
        return "relaxed_only";
    case AxiomClass::Neither:
        return "neither";
    }
    return "unknown";
}

PotentialFunction::PotentialFunction(std::string name, ScalarFn eval, ScalarFn deriv,
                                     AxiomClass axiom_class, std::vector<double> kinks)
    : name_(std::move(name)), eval_(std::move(eval)), deriv_(std::move(deriv)),
      axiom_class_(axiom_class), kinks_(std::move(kinks)) {
    if (!eval_ || !deriv_)
        throw InvalidInput("potential function '" + name_ + "' needs both eval and deriv");
}

const std::vector<std::string>& loss_names() {
    static const std::vector<std::string> names{"exponential", "mixed_linear_exponential",
                                                "logistic", "hinge", "unhinged"};
    return names;
}

PotentialFunction make_loss(std::string_view name) {
    if (name == "exponential") {
        return {"exponential", checked_exp_neg, [](double z) { return -checked_exp_neg(z); },
                AxiomClass::ConvexPotential};
    }
    if (name == "mixed_linear_exponential") {
        return {"mixed_linear_exponential",
                [](double z) { return z <= 0.0 ? 1.0 - z : std::exp(-z); },
                [](double z) { return z <= 0.0 ? -1.0 : -std::exp(-z); },
                AxiomClass::ConvexPotential};
    }
    if (name == "logistic") {
        return {"logistic", logistic_eval, logistic_deriv, AxiomClass::ConvexPotential};
    }
    if (name == "hinge") {
        // left derivative -1 at the kink
        return {"hinge", [](double z) { return std::fmax(0.0, 1.0 - z); },
                [](double z) { return z <= 1.0 ? -1.0 : 0.0; }, AxiomClass::Neither, {1.0}};
    }
    if (name == "unhinged") {
        return {"unhinged", [](double z) { return 1.0 - z; }, [](double) { return -1.0; },
                AxiomClass::RelaxedOnly};
    }
    std::string valid;
    for (const auto& n : loss_names())
        valid += (valid.empty() ? "" : ", ") + n;
    throw InvalidInput("unknown loss '" + std::string(name) + "'; valid names: " + valid);
}

bool PredicateReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult& PredicateReport::check(std::string_view name) const {
    for (const auto& c : checks) {
        if (c.name == name)
            return c;
    }
    throw InvalidInput("report has no check named '" + std::string(name) + "'");
}

std::vector<double> default_check_grid() {
    std::vector<double> g;
    for (int i = -200; i <= 200; ++i)
        g.push_back(0.25 * i);
    return g;
}

PredicateReport check_def1(const PotentialFunction& phi, std::span<const double> grid) {
    return run_checks(phi, grid, true);
}

PredicateReport check_def3(const PotentialFunction& phi, std::span<const double> grid) {
    return run_checks(phi, grid, false);
}

} // namespace rcnlin
