#include "rcnlin/analysis.hpp"

#include "rcnlin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace rcnlin {

namespace {

constexpr double kUnitTolerance = 1e-12;
constexpr double kMinWidth = 1e-14;

void check_dimension(const DiscreteDistribution& dist, std::span<const double> v) {
    if (v.size() != dist.dimension())
        throw InvalidInput("vector has dimension " + std::to_string(v.size()) +
                           ", distribution has dimension " + std::to_string(dist.dimension()));
}

FitResult fit(const DiscreteDistribution& dist, const PotentialFunction& phi, double r,
              MinimizerKind kind, const PgdConfig& pgd) {
    if (kind == MinimizerKind::ClosedForm)
        return unhinged_minimizer(dist, r);
    return pgd_minimizer(dist, phi, r, pgd);
}

double weighted_abs_projection(const DiscreteDistribution& dist, std::span<const double> a) {
    double s = 0.0;
    for (const auto& atom : dist.atoms())
        s += atom.weight * std::fabs(dot(a, atom.point.x));
    return s;
}

} // namespace

double expected_loss(const DiscreteDistribution& dist, const PotentialFunction& phi,
                     std::span<const double> v) {
    check_dimension(dist, v);
    double s = 0.0;
    const auto& atoms = dist.atoms();
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const double z = atoms[i].point.y * dot(v, atoms[i].point.x);
        double l = 0.0;
        try {
            l = phi(z);
        } catch (const LossDomainError& e) {
            throw LossDomainError(std::string(e.what()) + " at atom " + std::to_string(i), z, i);
        }
        if (!std::isfinite(l))
            throw LossDomainError("non-finite loss at atom " + std::to_string(i), z, i);
        s += atoms[i].weight * l;
    }
    return s;
}

double misclassification_error(const DiscreteDistribution& dist, std::span<const double> v) {
    check_dimension(dist, v);
    double err = 0.0;
    for (const auto& a : dist.atoms()) {
        if (a.point.y * dot(v, a.point.x) <= 0.0)
            err += a.weight;
    }
    return std::clamp(err, 0.0, 1.0);
}

RobustnessReport check_rcn_robustness(const DiscreteDistribution& dist, const PotentialFunction& phi,
                                      double r, double eta, MinimizerKind kind,
                                      const PgdConfig& pgd) {
    if (kind == MinimizerKind::ClosedForm && phi.name() != "unhinged")
        throw InvalidInput("the closed-form minimizer only applies to the unhinged loss, not '" +
                           phi.name() + "'");
    const DiscreteDistribution noisy = corrupt_rcn(dist, eta);
    const FitResult f = fit(dist, phi, r, kind, pgd);
    const FitResult g = fit(noisy, phi, r, kind, pgd);

    RobustnessReport rep;
    rep.eta = eta;
    rep.clean_fit_error = misclassification_error(dist, f.weights.v);
    rep.noisy_fit_error = misclassification_error(dist, g.weights.v);
    rep.robust = std::fabs(rep.clean_fit_error - rep.noisy_fit_error) <= kRobustTolerance;
    rep.minimizer_clean = f.weights;
    rep.minimizer_noisy = g.weights;
    rep.degenerate_clean = f.degenerate_centroid;
    rep.degenerate_noisy = g.degenerate_centroid;
    return rep;
}

double slope_identity_residual(const DiscreteDistribution& dist, double eta,
                               std::span<const double> w) {
    const auto unhinged = make_loss("unhinged");
    const DiscreteDistribution noisy = corrupt_rcn(dist, eta);
    const double clean_value = expected_loss(dist, unhinged, w);
    const double noisy_value = expected_loss(noisy, unhinged, w);
    return std::fabs(noisy_value - ((1.0 - 2.0 * eta) * clean_value + 2.0 * eta));
}

std::vector<double> default_probe_lambdas() {
    std::vector<double> l{0.0, 0.5};
    for (double x = 1.0; x <= 1024.0; x *= 2.0)
        l.push_back(x);
    return l;
}

RayProbe recession_probe(const DiscreteDistribution& dist, const PotentialFunction& phi, double eta,
                         std::span<const double> x0, std::span<const double> u,
                         std::span<const double> lambdas) {
    check_dimension(dist, x0);
    check_dimension(dist, u);
    const auto def1 = check_def1(phi);
    if (!def1.passed())
        throw InvalidInput("loss '" + phi.name() + "' does not satisfy the convex potential axioms");
    if (std::fabs(norm2(u) - 1.0) > kUnitTolerance)
        throw InvalidInput("ray direction must have unit Euclidean length");
    if (lambdas.empty())
        throw InvalidInput("lambda grid is empty");
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] >= 0.0) || (i > 0 && !(lambdas[i] > lambdas[i - 1])))
            throw InvalidInput("lambda grid must be nonnegative and strictly increasing");
    }

    RayProbe probe;
    probe.base_point.assign(x0.begin(), x0.end());
    probe.direction.assign(u.begin(), u.end());
    probe.lambdas.assign(lambdas.begin(), lambdas.end());
    probe.width = weighted_abs_projection(dist, u);
    if (probe.width <= kMinWidth)
        throw InvalidInput("E|u.x| = 0: u.x vanishes almost surely, so the objective is unchanged "
                           "by projecting v onto the subspace orthogonal to u; probe that subspace "
                           "instead");
    probe.base_width = weighted_abs_projection(dist, x0);

    const DiscreteDistribution noisy = corrupt_rcn(dist, eta);
    const double phi0 = phi(0.0);
    const double dphi0 = phi.deriv(0.0);
    probe.min_slack = std::numeric_limits<double>::infinity();
    Vector point(x0.size());
    for (double lambda : lambdas) {
        for (std::size_t j = 0; j < point.size(); ++j)
            point[j] = x0[j] + lambda * u[j];
        const double value = expected_loss(noisy, phi, point);
        const double bound = eta * (phi0 - dphi0 * lambda * probe.width + dphi0 * probe.base_width);
        probe.values.push_back(value);
        probe.lower_bounds.push_back(bound);
        probe.min_slack = std::fmin(probe.min_slack, value - bound);
    }
    probe.bound_holds = probe.min_slack >= -kProbeSlack;

    const auto& v = probe.values;
    const std::size_t n = v.size();
    probe.eventually_increasing = n >= 3 ? (v[n - 3] < v[n - 2] && v[n - 2] < v[n - 1])
                                         : (n == 2 && v[0] < v[1]);
    return probe;
}

} // namespace rcnlin
