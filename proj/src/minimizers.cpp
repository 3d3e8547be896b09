#include "rcnlin/minimizers.hpp"

#include "rcnlin/analysis.hpp"
#include "rcnlin/errors.hpp"

#include <cmath>
#include <string>

namespace rcnlin {

namespace {

constexpr double kBoundaryRelTol = 1e-12;

void check_radius(double r) {
    if (!(r > 0.0) || !std::isfinite(r))
        throw InvalidInput("ball radius must be a positive finite number");
}

} // namespace

FitResult unhinged_minimizer(const DiscreteDistribution& dist, double r) {
    check_radius(r);
    const Vector m = mean_label_feature(dist);
    const double mn = norm2(m);

    FitResult fit;
    fit.weights.radius_bound = r;
    fit.converged = true;
    if (mn <= kDegenerateCentroidNorm) {
        fit.weights.v.assign(dist.dimension(), 0.0);
        fit.objective = 1.0;
        fit.degenerate_centroid = true;
        fit.gradient_norm_final = mn;
        return fit;
    }
    fit.weights.v = scaled(m, r / mn);
    fit.objective = 1.0 - r * mn;
    fit.gradient_norm_final = norm2(projected_gradient(fit.weights.v, scaled(m, -1.0), r));
    return fit;
}

Vector potential_gradient(const DiscreteDistribution& dist, const PotentialFunction& phi,
                          std::span<const double> v) {
    Vector g(dist.dimension(), 0.0);
    const auto& atoms = dist.atoms();
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const auto& a = atoms[i];
        const double z = a.point.y * dot(v, a.point.x);
        double d = 0.0;
        try {
            d = phi.deriv(z);
        } catch (const LossDomainError& e) {
            throw LossDomainError(std::string(e.what()) + " at atom " + std::to_string(i), z, i);
        }
        if (!std::isfinite(d))
            throw LossDomainError("non-finite loss derivative at atom " + std::to_string(i) +
                                      ", margin " + std::to_string(z),
                                  z, i);
        const double c = a.weight * d * a.point.y;
        for (std::size_t j = 0; j < g.size(); ++j)
            g[j] += c * a.point.x[j];
    }
    return g;
}

Vector projected_gradient(std::span<const double> v, std::span<const double> grad, double r) {
    Vector pg(grad.begin(), grad.end());
    const double vn = norm2(v);
    if (vn >= r * (1.0 - kBoundaryRelTol) && vn > 0.0) {
        const double radial = dot(grad, v);
        if (radial < 0.0) {
            const double c = radial / (vn * vn);
            for (std::size_t j = 0; j < pg.size(); ++j)
                pg[j] -= c * v[j];
        }
    }
    return pg;
}

Vector project_to_ball(Vector u, double r) {
    const double n = norm2(u);
    if (n > r) {
        const double c = r / n;
        for (double& x : u)
            x *= c;
    }
    return u;
}

double default_pgd_step(const DiscreteDistribution& dist) {
    double s = 0.0;
    for (const auto& a : dist.atoms()) {
        const double n = norm2(a.point.x);
        s += a.weight * n * n;
    }
    return 0.1 / (1.0 + s);
}

FitResult pgd_minimizer(const DiscreteDistribution& dist, const PotentialFunction& phi, double r,
                        const PgdConfig& cfg) {
    check_radius(r);
    if (cfg.max_iters < 1)
        throw InvalidInput("max_iters must be at least 1");
    const double step = cfg.step.value_or(default_pgd_step(dist));
    if (!(step >= 0.0) || !std::isfinite(step))
        throw InvalidInput("step size must be a nonnegative finite number");

    Vector v(dist.dimension(), 0.0);
    Vector best = v;
    double best_obj = expected_loss(dist, phi, v);

    FitResult fit;
    fit.weights.radius_bound = r;
    for (std::size_t it = 0; it < cfg.max_iters; ++it) {
        const Vector grad = potential_gradient(dist, phi, v);
        if (norm2(projected_gradient(v, grad, r)) <= cfg.tolerance)
            break;
        for (std::size_t j = 0; j < v.size(); ++j)
            v[j] -= step * grad[j];
        v = project_to_ball(std::move(v), r);
        ++fit.iterations;

        const double obj = expected_loss(dist, phi, v);
        if (cfg.record_history)
            fit.objective_history.push_back(obj);
        if (obj <= best_obj) {
            best_obj = obj;
            best = v;
        }
    }

    fit.gradient_norm_final = norm2(projected_gradient(best, potential_gradient(dist, phi, best), r));
    fit.converged = fit.gradient_norm_final <= cfg.tolerance;
    fit.objective = best_obj;
    fit.weights.v = std::move(best);
    return fit;
}

} // namespace rcnlin
