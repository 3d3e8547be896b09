#pragma once

#include "rcnlin/distributions.hpp"
#include "rcnlin/loss_zoo.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace rcnlin {

/// A hypothesis v together with the Euclidean-ball radius it was fit under.
/// radius_bound is empty for unconstrained outputs.
struct WeightVector {
    Vector v;
    std::optional<double> radius_bound;
};

struct FitResult {
    WeightVector weights;
    double objective = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double gradient_norm_final = 0.0;
    /// Set by unhinged_minimizer when E[y x] vanishes: every ball point is
    /// then a minimizer and the zero vector is returned.
    bool degenerate_centroid = false;
    /// Objective after every iteration (PGD only, when requested).
    std::vector<double> objective_history;
};

struct PgdConfig {
    /// Defaults to 0.1 / (1 + sum of weight * |x|^2).
    std::optional<double> step;
    std::size_t max_iters = 50'000;
    double tolerance = 1e-9;
    bool record_history = false;
};

inline constexpr double kDegenerateCentroidNorm = 1e-14;

/// Minimizer of E[1 - y v.x] over |v|_2 <= r: v = r m / |m|_2 with
/// m = E[y x] and objective 1 - r |m|_2.
FitResult unhinged_minimizer(const DiscreteDistribution& dist, double r);

/// Projected gradient descent on P(v) = E[phi(y v.x)] over |v|_2 <= r,
/// started from v = 0. Returns the best iterate by objective.
/// Throws LossDomainError (with the atom) if the gradient becomes non-finite.
FitResult pgd_minimizer(const DiscreteDistribution& dist, const PotentialFunction& phi, double r,
                        const PgdConfig& cfg = {});

/// sum of weight * phi'(y v.x) * y * x
Vector potential_gradient(const DiscreteDistribution& dist, const PotentialFunction& phi,
                          std::span<const double> v);

/// Gradient with its outward radial part removed when v sits on the ball
/// boundary; zero exactly at constrained stationary points.
Vector projected_gradient(std::span<const double> v, std::span<const double> grad, double r);

/// Euclidean projection onto the ball of radius r.
Vector project_to_ball(Vector u, double r);

double default_pgd_step(const DiscreteDistribution& dist);

} // namespace rcnlin
