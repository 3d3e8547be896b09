#pragma once

#include "rcnlin/distributions.hpp"
#include "rcnlin/loss_zoo.hpp"
#include "rcnlin/minimizers.hpp"

#include <span>
#include <vector>

namespace rcnlin {

/// P_phi(v) = sum of weight * phi(y v.x). Loss overflow is rethrown as
/// LossDomainError naming the atom.
double expected_loss(const DiscreteDistribution& dist, const PotentialFunction& phi,
                     std::span<const double> v);

/// Mass of atoms with y (v.x) <= 0. A point on the decision boundary counts
/// as an error for either label, so v = 0 scores 1.
double misclassification_error(const DiscreteDistribution& dist, std::span<const double> v);

enum class MinimizerKind { ClosedForm, Pgd };

inline constexpr double kRobustTolerance = 1e-12;

/// Both errors are measured on the clean distribution.
struct RobustnessReport {
    double eta = 0.0;
    double clean_fit_error = 0.0;
    double noisy_fit_error = 0.0;
    bool robust = false;
    WeightVector minimizer_clean;
    WeightVector minimizer_noisy;
    bool degenerate_clean = false;
    bool degenerate_noisy = false;
};

/// Fits f on dist and g on corrupt_rcn(dist, eta) over the radius-r ball and
/// compares their clean misclassification errors. ClosedForm is only valid
/// for the unhinged loss. This checks one witness pair of minimizers, not
/// every minimizer.
RobustnessReport check_rcn_robustness(const DiscreteDistribution& dist, const PotentialFunction& phi,
                                      double r, double eta, MinimizerKind kind,
                                      const PgdConfig& pgd = {});

/// |P_noisy(w) - ((1 - 2 eta) P_clean(w) + 2 eta)| for the unhinged loss.
double slope_identity_residual(const DiscreteDistribution& dist, double eta,
                               std::span<const double> w);

inline constexpr double kProbeSlack = 1e-9;

/// Noisy objective along the ray x0 + lambda u against the lower bound
///   eta (phi(0) - phi'(0) lambda E|u.x| + phi'(0) E|x0.x|)
/// with both expectations over the clean distribution.
struct RayProbe {
    Vector base_point;
    Vector direction;
    std::vector<double> lambdas;
    std::vector<double> values;
    std::vector<double> lower_bounds;
    double width = 0.0;          // E|u.x|
    double base_width = 0.0;     // E|x0.x|
    double min_slack = 0.0;      // min of values - lower_bounds
    bool bound_holds = false;    // min_slack >= -1e-9
    bool eventually_increasing = false; // strictly increasing over the last three lambdas
};

/// {0, 0.5, 1, 2, 4, ..., 1024}
std::vector<double> default_probe_lambdas();

/// Requires phi to pass check_def1, 0 < eta < 1/2, |u|_2 = 1 within 1e-12,
/// E|u.x| > 0 and a strictly increasing nonnegative lambda grid.
RayProbe recession_probe(const DiscreteDistribution& dist, const PotentialFunction& phi, double eta,
                         std::span<const double> x0, std::span<const double> u,
                         std::span<const double> lambdas);

} // namespace rcnlin
