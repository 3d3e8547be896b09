#pragma once

#include "rcnlin/distributions.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace rcnlin {

/// Iterates v_0..v_T of a descent run on the unhinged loss over a uniform
/// sample. loss_values[t] is the sample mean of 1 - y v_t.x;
/// angles_to_target[t] is the angle between v_t and g = sum_i y_i x_i, empty
/// when v_t or g is the zero vector.
struct Trajectory {
    std::vector<Vector> iterates;
    double step_size = 0.0;
    std::vector<double> loss_values;
    std::vector<std::optional<double>> angles_to_target;
    Vector target;
    bool stationary = false;
};

/// sum_i y_i x_i; the negated gradient of the summed unhinged loss.
Vector label_feature_sum(std::span<const LabeledPoint> sample);

/// v_0 + step * t * g
Vector gd_closed_form(std::span<const double> v0, double step, std::size_t t,
                      std::span<const double> g);

/// Gradient descent v_{t+1} = v_t + step * g for T steps. Each coordinate is
/// accumulated with compensated summation so the iterate tracks the closed
/// form to a few ulps. g = 0 yields a constant trajectory flagged stationary.
Trajectory gd_unhinged(std::span<const LabeledPoint> sample, std::span<const double> v0,
                       double step, std::size_t iterations);

enum class TieRule { LowestIndex, ReportAll };

struct CoordinateStep {
    std::optional<std::size_t> coordinate; // updated coordinate, empty when stationary
    int direction = 0;                     // sign of the update
    std::vector<std::size_t> argmax_set;   // argmax_j |g_j|
    std::vector<std::size_t> signed_argmax_set; // argmax_j g_j
};

struct CoordinateDescentRun {
    Trajectory trajectory;
    std::vector<CoordinateStep> log; // log[t - 1] produced iterate t
    TieRule tie_rule = TieRule::LowestIndex;
};

/// Coordinate descent from the zero vector: every round moves the lowest-index
/// coordinate of argmax_j |g_j| by `unit` in the direction of sign(g_j).
/// ReportAll performs the same update but its log lists the full tie set.
CoordinateDescentRun cd_unhinged(std::span<const LabeledPoint> sample, std::size_t iterations,
                                 TieRule tie_rule = TieRule::LowestIndex, double unit = 1.0);

/// Indices of nonzero coordinates.
std::vector<std::size_t> support(std::span<const double> v);

/// CSV: t,v_1..v_d,loss,angle_rad,chosen_coord. Undefined angles are written
/// as "undefined". chosen_coord is empty for gradient descent runs and for
/// t = 0; in ReportAll mode it lists the tie set joined by ';'.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const CoordinateDescentRun* cd = nullptr);

} // namespace rcnlin
