#include "rcnlin/dynamics.hpp"

#include "csv_util.hpp"
#include "rcnlin/errors.hpp"

#include <cmath>
#include <ostream>

namespace rcnlin {

namespace {

std::size_t check_sample(std::span<const LabeledPoint> sample) {
    if (sample.empty())
        throw InvalidInput("sample is empty");
    const std::size_t d = sample.front().x.size();
    if (d == 0)
        throw InvalidInput("feature dimension must be at least 1");
    for (const auto& p : sample) {
        if (p.x.size() != d)
            throw InvalidInput("sample points have mismatched dimensions");
        if (p.y != 1 && p.y != -1)
            throw InvalidInput("labels must be -1 or +1");
    }
    return d;
}

double mean_unhinged_loss(std::span<const LabeledPoint> sample, std::span<const double> v) {
    double s = 0.0;
    for (const auto& p : sample)
        s += 1.0 - p.y * dot(v, p.x);
    return s / static_cast<double>(sample.size());
}

std::optional<double> angle_or_undefined(std::span<const double> v, std::span<const double> g) {
    if (norm_inf(v) == 0.0 || norm_inf(g) == 0.0)
        return std::nullopt;
    return angle_between(v, g);
}

void record(Trajectory& traj, std::span<const LabeledPoint> sample, Vector v) {
    traj.loss_values.push_back(mean_unhinged_loss(sample, v));
    traj.angles_to_target.push_back(angle_or_undefined(v, traj.target));
    traj.iterates.push_back(std::move(v));
}

// Neumaier summation, one accumulator per coordinate.
struct CompensatedVector {
    Vector sum;
    Vector carry;

    explicit CompensatedVector(std::span<const double> start)
        : sum(start.begin(), start.end()), carry(start.size(), 0.0) {}

    void add(std::span<const double> inc) {
        for (std::size_t j = 0; j < sum.size(); ++j) {
            const double t = sum[j] + inc[j];
            if (std::fabs(sum[j]) >= std::fabs(inc[j]))
                carry[j] += (sum[j] - t) + inc[j];
            else
                carry[j] += (inc[j] - t) + sum[j];
            sum[j] = t;
        }
    }

    Vector value() const {
        Vector out(sum.size());
        for (std::size_t j = 0; j < sum.size(); ++j)
            out[j] = sum[j] + carry[j];
        return out;
    }
};

} // namespace

Vector label_feature_sum(std::span<const LabeledPoint> sample) {
    const std::size_t d = check_sample(sample);
    Vector g(d, 0.0);
    for (const auto& p : sample) {
        for (std::size_t j = 0; j < d; ++j)
            g[j] += p.y * p.x[j];
    }
    return g;
}

Vector gd_closed_form(std::span<const double> v0, double step, std::size_t t,
                      std::span<const double> g) {
    const double scale = step * static_cast<double>(t);
    Vector out(v0.begin(), v0.end());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] += scale * g[j];
    return out;
}

Trajectory gd_unhinged(std::span<const LabeledPoint> sample, std::span<const double> v0,
                       double step, std::size_t iterations) {
    const std::size_t d = check_sample(sample);
    if (v0.size() != d)
        throw InvalidInput("initial point dimension does not match the sample");
    if (!(step > 0.0) || !std::isfinite(step))
        throw InvalidInput("step size must be positive");
    if (iterations < 1)
        throw InvalidInput("iteration count must be at least 1");

    Trajectory traj;
    traj.step_size = step;
    traj.target = label_feature_sum(sample);
    traj.stationary = norm_inf(traj.target) == 0.0;
    traj.iterates.reserve(iterations + 1);
    traj.loss_values.reserve(iterations + 1);
    traj.angles_to_target.reserve(iterations + 1);

    const Vector inc = scaled(traj.target, step);
    CompensatedVector acc(v0);
    record(traj, sample, acc.value());
    for (std::size_t t = 1; t <= iterations; ++t) {
        acc.add(inc);
        record(traj, sample, acc.value());
    }
    return traj;
}

CoordinateDescentRun cd_unhinged(std::span<const LabeledPoint> sample, std::size_t iterations,
                                 TieRule tie_rule, double unit) {
    const std::size_t d = check_sample(sample);
    if (iterations < 1)
        throw InvalidInput("iteration count must be at least 1");
    if (!(unit > 0.0) || !std::isfinite(unit))
        throw InvalidInput("coordinate step must be positive");

    CoordinateDescentRun run;
    run.tie_rule = tie_rule;
    auto& traj = run.trajectory;
    traj.step_size = unit;
    traj.target = label_feature_sum(sample);
    const Vector& g = traj.target;

    // The gradient is -g at every iterate, so the selection never changes.
    CoordinateStep choice;
    double best_abs = 0.0;
    double best_signed = g[0];
    for (std::size_t j = 0; j < d; ++j) {
        best_abs = std::fmax(best_abs, std::fabs(g[j]));
        best_signed = std::fmax(best_signed, g[j]);
    }
    traj.stationary = best_abs == 0.0;
    if (!traj.stationary) {
        for (std::size_t j = 0; j < d; ++j) {
            if (std::fabs(g[j]) == best_abs)
                choice.argmax_set.push_back(j);
            if (g[j] == best_signed)
                choice.signed_argmax_set.push_back(j);
        }
        choice.coordinate = choice.argmax_set.front();
        choice.direction = g[*choice.coordinate] > 0.0 ? 1 : -1;
    }

    Vector v(d, 0.0);
    record(traj, sample, v);
    for (std::size_t t = 1; t <= iterations; ++t) {
        if (choice.coordinate)
            v[*choice.coordinate] += choice.direction * unit;
        record(traj, sample, v);
        run.log.push_back(choice);
    }
    return run;
}

std::vector<std::size_t> support(std::span<const double> v) {
    std::vector<std::size_t> s;
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[j] != 0.0)
            s.push_back(j);
    }
    return s;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const CoordinateDescentRun* cd) {
    const std::size_t d = traj.target.size();
    out << 't';
    for (std::size_t j = 0; j < d; ++j)
        out << ",v_" << (j + 1);
    out << ",loss,angle_rad,chosen_coord\n";
    for (std::size_t t = 0; t < traj.iterates.size(); ++t) {
        out << t;
        for (double x : traj.iterates[t])
            out << ',' << detail::format_double(x);
        out << ',' << detail::format_double(traj.loss_values[t]) << ',';
        if (traj.angles_to_target[t])
            out << detail::format_double(*traj.angles_to_target[t]);
        else
            out << "undefined";
        out << ',';
        if (cd && t > 0) {
            const auto& step = cd->log[t - 1];
            if (cd->tie_rule == TieRule::ReportAll) {
                for (std::size_t k = 0; k < step.argmax_set.size(); ++k)
                    out << (k ? ";" : "") << step.argmax_set[k];
            } else if (step.coordinate) {
                out << *step.coordinate;
            }
        }
        out << '\n';
    }
}

} // namespace rcnlin
