#include "doctest.h"

#include "rcnlin/dynamics.hpp"
#include "rcnlin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace rcnlin;

namespace {

std::vector<LabeledPoint> counterexample_sample(double gamma) {
    const auto dist = make_counterexample(gamma);
    std::vector<LabeledPoint> s;
    for (const auto& a : dist.atoms())
        s.push_back(a.point);
    return s;
}

// Largest |g_j| computed straight from the sample.
std::vector<std::size_t> argmax_abs(const std::vector<LabeledPoint>& sample) {
    const std::size_t d = sample.front().x.size();
    std::vector<double> g(d, 0.0);
    for (const auto& p : sample)
        for (std::size_t j = 0; j < d; ++j)
            g[j] += p.y * p.x[j];
    double best = 0.0;
    for (double v : g)
        best = std::fmax(best, std::fabs(v));
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < d; ++j)
        if (std::fabs(g[j]) == best && best > 0.0)
            out.push_back(j);
    return out;
}

} // namespace

TEST_CASE("gd from the origin stays on the ray through g") {
    const auto sample = counterexample_sample(0.05);
    const Vector v0{0.0, 0.0};
    const auto traj = gd_unhinged(sample, v0, 0.01, 500);
    REQUIRE(traj.iterates.size() == 501);
    CHECK_FALSE(traj.angles_to_target[0].has_value());
    for (std::size_t t = 1; t < traj.iterates.size(); ++t) {
        REQUIRE(traj.angles_to_target[t].has_value());
        CHECK(*traj.angles_to_target[t] <= 1e-12);
        CHECK(dot(traj.iterates[t], traj.target) > 0.0);
    }
}

TEST_CASE("gd angle with an orthogonal start follows arctan(1/t)") {
    // g = (1, 0) with step 1; v0 = (0, 1)
    const std::vector<LabeledPoint> sample{{{1.0, 0.0}, 1}};
    const Vector v0{0.0, 1.0};
    const auto traj = gd_unhinged(sample, v0, 1.0, 1000);
    CHECK(*traj.angles_to_target[100] == doctest::Approx(0.009999666686665238).epsilon(1e-12));
    for (std::size_t t : {1u, 7u, 250u, 1000u})
        CHECK(*traj.angles_to_target[t] == doctest::Approx(std::atan(1.0 / t)).epsilon(1e-12));
}

TEST_CASE("gd iterates match the closed form") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<LabeledPoint> sample;
        const std::size_t d = 1 + trial % 4;
        for (int i = 0; i < 5; ++i) {
            LabeledPoint p{Vector(d), normal(rng) > 0 ? 1 : -1};
            for (double& x : p.x)
                x = normal(rng);
            sample.push_back(p);
        }
        Vector v0(d);
        for (double& x : v0)
            x = normal(rng);
        const double step = 1e-3 * (1 + trial % 3);
        const auto traj = gd_unhinged(sample, v0, step, 20000);
        double worst = 0.0;
        for (std::size_t t = 0; t < traj.iterates.size(); ++t) {
            const auto cf = gd_closed_form(v0, step, t, traj.target);
            for (std::size_t j = 0; j < d; ++j)
                worst = std::fmax(worst, std::fabs(cf[j] - traj.iterates[t][j]));
        }
        CHECK(worst <= 1e-12);

        for (std::size_t t = 1; t < traj.loss_values.size(); ++t)
            CHECK(traj.loss_values[t] < traj.loss_values[t - 1]);
    }
}

TEST_CASE("gd angles decrease strictly when v0 is off the ray") {
    const auto sample = counterexample_sample(0.05);
    const Vector v0{-1.0, 2.0};
    const auto traj = gd_unhinged(sample, v0, 0.05, 5000);
    for (std::size_t t = 2; t < traj.angles_to_target.size(); ++t)
        CHECK(*traj.angles_to_target[t] < *traj.angles_to_target[t - 1]);
    for (const auto& a : traj.angles_to_target)
        CHECK((*a >= 0.0 && *a <= std::numbers::pi));
}

TEST_CASE("gd with cancelling labels is stationary") {
    const std::vector<LabeledPoint> sample{{{1.0, 0.0}, 1}, {{1.0, 0.0}, -1}};
    const Vector v0{0.5, 0.5};
    const auto traj = gd_unhinged(sample, v0, 0.1, 10);
    CHECK(traj.stationary);
    for (const auto& v : traj.iterates)
        CHECK(v == v0);
    for (const auto& a : traj.angles_to_target)
        CHECK_FALSE(a.has_value());
}

TEST_CASE("gd rejects bad arguments") {
    const std::vector<LabeledPoint> sample{{{1.0}, 1}};
    const std::vector<LabeledPoint> empty;
    const Vector v0{0.0};
    const Vector wrong{0.0, 0.0};
    CHECK_THROWS_AS(gd_unhinged(empty, v0, 1.0, 5), InvalidInput);
    CHECK_THROWS_AS(gd_unhinged(sample, v0, 0.0, 5), InvalidInput);
    CHECK_THROWS_AS(gd_unhinged(sample, v0, 1.0, 0), InvalidInput);
    CHECK_THROWS_AS(gd_unhinged(sample, wrong, 1.0, 5), InvalidInput);
}

TEST_CASE("cd keeps choosing the dominant coordinate") {
    const std::vector<LabeledPoint> sample{{{2.0, 1.0}, 1}, {{-1.0, 0.0}, -1}};
    const auto run = cd_unhinged(sample, 50);
    CHECK(run.trajectory.target == Vector{3.0, 1.0});
    for (const auto& step : run.log) {
        CHECK(*step.coordinate == 0);
        CHECK(step.direction == 1);
    }
    for (std::size_t t = 1; t < run.trajectory.iterates.size(); ++t)
        CHECK(support(run.trajectory.iterates[t]) == std::vector<std::size_t>{0});
    CHECK(run.trajectory.iterates.back()[0] == 50.0);
}

TEST_CASE("cd tie rules") {
    const std::vector<LabeledPoint> sample{{{2.0, 0.0}, 1}, {{0.0, 2.0}, 1}};
    const auto lowest = cd_unhinged(sample, 5, TieRule::LowestIndex);
    for (const auto& step : lowest.log)
        CHECK(*step.coordinate == 0);
    const auto all = cd_unhinged(sample, 5, TieRule::ReportAll);
    for (const auto& step : all.log)
        CHECK(step.argmax_set == std::vector<std::size_t>{0, 1});

    std::ostringstream csv;
    write_trajectory_csv(csv, all.trajectory, &all);
    CHECK(csv.str().find(",0;1\n") != std::string::npos);
}

TEST_CASE("cd descends along a negative component") {
    const std::vector<LabeledPoint> sample{{{0.0, 5.0}, -1}};
    const auto run = cd_unhinged(sample, 3);
    CHECK(*run.log[0].coordinate == 1);
    CHECK(run.log[0].direction == -1);
    CHECK(run.trajectory.iterates.back() == Vector{0.0, -3.0});
    // argmax_j g_j without absolute values picks coordinate 0 here
    CHECK(run.log[0].signed_argmax_set == std::vector<std::size_t>{0});
    for (std::size_t t = 1; t < run.trajectory.loss_values.size(); ++t)
        CHECK(run.trajectory.loss_values[t] < run.trajectory.loss_values[t - 1]);
}

TEST_CASE("cd with zero gradient is stationary") {
    const std::vector<LabeledPoint> sample{{{1.0, 0.0}, 1}, {{1.0, 0.0}, -1}};
    const auto run = cd_unhinged(sample, 4);
    CHECK(run.trajectory.stationary);
    for (const auto& step : run.log) {
        CHECK_FALSE(step.coordinate.has_value());
        CHECK(step.argmax_set.empty());
    }
    for (const auto& v : run.trajectory.iterates)
        CHECK(support(v).empty());
}

TEST_CASE("cd support lies in the argmax set on random samples") {
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<int> small(-3, 3);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 1 + trial % 5;
        std::vector<LabeledPoint> sample;
        for (int i = 0; i < 1 + trial % 6; ++i) {
            LabeledPoint p{Vector(d), small(rng) >= 0 ? 1 : -1};
            for (double& x : p.x)
                x = small(rng);
            // duplicate a column every few trials to force ties
            if (trial % 3 == 0 && d > 1)
                p.x[d - 1] = p.x[0];
            sample.push_back(p);
        }
        const auto expect = argmax_abs(sample);
        for (TieRule rule : {TieRule::LowestIndex, TieRule::ReportAll}) {
            const auto run = cd_unhinged(sample, 20, rule);
            for (const auto& v : run.trajectory.iterates) {
                for (std::size_t j : support(v))
                    CHECK(std::find(expect.begin(), expect.end(), j) != expect.end());
            }
            if (!expect.empty())
                CHECK(run.log.front().argmax_set == expect);
        }
    }
}

TEST_CASE("trajectory CSV layout") {
    const std::vector<LabeledPoint> sample{{{1.0, 0.0}, 1}};
    const Vector v0{0.0, 0.0};
    const auto traj = gd_unhinged(sample, v0, 0.5, 2);
    std::ostringstream out;
    write_trajectory_csv(out, traj);
    CHECK(out.str() == "t,v_1,v_2,loss,angle_rad,chosen_coord\n"
                       "0,0,0,1,undefined,\n"
                       "1,0.5,0,0.5,0,\n"
                       "2,1,0,0,0,\n");
}
