#include "doctest.h"

#include "csv_util.hpp"
#include "rcnlin/errors.hpp"
#include "rcnlin/experiments.hpp"

#include <cmath>
#include <sstream>

using namespace rcnlin;
using nlohmann::json;

namespace {

// Positive root of 125 g^2 + 22 g - 3 = 0, where the heavy atom changes side.
double threshold_oracle() {
    return (-22.0 + std::sqrt(22.0 * 22.0 + 4.0 * 125.0 * 3.0)) / 250.0;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (detail::next_csv_line(in, line))
        rows.push_back(detail::split_csv_line(line));
    return rows;
}

} // namespace

TEST_CASE("parameter grids") {
    const ParameterGrid lin{0.01, 0.3, 30, Spacing::Linear};
    const auto v = lin.values();
    REQUIRE(v.size() == 30);
    CHECK(v.front() == 0.01);
    CHECK(v.back() == 0.3);
    CHECK(v[10] == doctest::Approx(0.11).epsilon(1e-14));

    const ParameterGrid lg{1e-3, 1.0, 4, Spacing::Log};
    const auto w = lg.values();
    CHECK(w[1] == doctest::Approx(1e-2).epsilon(1e-13));
    CHECK(w[2] == doctest::Approx(1e-1).epsilon(1e-13));

    CHECK_THROWS_AS((ParameterGrid{0.0, 1.0, 1, Spacing::Linear}.values()), InvalidInput);
    CHECK_THROWS_AS((ParameterGrid{1.0, 0.5, 3, Spacing::Linear}.values()), InvalidInput);
    CHECK_THROWS_AS((ParameterGrid{0.0, 1.0, 3, Spacing::Log}.values()), InvalidInput);
}

TEST_CASE("heavy atom score and bisection") {
    CHECK(heavy_atom_score(0.05) < 0.0);
    CHECK(heavy_atom_score(0.2) > 0.0);
    CHECK(std::fabs(bisect_threshold(0.01, 0.3) - threshold_oracle()) <= 1e-10);
    CHECK_THROWS_AS(bisect_threshold(0.2, 0.3), InvalidInput);
}

TEST_CASE("gamma sweep reproduces the step in clean error") {
    const auto res = run_gamma_sweep(default_config("gamma-sweep"));
    REQUIRE(res.records.size() == 30);
    REQUIRE(res.threshold);
    CHECK(std::fabs(*res.threshold - threshold_oracle()) <= 1e-6);
    CHECK(*res.threshold > 0.0901);
    CHECK(res.step_pattern_holds);
    for (const auto& r : res.records) {
        INFO("gamma " << r.value);
        CHECK(r.clean_error == (r.value < *res.threshold ? 0.5 : 0.0));
        CHECK(r.robust);
        CHECK(r.drift <= 1e-12);
        CHECK((*r.diagnostic < 0.0) == (r.value < *res.threshold));
    }

    auto cfg = default_config("gamma-sweep");
    cfg.grid = {0.5, 1.2, 5, Spacing::Linear};
    CHECK_THROWS_AS(run_gamma_sweep(cfg), InvalidInput);
}

TEST_CASE("eta sweep on the counterexample") {
    auto cfg = default_config("eta-sweep");
    for (double gamma : {0.05, 0.2}) {
        cfg.gamma = gamma;
        const auto records = run_eta_sweep(cfg);
        REQUIRE(records.size() == 9);
        for (const auto& r : records) {
            CHECK(r.robust);
            CHECK(r.drift <= 1e-12);
            CHECK(r.clean_error == (gamma < 0.09 ? 0.5 : 0.0));
            CHECK(r.noisy_fit_error == r.clean_error);
        }
    }

    cfg.grid = {0.1, 0.6, 3, Spacing::Linear};
    CHECK_THROWS_AS(run_eta_sweep(cfg), InvalidInput);
}

TEST_CASE("eta sweep with a convex potential runs PGD") {
    auto cfg = default_config("eta-sweep");
    cfg.loss = "logistic";
    cfg.grid = {0.1, 0.4, 3, Spacing::Linear};
    cfg.pgd.max_iters = 2000;
    CHECK(resolve_minimizer(cfg) == MinimizerKind::Pgd);
    const auto records = run_eta_sweep(cfg);
    REQUIRE(records.size() == 3);
    for (const auto& r : records) {
        CHECK(norm2(r.minimizer) <= 1.0 + 1e-12);
        CHECK(std::isfinite(r.objective));
    }
}

TEST_CASE("dynamics runs") {
    auto cfg = default_config("dynamics");
    cfg.dynamics.iterations = 500;
    const auto gd = run_dynamics(cfg);
    CHECK_FALSE(gd.cd);
    CHECK(gd.trajectory.iterates.size() == 501);
    CHECK(gd.closed_form_residual <= 1e-12);

    cfg.dynamics.mode = "cd";
    cfg.sample.kind = "tie";
    cfg.dynamics.tie_rule = TieRule::ReportAll;
    cfg.dynamics.iterations = 5;
    const auto cd = run_dynamics(cfg);
    REQUIRE(cd.cd);
    CHECK(cd.support_in_argmax);
    CHECK(cd.cd->log.front().argmax_set == std::vector<std::size_t>{0, 1});
}

TEST_CASE("loss report verdicts") {
    const auto rows = run_loss_report();
    REQUIRE(rows.size() == 5);
    const bool expected[] = {true, true, true, false, false};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        INFO(rows[i].loss);
        CHECK(rows[i].satisfies_def1 == expected[i]);
        CHECK(rows[i].expected == expected[i]);
        CHECK(rows[i].failing_check.empty() == expected[i]);
    }
    CHECK(rows[3].failing_check == "c1");
    CHECK(*rows[3].witness_z == 1.0);
    CHECK(rows[4].failing_check == "limit_zero_proxy");
    CHECK(*rows[4].witness_z == 50.0);
    CHECK(*rows[4].witness_value == -49.0);

    std::ostringstream text;
    write_loss_report(text, rows);
    CHECK(text.str().find("AdaBoost") != std::string::npos);
    CHECK(loss_report_to_json(rows)[4]["satisfies"] == false);
}

TEST_CASE("config parsing") {
    const auto cfg = config_from_json(json::parse(R"({
        "experiment": "eta-sweep",
        "grid": {"start": 0.1, "stop": 0.4, "count": 4},
        "loss": "logistic",
        "minimizer": "pgd",
        "pgd": {"max_iters": 100, "tolerance": 1e-6},
        "distribution": {"source": "random", "dim": 3, "atoms": 4},
        "seed": 9
    })"));
    CHECK(cfg.experiment == "eta-sweep");
    CHECK(cfg.grid.count == 4);
    CHECK(cfg.loss == "logistic");
    CHECK(*cfg.minimizer == MinimizerKind::Pgd);
    CHECK(cfg.pgd.max_iters == 100);
    CHECK(cfg.distribution.kind == "random");
    CHECK(build_distribution(cfg).dimension() == 3);
    CHECK(cfg.seed == 9);

    for (const char* bad : {R"({"colour": 1})", R"({"grid": {"begin": 0}})", R"({"eta": "high"})",
                            R"({"minimizer": "newton"})", R"({"dynamics": {"mode": "sgd"}})",
                            R"({"distribution": {"source": "csv"}})", R"({"grid": {"spacing": "cubic"}})",
                            R"({"dynamics": {"tie_rule": "random"}})", R"([1, 2])"}) {
        INFO(bad);
        CHECK_THROWS_AS(config_from_json(json::parse(bad)), InvalidInput);
    }
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), InvalidInput);
}

TEST_CASE("random sources are deterministic for a fixed seed") {
    auto cfg = default_config("eta-sweep");
    cfg.distribution.kind = "random";
    cfg.distribution.dim = 4;
    cfg.distribution.atoms = 6;
    cfg.seed = 42;
    std::ostringstream a, b;
    write_sweep_csv(a, run_eta_sweep(cfg));
    write_sweep_csv(b, run_eta_sweep(cfg));
    CHECK(a.str() == b.str());

    cfg.seed = 43;
    std::ostringstream c;
    write_sweep_csv(c, run_eta_sweep(cfg));
    CHECK(a.str() != c.str());
}

TEST_CASE("sweep CSV rows can be recomputed from their columns") {
    const auto res = run_gamma_sweep(default_config("gamma-sweep"));
    std::ostringstream out;
    write_sweep_csv(out, res.records);
    const auto rows = parse_csv(out.str());
    REQUIRE(rows.size() == res.records.size() + 1);
    CHECK(rows[0][0] == "gamma");
    CHECK(rows[0][1] == "v_1");
    CHECK(rows[0][4] == "clean_error");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double gamma = detail::parse_double(rows[i][0]);
        const Vector v{detail::parse_double(rows[i][1]), detail::parse_double(rows[i][2])};
        const auto dist = make_counterexample(gamma);
        CHECK(misclassification_error(dist, v) == detail::parse_double(rows[i][4]));
        CHECK(expected_loss(dist, make_loss("unhinged"), v) ==
              doctest::Approx(detail::parse_double(rows[i][3])).epsilon(1e-14));
    }
    CHECK(sweep_to_json(res.records).size() == res.records.size());
}

TEST_CASE("step plot SVG is self-contained") {
    const auto res = run_gamma_sweep(default_config("gamma-sweep"));
    std::vector<double> xs, ys;
    for (const auto& r : res.records) {
        xs.push_back(r.value);
        ys.push_back(r.clean_error);
    }
    std::ostringstream out;
    write_step_plot_svg(out, xs, ys, "clean error", "gamma", "error", res.threshold);
    const std::string svg = out.str();
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("href") == std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);
    CHECK(svg.size() < 1000000);
}
