#include "rcnlin/serialization.hpp"

namespace rcnlin {

namespace {

nlohmann::json optional_number(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json radius(const WeightVector& w) {
    return optional_number(w.radius_bound);
}

} // namespace

nlohmann::json to_json(const PredicateReport& rep) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : rep.checks) {
        checks.push_back({{"name", c.name},
                          {"pass", c.pass},
                          {"witness_z", optional_number(c.witness_z)},
                          {"witness_value", optional_number(c.witness_value)}});
    }
    return {{"loss", rep.loss}, {"definition", rep.definition}, {"passed", rep.passed()},
            {"checks", checks}};
}

nlohmann::json to_json(const FitResult& fit) {
    return {{"v", fit.weights.v},
            {"r", radius(fit.weights)},
            {"objective", fit.objective},
            {"iterations", fit.iterations},
            {"converged", fit.converged},
            {"gradient_norm_final", fit.gradient_norm_final},
            {"degenerate_centroid", fit.degenerate_centroid}};
}

nlohmann::json to_json(const RobustnessReport& rep) {
    return {{"eta", rep.eta},
            {"clean_fit_error", rep.clean_fit_error},
            {"noisy_fit_error", rep.noisy_fit_error},
            {"robust", rep.robust},
            {"minimizer_clean", {{"v", rep.minimizer_clean.v}, {"r", radius(rep.minimizer_clean)}}},
            {"minimizer_noisy", {{"v", rep.minimizer_noisy.v}, {"r", radius(rep.minimizer_noisy)}}},
            {"degenerate_clean", rep.degenerate_clean},
            {"degenerate_noisy", rep.degenerate_noisy}};
}

nlohmann::json to_json(const RayProbe& probe) {
    return {{"base_point", probe.base_point},
            {"direction", probe.direction},
            {"lambdas", probe.lambdas},
            {"values", probe.values},
            {"lower_bounds", probe.lower_bounds},
            {"width", probe.width},
            {"base_width", probe.base_width},
            {"min_slack", probe.min_slack},
            {"bound_holds", probe.bound_holds},
            {"eventually_increasing", probe.eventually_increasing}};
}

} // namespace rcnlin
