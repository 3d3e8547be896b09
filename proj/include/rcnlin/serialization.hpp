#pragma once

#include "rcnlin/analysis.hpp"
#include "rcnlin/loss_zoo.hpp"
#include "rcnlin/minimizers.hpp"

#include "json.hpp"

namespace rcnlin {

// {loss, definition, passed, checks: [{name, pass, witness_z, witness_value}]}
nlohmann::json to_json(const PredicateReport& rep);

// {v, r, objective, iterations, converged, gradient_norm_final, degenerate_centroid}
nlohmann::json to_json(const FitResult& fit);

nlohmann::json to_json(const RobustnessReport& rep);

nlohmann::json to_json(const RayProbe& probe);

} // namespace rcnlin
