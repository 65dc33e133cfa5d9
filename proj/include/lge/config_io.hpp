#pragma once

#include "lge/csv.hpp"
#include "lge/solver.hpp"

namespace lge {

// Flat key=value round trip for SolverConfig; unknown keys are rejected.
SolverConfig solver_config_from_kv(const csv::KeyValues& kv);
csv::KeyValues solver_config_to_kv(const SolverConfig& cfg);

}  // namespace lge
