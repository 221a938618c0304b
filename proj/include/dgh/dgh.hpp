#pragma once

/// Umbrella header: maps T(x) = (g·x + h(g·x))/d^k over arbitrary-precision
/// integers, the congruence solver characterizing path classes as arithmetic
/// progressions, brute-force reference implementations, and the statistical
/// machinery for drift, diffusion, and normality of log-increments.

#include "dgh/error.hpp"     // error codes and internal invariant checks
#include "dgh/integer.hpp"   // arbitrary-precision integers, rationals, big_ln
#include "dgh/map.hpp"       // map parameters, iteration, paths, stopping times
#include "dgh/oracle.hpp"    // scanning reference implementations
#include "dgh/rng.hpp"       // splittable deterministic RNG
#include "dgh/stats.hpp"     // exact and Monte Carlo distributional statistics
#include "dgh/structure.hpp" // path-class solver: triples, members, images

// dgh/solution_json.hpp (JSON serialization) is not pulled in here so the
// core library stays free of the JSON dependency; include it directly.
