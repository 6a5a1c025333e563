#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hbl/io.hpp"
#include "hbl/space.hpp"

namespace hbl {

using Rng = std::mt19937_64;

/// Independent stream for a named consumer of a run seed.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

/// {"generator": "tree", "q", "depth"} | {"generator": "path", "n"} |
/// {"generator": "grid", "d", "n"} |
/// {"generator": "hyperbolic", "cells", "max_radius", "seed"} | {"file": path}
FiniteSpace space_from_spec(const Json& spec);

std::vector<double> gaussian_function(const FiniteSpace& space, Rng& rng);

/// log(1 + d(origin, x)).
std::vector<double> log_distance(const FiniteSpace& space, PointIndex origin);

/// Random values on the members of `ball`, minus their weighted mean.
std::vector<double> local_mean_zero(const FiniteSpace& space, const Ball& ball, Rng& rng);

/// Random function with weighted mean zero over the whole space; never zero.
std::vector<double> global_mean_zero(const FiniteSpace& space, Rng& rng);

}  // namespace hbl
