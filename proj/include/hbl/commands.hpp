#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "hbl/dyadic.hpp"
#include "hbl/hardy_bmo.hpp"
#include "hbl/io.hpp"
#include "hbl/operators.hpp"
#include "hbl/space.hpp"

// Single-operation reports behind the ad-hoc CLI subcommands. Every constant
// in the returned JSON is provenance-tagged.
namespace hbl {

struct CommandOutput {
  Json json;
  std::string csv;  // empty when the command has no tabular part
};

Json forest_report(const FiniteSpace& space, const DyadicForest& forest);

struct MaximalRequest {
  std::optional<int> k_floor;  // unset: base resolution
  double eta_prime = 0.5;
  std::optional<double> eps;
  double b0 = 0.0;
  std::uint64_t seed = 1;  // isoperimetric sampling
};

/// M_k f, weak-type constant and the good-lambda table (one CSV row per alpha).
CommandOutput maximal_report(const FiniteSpace& space, const DyadicForest& forest, std::span<const double> f,
                             const MaximalRequest& request);

Json h1_norm_report(const FiniteSpace& space, std::span<const double> g, double b, bool with_terms);
Json bmo_norm_report(const FiniteSpace& space, std::span<const double> f, double q, double b);

/// {"center": id, "radius": r, "values": {id: real}}; values off the ball
/// may be omitted.
Atom atom_from_json(const FiniteSpace& space, const Json& j);
Json atom_to_json(const FiniteSpace& space, const Atom& atom);

Json split_atom_report(const FiniteSpace& space, const Atom& atom, const SplitOptions& options);

/// With b0 unset the smallest admissible scale for (r0, beta) is used.
CommandOutput jn_report(const FiniteSpace& space, const DyadicForest& forest, std::span<const double> f,
                        std::optional<double> b0, double q, double r0, double beta);

Json pairing_report(const FiniteSpace& space, std::span<const double> f, std::span<const double> g, double b);

/// {"kind": "heat", "t"} | {"kind": "resolvent", "s"} |
/// {"kind": "band", "cutoff", "width"} | {"kind": "polynomial", "coeffs": [...]}
Multiplier multiplier_from_json(const Json& j);

/// Hormander constants, L2 norm and sampled endpoint estimates of a kernel.
Json operator_report(const FiniteSpace& space, const KernelOperator& op, double b, std::size_t samples,
                     std::uint64_t seed);

}  // namespace hbl
