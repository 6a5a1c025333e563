#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hbl/common.hpp"
#include "hbl/dyadic.hpp"
#include "hbl/operators.hpp"
#include "hbl/space.hpp"

namespace hbl {

using Json = nlohmann::json;

// Space files: {"points": [...], "weights": [...], "edges": [[i, j], ...]} or
// {"points", "weights", "dist": [[...], ...]}, with an optional "interior"
// mask of 0/1 flags.
Json space_to_json(const FiniteSpace& space);
FiniteSpace space_from_json(const Json& j);

Json forest_to_json(const FiniteSpace& space, const DyadicForest& forest);
/// Structure as written; run verify_forest before trusting it.
DyadicForest forest_from_json(const FiniteSpace& space, const Json& j);

// Function files: {"values": {pointId: real}}; every point must be present.
Json function_to_json(const FiniteSpace& space, std::span<const double> f);
std::vector<double> function_from_json(const FiniteSpace& space, const Json& j);

Json kernel_to_json(const FiniteSpace& space, const KernelOperator& op);
KernelOperator kernel_from_json(const FiniteSpace& space, const Json& j);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Canonical text: sorted keys, two-space indent, trailing newline.
std::string canonical_dump(const Json& j);

/// {"value": "<12 significant digits>", "provenance": "exact" | "estimate"}
Json tagged(double value, Provenance provenance);
inline Json exact(double value) { return tagged(value, Provenance::Exact); }
inline Json estimate(double value) { return tagged(value, Provenance::Estimate); }

/// JSON pointers of floating-point leaves not wrapped by `tagged`. Integers
/// and booleans are counts and flags; the top-level "config" echo is skipped.
std::vector<std::string> untagged_values(const Json& j);

}  // namespace hbl
