#include "hbl/corpus.hpp"

#include <cmath>

namespace hbl {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

namespace {

int int_field(const Json& spec, const char* key) {
  if (!spec.contains(key) || !spec[key].is_number_integer())
    fail(ErrorCode::ParseError, std::string("space spec field '") + key + "' must be an integer");
  return spec[key].get<int>();
}

double real_field(const Json& spec, const char* key) {
  if (!spec.contains(key) || !spec[key].is_number())
    fail(ErrorCode::ParseError, std::string("space spec field '") + key + "' must be a number");
  return spec[key].get<double>();
}

}  // namespace

FiniteSpace space_from_spec(const Json& spec) {
  if (!spec.is_object()) fail(ErrorCode::ParseError, "space spec must be an object");
  if (spec.contains("file")) {
    if (!spec["file"].is_string()) fail(ErrorCode::ParseError, "space spec field 'file' must be a string");
    return space_from_json(read_json_file(spec["file"].get<std::string>()));
  }
  if (!spec.contains("generator") || !spec["generator"].is_string())
    fail(ErrorCode::ParseError, "space spec needs a 'generator' or a 'file'");
  const std::string g = spec["generator"].get<std::string>();
  if (g == "tree") return gen_tree(int_field(spec, "q"), int_field(spec, "depth"));
  if (g == "path") return gen_path(int_field(spec, "n"));
  if (g == "grid") return gen_grid(int_field(spec, "d"), int_field(spec, "n"));
  if (g == "hyperbolic")
    return gen_hyperbolic_disk(int_field(spec, "cells"), real_field(spec, "max_radius"),
                               static_cast<std::uint64_t>(int_field(spec, "seed")));
  fail(ErrorCode::ParseError, "unknown generator '" + g + "'");
}

std::vector<double> gaussian_function(const FiniteSpace& space, Rng& rng) {
  std::normal_distribution<double> nd;
  std::vector<double> f(space.size());
  for (double& v : f) v = nd(rng);
  return f;
}

std::vector<double> log_distance(const FiniteSpace& space, PointIndex origin) {
  std::vector<double> f(space.size());
  for (PointIndex x = 0; x < space.size(); ++x) f[x] = std::log1p(space.distance(origin, x));
  return f;
}

std::vector<double> local_mean_zero(const FiniteSpace& space, const Ball& ball, Rng& rng) {
  std::normal_distribution<double> nd;
  std::vector<double> g(space.size(), 0.0);
  if (ball.members.size() < 2) return g;
  CompensatedSum mean;
  for (PointIndex x : ball.members) {
    g[x] = nd(rng);
    mean += g[x] * space.weight(x);
  }
  const double m = mean.value() / ball.mass;
  for (PointIndex x : ball.members) g[x] -= m;
  return g;
}

std::vector<double> global_mean_zero(const FiniteSpace& space, Rng& rng) {
  require(space.size() >= 2, "a nonzero mean-zero function needs two points");
  std::vector<double> g;
  double mag = 0.0;
  while (mag == 0.0) {
    g = gaussian_function(space, rng);
    CompensatedSum mean;
    for (PointIndex x = 0; x < space.size(); ++x) mean += g[x] * space.weight(x);
    const double m = mean.value() / space.total_mass();
    for (double& v : g) {
      v -= m;
      mag = std::max(mag, std::fabs(v));
    }
  }
  return g;
}

}  // namespace hbl
