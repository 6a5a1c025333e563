#include "hbl/io.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace hbl {

namespace {

[[noreturn]] void parse_fail(const std::string& pointer, const std::string& what) {
  fail(ErrorCode::ParseError, (pointer.empty() ? "/" : pointer) + ": " + what);
}

const Json& member(const Json& j, const std::string& pointer, const char* key) {
  if (!j.is_object()) parse_fail(pointer, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) parse_fail(pointer + "/" + key, "missing");
  return *it;
}

const Json& array_at(const Json& j, const std::string& pointer) {
  if (!j.is_array()) parse_fail(pointer, "expected an array");
  return j;
}

double number_at(const Json& j, const std::string& pointer) {
  if (!j.is_number()) parse_fail(pointer, "expected a number");
  return j.get<double>();
}

std::size_t index_at(const Json& j, const std::string& pointer, std::size_t n) {
  if (!j.is_number_integer() || j.get<long long>() < 0) parse_fail(pointer, "expected a nonnegative integer");
  const auto v = j.get<unsigned long long>();
  if (v >= n) parse_fail(pointer, "point index out of range");
  return static_cast<std::size_t>(v);
}

void collect_untagged(const Json& j, const std::string& pointer, std::vector<std::string>& out) {
  if (j.is_object()) {
    if (j.size() == 2 && j.contains("value") && j.contains("provenance") && j["value"].is_string()) return;
    for (const auto& [k, v] : j.items()) {
      if (pointer.empty() && k == "config") continue;
      collect_untagged(v, pointer + "/" + k, out);
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) collect_untagged(j[i], pointer + "/" + std::to_string(i), out);
  } else if (j.is_number_float()) {
    out.push_back(pointer);
  }
}

}  // namespace

Json space_to_json(const FiniteSpace& space) {
  Json j;
  j["points"] = std::vector<std::string>(space.ids().begin(), space.ids().end());
  j["weights"] = std::vector<double>(space.weights().begin(), space.weights().end());
  if (space.has_adjacency()) {
    Json edges = Json::array();
    for (const Edge& e : space.edges()) edges.push_back({e.a, e.b});
    j["edges"] = std::move(edges);
  } else {
    Json rows = Json::array();
    for (PointIndex x = 0; x < space.size(); ++x) {
      std::vector<double> row(space.size());
      for (PointIndex y = 0; y < space.size(); ++y) row[y] = space.distance(x, y);
      rows.push_back(std::move(row));
    }
    j["dist"] = std::move(rows);
  }
  if (space.has_truncation_boundary()) {
    std::vector<int> mask;
    for (char c : space.interior_mask()) mask.push_back(c ? 1 : 0);
    j["interior"] = std::move(mask);
  }
  return j;
}

FiniteSpace space_from_json(const Json& j) {
  const Json& pts = array_at(member(j, "", "points"), "/points");
  const Json& ws = array_at(member(j, "", "weights"), "/weights");
  const std::size_t n = pts.size();
  if (n == 0) parse_fail("/points", "no points");
  if (ws.size() != n) parse_fail("/weights", "length differs from /points");
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) {
    if (!pts[i].is_string()) parse_fail("/points/" + std::to_string(i), "expected a string id");
    ids.push_back(pts[i].get<std::string>());
  }
  std::vector<double> weights;
  for (std::size_t i = 0; i < n; ++i) weights.push_back(number_at(ws[i], "/weights/" + std::to_string(i)));
  std::vector<char> interior;
  if (j.contains("interior")) {
    const Json& m = array_at(j["interior"], "/interior");
    if (m.size() != n) parse_fail("/interior", "length differs from /points");
    for (std::size_t i = 0; i < n; ++i) interior.push_back(index_at(m[i], "/interior/" + std::to_string(i), 2) ? 1 : 0);
  }
  const bool has_edges = j.contains("edges"), has_dist = j.contains("dist");
  if (has_edges == has_dist) parse_fail("", "exactly one of \"edges\" and \"dist\" is required");

  if (has_edges) {
    const Json& es = array_at(j["edges"], "/edges");
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < es.size(); ++i) {
      const std::string p = "/edges/" + std::to_string(i);
      if (!es[i].is_array() || es[i].size() != 2) parse_fail(p, "expected a pair of point indices");
      edges.push_back({index_at(es[i][0], p + "/0", n), index_at(es[i][1], p + "/1", n)});
    }
    return FiniteSpace::from_edges(std::move(ids), std::move(weights), std::move(edges), std::move(interior));
  }
  const Json& rows = array_at(j["dist"], "/dist");
  if (rows.size() != n) parse_fail("/dist", "expected one row per point");
  std::vector<double> dist;
  dist.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string p = "/dist/" + std::to_string(i);
    const Json& row = array_at(rows[i], p);
    if (row.size() != n) parse_fail(p, "expected one entry per point");
    for (std::size_t k = 0; k < n; ++k) dist.push_back(number_at(row[k], p + "/" + std::to_string(k)));
  }
  FiniteSpace space(std::move(ids), std::move(weights), std::move(dist), {}, std::move(interior));
  const auto violations = space.metric_violations(1e-12, 1);
  if (!violations.empty()) fail(ErrorCode::DataError, violations.front());
  return space;
}

Json forest_to_json(const FiniteSpace& space, const DyadicForest& forest) {
  Json j;
  j["delta"] = exact(forest.delta);
  j["k_min"] = forest.k_min;
  j["k_max"] = forest.k_max;
  j["a0"] = exact(forest.realized_a0);
  j["c1"] = exact(forest.realized_c1);
  Json levels = Json::array();
  for (int k = forest.k_min; k <= forest.k_max; ++k) {
    Json cubes = Json::array();
    for (const Cube& q : forest.level(k)) {
      Json c;
      c["center"] = space.id(q.center);
      std::vector<std::string> ids;
      for (PointIndex x : q.members) ids.push_back(space.id(x));
      c["memberIds"] = std::move(ids);
      if (k == forest.k_min)
        c["parent"] = nullptr;
      else
        c["parent"] = q.parent;
      cubes.push_back(std::move(c));
    }
    levels.push_back({{"k", k}, {"scale", exact(forest.scale(k))}, {"cubes", std::move(cubes)}});
  }
  j["levels"] = std::move(levels);
  return j;
}

DyadicForest forest_from_json(const FiniteSpace& space, const Json& j) {
  auto tagged_number = [&](const char* key) {
    const Json& v = member(j, "", key);
    const std::string p = std::string("/") + key;
    if (v.is_number()) return v.get<double>();
    const Json& text = member(v, p, "value");
    if (!text.is_string()) parse_fail(p + "/value", "expected a decimal string");
    try {
      return std::stod(text.get<std::string>());
    } catch (const std::logic_error&) {
      parse_fail(p + "/value", "not a number");
    }
  };
  DyadicForest f;
  f.delta = tagged_number("delta");
  if (!(f.delta > 0.0 && f.delta < 1.0)) parse_fail("/delta", "expected a value in (0, 1)");
  f.realized_a0 = tagged_number("a0");
  f.realized_c1 = tagged_number("c1");
  f.n_points = space.size();
  f.order.resize(space.size());
  std::iota(f.order.begin(), f.order.end(), PointIndex{0});
  const Json& levels = array_at(member(j, "", "levels"), "/levels");
  if (levels.empty()) parse_fail("/levels", "no levels");
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const std::string lp = "/levels/" + std::to_string(l);
    const Json& kj = member(levels[l], lp, "k");
    if (!kj.is_number_integer()) parse_fail(lp + "/k", "expected an integer");
    const int k = kj.get<int>();
    if (l == 0)
      f.k_min = k;
    else if (k != f.k_min + static_cast<int>(l))
      parse_fail(lp + "/k", "levels must be consecutive");
    f.k_max = k;
    const Json& cubes = array_at(member(levels[l], lp, "cubes"), lp + "/cubes");
    std::vector<Cube> level;
    std::vector<std::size_t> cube_of(space.size(), space.size());
    for (std::size_t i = 0; i < cubes.size(); ++i) {
      const std::string cp = lp + "/cubes/" + std::to_string(i);
      Cube c;
      const Json& center = member(cubes[i], cp, "center");
      if (!center.is_string() || !space.find(center.get<std::string>())) parse_fail(cp + "/center", "unknown point id");
      c.center = *space.find(center.get<std::string>());
      const Json& ids = array_at(member(cubes[i], cp, "memberIds"), cp + "/memberIds");
      for (std::size_t m = 0; m < ids.size(); ++m) {
        const auto x = ids[m].is_string() ? space.find(ids[m].get<std::string>()) : std::nullopt;
        if (!x) parse_fail(cp + "/memberIds/" + std::to_string(m), "unknown point id");
        if (cube_of[*x] != space.size()) parse_fail(cp + "/memberIds/" + std::to_string(m), "point already in another cube");
        cube_of[*x] = i;
        c.members.push_back(*x);
      }
      std::sort(c.members.begin(), c.members.end());
      const Json& parent = member(cubes[i], cp, "parent");
      if (l > 0) {
        c.parent = index_at(parent, cp + "/parent", f.levels[l - 1].size());
        f.levels[l - 1][c.parent].children.push_back(i);
      } else if (!parent.is_null()) {
        parse_fail(cp + "/parent", "coarsest cubes have no parent");
      }
      c.mass = space.measure(c.members);
      for (PointIndex x : c.members)
        for (PointIndex y : c.members) c.diameter = std::max(c.diameter, space.distance(x, y));
      level.push_back(std::move(c));
    }
    for (PointIndex x = 0; x < space.size(); ++x)
      if (cube_of[x] == space.size()) parse_fail(lp, "point " + space.id(x) + " is in no cube");
    f.levels.push_back(std::move(level));
    f.cube_of.push_back(std::move(cube_of));
  }
  return f;
}

Json function_to_json(const FiniteSpace& space, std::span<const double> f) {
  require(f.size() == space.size(), "function length differs from the space size");
  Json values = Json::object();
  for (PointIndex x = 0; x < space.size(); ++x) values[space.id(x)] = f[x];
  return {{"values", std::move(values)}};
}

std::vector<double> function_from_json(const FiniteSpace& space, const Json& j) {
  const Json& values = member(j, "", "values");
  if (!values.is_object()) parse_fail("/values", "expected an object keyed by point id");
  std::vector<double> f(space.size(), 0.0);
  std::vector<char> seen(space.size(), 0);
  for (const auto& [id, v] : values.items()) {
    const auto x = space.find(id);
    if (!x) parse_fail("/values/" + id, "unknown point id");
    f[*x] = number_at(v, "/values/" + id);
    seen[*x] = 1;
  }
  for (PointIndex x = 0; x < space.size(); ++x)
    if (!seen[x]) parse_fail("/values/" + space.id(x), "missing");
  return f;
}

Json kernel_to_json(const FiniteSpace& space, const KernelOperator& op) {
  require(op.n == space.size(), "operator and space sizes differ");
  Json rows = Json::array();
  for (std::size_t x = 0; x < op.n; ++x)
    rows.push_back(std::vector<double>(op.kernel.begin() + static_cast<std::ptrdiff_t>(x * op.n),
                                       op.kernel.begin() + static_cast<std::ptrdiff_t>((x + 1) * op.n)));
  return {{"name", op.name},
          {"points", std::vector<std::string>(space.ids().begin(), space.ids().end())},
          {"kernel", std::move(rows)}};
}

KernelOperator kernel_from_json(const FiniteSpace& space, const Json& j) {
  const std::size_t n = space.size();
  const Json& pts = array_at(member(j, "", "points"), "/points");
  if (pts.size() != n) parse_fail("/points", "length differs from the space");
  for (std::size_t i = 0; i < n; ++i)
    if (!pts[i].is_string() || pts[i].get<std::string>() != space.id(i))
      parse_fail("/points/" + std::to_string(i), "point ordering differs from the space");
  const Json& rows = array_at(member(j, "", "kernel"), "/kernel");
  if (rows.size() != n) parse_fail("/kernel", "expected one row per point");
  std::vector<double> k;
  k.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string p = "/kernel/" + std::to_string(i);
    const Json& row = array_at(rows[i], p);
    if (row.size() != n) parse_fail(p, "expected one entry per point");
    for (std::size_t c = 0; c < n; ++c) k.push_back(number_at(row[c], p + "/" + std::to_string(c)));
  }
  std::string name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>() : "";
  return make_kernel(n, std::move(k), std::move(name));
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

Json tagged(double value, Provenance provenance) {
  return {{"value", format_decimal(value)}, {"provenance", std::string(provenance_name(provenance))}};
}

std::vector<std::string> untagged_values(const Json& j) {
  std::vector<std::string> out;
  collect_untagged(j, "", out);
  return out;
}

}  // namespace hbl
