#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hbl/hbl.h"

namespace {

using Json = nlohmann::json;

constexpr int kExitHardFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitError = 3;

struct Failure {
  hbl_status status;
  std::string message;
};

int exit_code_for(hbl_status s) {
  return s == HBL_ERR_INVALID_PARAMETER ? kExitUsage : kExitError;
}

void check(hbl_status s) {
  if (s != HBL_OK) throw Failure{s, hbl_last_error()};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{HBL_ERR_IO, "cannot open " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Failure{HBL_ERR_IO, "cannot write " + path};
}

// Owns a string returned by the library.
struct Text {
  char* p = nullptr;
  ~Text() { hbl_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  ~Handle() { Free(p); }
};
using Space = Handle<hbl_space, hbl_space_free>;
using Forest = Handle<hbl_forest, hbl_forest_free>;
using Kernel = Handle<hbl_kernel, hbl_kernel_free>;
using Report = Handle<hbl_run_report, hbl_run_report_free>;

void emit(const std::string& text, const std::string& out) {
  if (out.empty())
    std::cout << text;
  else
    write_file(out, text);
}

void load_space(const std::string& path, Space& s) { check(hbl_space_load(path.c_str(), &s.p)); }

void load_forest(const Space& s, const std::string& path, double delta, Forest& f) {
  if (path.empty())
    check(hbl_forest_build(s.p, delta, 0, 0, &f.p));
  else
    check(hbl_forest_parse(s.p, read_file(path).c_str(), &f.p));
}

std::string options_json(const Json& j) { return j.dump(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hardy and BMO spaces on finite metric measure spaces"};
  app.require_subcommand(1);
  app.set_version_flag("--version", hbl_version());

  std::string out;
  std::string space_path, forest_path, f_path, g_path;
  double b = 2.0, c = 1.5, q = 1.0, jn_q = 2.0, delta = 0.5, beta = 0.75, r0 = 1.0;
  std::uint64_t seed = 1;

  // run
  std::string config_path, out_dir;
  bool parallel = false;
  auto* run = app.add_subcommand("run", "Run an experiment configuration");
  run->add_option("--config", config_path, "Config JSON file")->required()->check(CLI::ExistingFile);
  run->add_flag("--parallel", parallel, "Run independent suites concurrently");
  run->add_option("--out", out_dir, "Output directory (overrides the config)");

  // generate
  std::string kind;
  int gq = 3, depth = 4, n = 8, d = 2, cells = 100;
  double max_radius = 2.5;
  auto* gen = app.add_subcommand("generate", "Generate a corpus space");
  gen->add_option("--kind", kind, "tree | path | grid | hyperbolic")
      ->required()
      ->check(CLI::IsMember({"tree", "path", "grid", "hyperbolic"}));
  gen->add_option("--q", gq, "Tree branching")->check(CLI::PositiveNumber);
  gen->add_option("--depth", depth, "Tree depth")->check(CLI::NonNegativeNumber);
  gen->add_option("--n", n, "Path length or grid side")->check(CLI::PositiveNumber);
  gen->add_option("--d", d, "Grid dimension")->check(CLI::PositiveNumber);
  gen->add_option("--cells", cells, "Hyperbolic sample cells")->check(CLI::PositiveNumber);
  gen->add_option("--max-radius", max_radius, "Hyperbolic radius")->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed, "Hyperbolic jitter seed");
  gen->add_option("--out", out, "Output file (default stdout)");

  // function
  std::string fkind, point_id;
  double radius = 1.0;
  auto* fun = app.add_subcommand("function", "Sample a function on a space");
  fun->add_option("--space", space_path)->required()->check(CLI::ExistingFile);
  fun->add_option("--kind", fkind, "gaussian | log_distance | local_mean_zero | global_mean_zero")
      ->required()
      ->check(CLI::IsMember({"gaussian", "log_distance", "local_mean_zero", "global_mean_zero"}));
  fun->add_option("--point", point_id, "Origin or center point id");
  fun->add_option("--radius", radius, "Ball radius for local_mean_zero")->check(CLI::PositiveNumber);
  fun->add_option("--seed", seed);
  fun->add_option("--out", out);

  // forest
  std::string tie_break = "id";
  auto* forest = app.add_subcommand("forest", "Build and verify a dyadic forest");
  forest->add_option("--space", space_path)->required()->check(CLI::ExistingFile);
  forest->add_option("--delta", delta, "Scale ratio in (0, 1)");
  forest->add_option("--tie-break", tie_break, "id | random")->check(CLI::IsMember({"id", "random"}));
  forest->add_option("--seed", seed, "Seed for --tie-break random");
  forest->add_option("--out", out);

  // geometry
  auto* geo = app.add_subcommand("geometry", "Doubling, isoperimetric and (AMP) diagnostics");
  geo->add_option("--space", space_path)->required()->check(CLI::ExistingFile);
  geo->add_option("--b", b);
  geo->add_option("--c", c);
  geo->add_option("--r0", r0);
  geo->add_option("--beta", beta);
  geo->add_option("--seed", seed);
  geo->add_option("--out", out);

  // maximal
  std::string k_floor = "auto", csv_path;
  auto* max = app.add_subcommand("maximal", "Maximal function, weak type and good-lambda table");
  max->add_option("--space", space_path)->required()->check(CLI::ExistingFile);
  max->add_option("--forest", forest_path, "Forest JSON (default: build at --delta)")->check(CLI::ExistingFile);
  max->add_option("--delta", delta);
  max->add_option("--f", f_path, "Function JSON")->required()->check(CLI::ExistingFile);
  max->add_option("--k-floor", k_floor, "Resolution floor or 'auto'");
  max->add_option("--seed", seed, "Isoperimetric sampling seed");
  max->add_option("--csv", csv_path, "Good-lambda CSV output");
  max->add_option("--out", out);

  // h1-norm
  bool terms = false;
  auto* h1 = app.add_subcommand("h1-norm", "Atomic H1 norm by linear programming");
  h1->add_option("--space", space_path)->required()->check(CLI::ExistingFile);
  h1->add_option("--g", g_path, "Function JSON")->required()->check(CLI::ExistingFile);
  h1->add_option("--b", b)->check(CLI::PositiveNumber);
  h1->add_flag("--terms", terms, "Include the decomposition");
  h1->add_option("--out", out);

  // bmo-norm
  auto* bmo = app.add_subcommand("bmo-norm", "BMO norm N^q_b");
  bmo->add_option("--space", space_path)->required()->check(CLI::ExistingFile);
  bmo->add_option("--f", f_path)->required()->check(CLI::ExistingFile);
  bmo->add_option("--q", q);
  bmo->add_option("--b", b)->check(CLI::PositiveNumber);
  bmo->add_option("--out", out);

  // split-atom
  std::string atom_path;
  bool discrete = false;
  auto* split = app.add_subcommand("split-atom", "Split an atom into atoms at a smaller scale");
  split->add_option("--space", space_path)->required()->check(CLI::ExistingFile);
  split->add_option("--atom", atom_path, "Atom JSON")->required()->check(CLI::ExistingFile);
  split->add_option("--c", c)->required();
  split->add_option("--b", b)->required();
  split->add_option("--r0", r0);
  split->add_option("--beta", beta);
  split->add_flag("--discrete", discrete, "Allow c <= r0 / (1 - beta)");
  split->add_option("--out", out);

  // jn
  std::optional<double> b0;
  auto* jn = app.add_subcommand("jn", "John-Nirenberg level-set experiment");
  jn->add_option("--space", space_path)->required()->check(CLI::ExistingFile);
  jn->add_option("--forest", forest_path)->check(CLI::ExistingFile);
  jn->add_option("--delta", delta);
  jn->add_option("--f", f_path)->required()->check(CLI::ExistingFile);
  jn->add_option("--b0", b0);
  jn->add_option("--q", jn_q, "Corollary exponent (> 1)");
  jn->add_option("--r0", r0);
  jn->add_option("--beta", beta);
  jn->add_option("--csv", csv_path);
  jn->add_option("--out", out);

  // pairing
  auto* pair = app.add_subcommand("pairing", "Check |<f, g>| <= N^1(f) ||g||_H1");
  pair->add_option("--space", space_path)->required()->check(CLI::ExistingFile);
  pair->add_option("--f", f_path)->required()->check(CLI::ExistingFile);
  pair->add_option("--g", g_path)->required()->check(CLI::ExistingFile);
  pair->add_option("--b", b)->check(CLI::PositiveNumber);
  pair->add_option("--out", out);

  // operator
  std::string op_kind, kernel_path, kernel_out;
  double t = 1.0, s = 1.0, cutoff = 1.0, width = 0.25;
  std::vector<double> coeffs;
  std::size_t samples = 64;
  auto* op = app.add_subcommand("operator", "Kernel diagnostics for a spectral multiplier or kernel file");
  op->add_option("--space", space_path)->required()->check(CLI::ExistingFile);
  auto* kind_opt = op->add_option("--kind", op_kind, "heat | resolvent | band | polynomial")
                       ->check(CLI::IsMember({"heat", "resolvent", "band", "polynomial"}));
  op->add_option("--kernel", kernel_path, "Kernel JSON instead of --kind")->excludes(kind_opt)->check(CLI::ExistingFile);
  op->add_option("--t", t);
  op->add_option("--s", s);
  op->add_option("--cutoff", cutoff);
  op->add_option("--width", width);
  op->add_option("--coeffs", coeffs)->delimiter(',');
  op->add_option("--b", b)->check(CLI::PositiveNumber);
  op->add_option("--samples", samples)->check(CLI::PositiveNumber);
  op->add_option("--seed", seed);
  op->add_option("--kernel-out", kernel_out, "Write the kernel JSON");
  op->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run) {
      Json config;
      try {
        config = Json::parse(read_file(config_path));
      } catch (const Json::parse_error& e) {
        throw Failure{HBL_ERR_PARSE, config_path + ": " + e.what()};
      }
      Report r;
      check(hbl_run(config.dump().c_str(), parallel ? 1 : 0, &r.p));
      check(hbl_run_write(r.p, out_dir.empty() ? nullptr : out_dir.c_str()));
      const std::size_t failures = hbl_run_hard_failure_count(r.p);
      for (std::size_t i = 0; i < failures; ++i) std::cerr << "hard failure: " << hbl_run_hard_failure(r.p, i) << '\n';
      std::cout << (failures == 0 ? "pass" : "fail") << '\n';
      return failures == 0 ? 0 : kExitHardFailure;
    }
    if (*gen) {
      Json spec = {{"generator", kind}};
      if (kind == "tree") spec.update({{"q", gq}, {"depth", depth}});
      if (kind == "path") spec["n"] = n;
      if (kind == "grid") spec.update({{"d", d}, {"n", n}});
      if (kind == "hyperbolic") spec.update({{"cells", cells}, {"max_radius", max_radius}, {"seed", seed}});
      Space sp;
      check(hbl_space_generate(spec.dump().c_str(), &sp.p));
      Text text;
      check(hbl_space_to_json(sp.p, &text.p));
      emit(text.str(), out);
      return 0;
    }

    Space sp;
    load_space(space_path, sp);
    Text text;

    if (*fun) {
      Json spec = {{"kind", fkind}, {"seed", seed}, {"radius", radius}};
      if (fkind == "log_distance") spec["origin"] = point_id;
      if (fkind == "local_mean_zero") spec["center"] = point_id;
      check(hbl_function_generate(sp.p, spec.dump().c_str(), &text.p));
    } else if (*forest) {
      Forest f;
      check(hbl_forest_build(sp.p, delta, tie_break == "random" ? 1 : 0, seed, &f.p));
      check(hbl_forest_report(sp.p, f.p, &text.p));
    } else if (*geo) {
      const Json config = {{"space", {{"file", space_path}}},
                           {"scales", {{"b", b}, {"c", c}, {"r0", r0}, {"beta", beta}}},
                           {"suites", {"geometry"}},
                           {"seed", seed}};
      Report r;
      check(hbl_run(config.dump().c_str(), 0, &r.p));
      check(hbl_run_report_json(r.p, &text.p));
      emit(text.str(), out);
      return hbl_run_exit_code(r.p) == 0 ? 0 : kExitHardFailure;
    } else if (*max) {
      Forest f;
      load_forest(sp, forest_path, delta, f);
      Json o = {{"seed", seed}};
      if (k_floor != "auto") {
        try {
          std::size_t used = 0;
          o["k_floor"] = std::stoi(k_floor, &used);
          if (used != k_floor.size()) throw std::invalid_argument(k_floor);
        } catch (const std::logic_error&) {
          throw Failure{HBL_ERR_INVALID_PARAMETER, "--k-floor: expected an integer or 'auto'"};
        }
      }
      Text csv;
      check(hbl_maximal(sp.p, f.p, read_file(f_path).c_str(), options_json(o).c_str(), &text.p, &csv.p));
      if (!csv_path.empty()) write_file(csv_path, csv.str());
    } else if (*h1) {
      check(hbl_h1_norm(sp.p, read_file(g_path).c_str(), b, terms ? 1 : 0, &text.p));
    } else if (*bmo) {
      check(hbl_bmo_norm(sp.p, read_file(f_path).c_str(), q, b, &text.p));
    } else if (*split) {
      const Json o = {{"c", c}, {"b", b}, {"r0", r0}, {"beta", beta}, {"discrete", discrete}};
      check(hbl_split_atom(sp.p, read_file(atom_path).c_str(), options_json(o).c_str(), &text.p));
    } else if (*jn) {
      Forest f;
      load_forest(sp, forest_path, delta, f);
      Json o = {{"q", jn_q}, {"r0", r0}, {"beta", beta}};
      if (b0) o["b0"] = *b0;
      Text csv;
      check(hbl_jn(sp.p, f.p, read_file(f_path).c_str(), options_json(o).c_str(), &text.p, &csv.p));
      if (!csv_path.empty()) write_file(csv_path, csv.str());
    } else if (*pair) {
      check(hbl_pairing(sp.p, read_file(f_path).c_str(), read_file(g_path).c_str(), b, &text.p));
    } else if (*op) {
      Kernel k;
      if (!kernel_path.empty()) {
        check(hbl_kernel_parse(sp.p, read_file(kernel_path).c_str(), &k.p));
      } else {
        if (op_kind.empty()) throw Failure{HBL_ERR_INVALID_PARAMETER, "operator: --kind or --kernel is required"};
        Json m = {{"kind", op_kind}};
        if (op_kind == "heat") m["t"] = t;
        if (op_kind == "resolvent") m["s"] = s;
        if (op_kind == "band") m.update({{"cutoff", cutoff}, {"width", width}});
        if (op_kind == "polynomial") m["coeffs"] = coeffs;
        check(hbl_kernel_multiplier(sp.p, m.dump().c_str(), &k.p));
      }
      if (!kernel_out.empty()) {
        Text kt;
        check(hbl_kernel_to_json(sp.p, k.p, &kt.p));
        write_file(kernel_out, kt.str());
      }
      check(hbl_kernel_report(sp.p, k.p, b, samples, seed, &text.p));
    }
    emit(text.str(), out);
    return 0;
  } catch (const Failure& f) {
    std::cerr << "error (" << hbl_status_name(f.status) << "): " << f.message << '\n';
    return exit_code_for(f.status);
  }
}
