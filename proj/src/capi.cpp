#include "hbl/hbl.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "hbl/commands.hpp"
#include "hbl/corpus.hpp"
#include "hbl/runner.hpp"

struct hbl_space {
  hbl::FiniteSpace space;
};

struct hbl_forest {
  hbl::DyadicForest forest;
  std::size_t n_points;
};

struct hbl_kernel {
  hbl::KernelOperator op;
};

struct hbl_run_report {
  hbl::RunReport report;
  std::filesystem::path output;
};

namespace {

thread_local std::string last_error;

hbl_status to_status(hbl::ErrorCode code) {
  switch (code) {
    case hbl::ErrorCode::InvalidParameter: return HBL_ERR_INVALID_PARAMETER;
    case hbl::ErrorCode::ParseError: return HBL_ERR_PARSE;
    case hbl::ErrorCode::DataError: return HBL_ERR_DATA;
    case hbl::ErrorCode::DegenerateSpace: return HBL_ERR_DEGENERATE_SPACE;
    case hbl::ErrorCode::AmpFailure: return HBL_ERR_AMP_FAILURE;
    case hbl::ErrorCode::NonContraction: return HBL_ERR_NON_CONTRACTION;
    case hbl::ErrorCode::Unsupported: return HBL_ERR_UNSUPPORTED;
    case hbl::ErrorCode::IoError: return HBL_ERR_IO;
    case hbl::ErrorCode::Internal: return HBL_ERR_INTERNAL;
  }
  return HBL_ERR_INTERNAL;
}

hbl_status set_error(hbl_status status, const std::string& what) {
  last_error = what;
  return status;
}

template <class F>
hbl_status guard(F&& body) {
  try {
    body();
    last_error.clear();
    return HBL_OK;
  } catch (const hbl::Error& e) {
    return set_error(to_status(e.code()), e.what());
  } catch (const nlohmann::json::parse_error& e) {
    return set_error(HBL_ERR_PARSE, e.what());
  } catch (const nlohmann::json::exception& e) {
    return set_error(HBL_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(HBL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(HBL_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(HBL_ERR_INTERNAL, "unknown error");
  }
}

void need(const void* p, const char* name) {
  if (!p) hbl::fail(hbl::ErrorCode::InvalidParameter, std::string(name) + " must not be null");
}

hbl::Json parse(const char* text, const char* name) {
  need(text, name);
  try {
    return hbl::Json::parse(text);
  } catch (const hbl::Json::parse_error& e) {
    hbl::fail(hbl::ErrorCode::ParseError, std::string(name) + ": " + e.what());
  }
}

hbl::Json options(const char* text) {
  if (!text) return hbl::Json::object();
  hbl::Json j = parse(text, "options");
  if (!j.is_object()) hbl::fail(hbl::ErrorCode::ParseError, "options: expected an object");
  return j;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(const hbl::Json& j, char** out) { *out = copy_string(hbl::canonical_dump(j)); }

void check_forest(const hbl_space* s, const hbl_forest* f) {
  need(s, "space");
  need(f, "forest");
  if (f->n_points != s->space.size()) hbl::fail(hbl::ErrorCode::InvalidParameter, "forest belongs to another space");
}

double num(const hbl::Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) hbl::fail(hbl::ErrorCode::ParseError, std::string("options.") + key + ": expected a number");
  return j[key].get<double>();
}

}  // namespace

extern "C" {

const char* hbl_version(void) { return hbl::kToolVersion; }

const char* hbl_status_name(hbl_status status) {
  switch (status) {
    case HBL_OK: return "ok";
    case HBL_ERR_INVALID_PARAMETER: return "invalid-parameter";
    case HBL_ERR_PARSE: return "parse-error";
    case HBL_ERR_DATA: return "data-error";
    case HBL_ERR_DEGENERATE_SPACE: return "degenerate-space";
    case HBL_ERR_AMP_FAILURE: return "amp-failure";
    case HBL_ERR_NON_CONTRACTION: return "non-contraction";
    case HBL_ERR_UNSUPPORTED: return "unsupported";
    case HBL_ERR_IO: return "io-error";
    case HBL_ERR_INTERNAL: return "internal-error";
  }
  return "unknown";
}

const char* hbl_last_error(void) { return last_error.c_str(); }

void hbl_string_free(char* s) { std::free(s); }

hbl_status hbl_space_generate(const char* spec_json, hbl_space** out) {
  return guard([&] {
    need(out, "out");
    const hbl::Json spec = parse(spec_json, "spec");
    if (spec.is_object() && spec.contains("file"))
      hbl::fail(hbl::ErrorCode::InvalidParameter, "use hbl_space_load for files");
    *out = new hbl_space{hbl::space_from_spec(spec)};
  });
}

hbl_status hbl_space_parse(const char* space_json, hbl_space** out) {
  return guard([&] {
    need(out, "out");
    *out = new hbl_space{hbl::space_from_json(parse(space_json, "space"))};
  });
}

hbl_status hbl_space_load(const char* path, hbl_space** out) {
  return guard([&] {
    need(out, "out");
    need(path, "path");
    *out = new hbl_space{hbl::space_from_json(hbl::read_json_file(path))};
  });
}

hbl_status hbl_space_to_json(const hbl_space* space, char** out) {
  return guard([&] {
    need(space, "space");
    need(out, "out");
    emit(hbl::space_to_json(space->space), out);
  });
}

size_t hbl_space_size(const hbl_space* space) { return space ? space->space.size() : 0; }

void hbl_space_free(hbl_space* space) { delete space; }

hbl_status hbl_function_generate(const hbl_space* space, const char* spec_json, char** out) {
  return guard([&] {
    need(space, "space");
    need(out, "out");
    const auto& s = space->space;
    const hbl::Json spec = parse(spec_json, "spec");
    if (!spec.is_object() || !spec.contains("kind") || !spec["kind"].is_string())
      hbl::fail(hbl::ErrorCode::ParseError, "spec.kind: expected a string");
    const std::string kind = spec["kind"].get<std::string>();
    auto point = [&](const char* key) {
      if (!spec.contains(key) || !spec[key].is_string() || !s.find(spec[key].get<std::string>()))
        hbl::fail(hbl::ErrorCode::ParseError, std::string("spec.") + key + ": expected a point id");
      return *s.find(spec[key].get<std::string>());
    };
    auto rng = [&] {
      if (!spec.contains("seed") || !spec["seed"].is_number_unsigned())
        hbl::fail(hbl::ErrorCode::ParseError, "spec.seed: expected an unsigned integer");
      return hbl::make_rng(spec["seed"].get<std::uint64_t>(), 0);
    };
    std::vector<double> f;
    if (kind == "gaussian") {
      auto r = rng();
      f = hbl::gaussian_function(s, r);
    } else if (kind == "log_distance") {
      f = hbl::log_distance(s, point("origin"));
    } else if (kind == "local_mean_zero") {
      auto r = rng();
      f = hbl::local_mean_zero(s, hbl::ball(s, point("center"), num(spec, "radius", 1.0)), r);
    } else if (kind == "global_mean_zero") {
      auto r = rng();
      f = hbl::global_mean_zero(s, r);
    } else {
      hbl::fail(hbl::ErrorCode::InvalidParameter, "unknown function kind '" + kind + "'");
    }
    emit(hbl::function_to_json(s, f), out);
  });
}

hbl_status hbl_forest_build(const hbl_space* space, double delta, int random_tie_break, uint64_t seed,
                            hbl_forest** out) {
  return guard([&] {
    need(space, "space");
    need(out, "out");
    const auto& s = space->space;
    *out = new hbl_forest{hbl::build_forest(s, delta, hbl::tie_break_order(s.size(), random_tie_break != 0, seed)),
                          s.size()};
  });
}

hbl_status hbl_forest_parse(const hbl_space* space, const char* forest_json, hbl_forest** out) {
  return guard([&] {
    need(space, "space");
    need(out, "out");
    *out = new hbl_forest{hbl::forest_from_json(space->space, parse(forest_json, "forest")), space->space.size()};
  });
}

hbl_status hbl_forest_report(const hbl_space* space, const hbl_forest* forest, char** out) {
  return guard([&] {
    check_forest(space, forest);
    need(out, "out");
    emit(hbl::forest_report(space->space, forest->forest), out);
  });
}

void hbl_forest_free(hbl_forest* forest) { delete forest; }

hbl_status hbl_maximal(const hbl_space* space, const hbl_forest* forest, const char* f_json, const char* options_json,
                       char** report_out, char** csv_out) {
  return guard([&] {
    check_forest(space, forest);
    need(report_out, "report_out");
    const auto& s = space->space;
    const auto f = hbl::function_from_json(s, parse(f_json, "f"));
    const hbl::Json o = options(options_json);
    hbl::MaximalRequest req;
    if (o.contains("k_floor") && !o["k_floor"].is_null()) {
      if (!o["k_floor"].is_number_integer()) hbl::fail(hbl::ErrorCode::ParseError, "options.k_floor: expected an integer");
      req.k_floor = o["k_floor"].get<int>();
    }
    req.eta_prime = num(o, "eta_prime", req.eta_prime);
    if (o.contains("eps")) req.eps = num(o, "eps", 0.0);
    req.b0 = num(o, "b0", req.b0);
    if (o.contains("seed")) {
      if (!o["seed"].is_number_unsigned()) hbl::fail(hbl::ErrorCode::ParseError, "options.seed: expected an unsigned integer");
      req.seed = o["seed"].get<std::uint64_t>();
    }
    const hbl::CommandOutput r = hbl::maximal_report(s, forest->forest, f, req);
    char* report = copy_string(hbl::canonical_dump(r.json));
    if (csv_out) {
      try {
        *csv_out = copy_string(r.csv);
      } catch (...) {
        std::free(report);
        throw;
      }
    }
    *report_out = report;
  });
}

hbl_status hbl_h1_norm(const hbl_space* space, const char* g_json, double b, int with_terms, char** out) {
  return guard([&] {
    need(space, "space");
    need(out, "out");
    const auto g = hbl::function_from_json(space->space, parse(g_json, "g"));
    emit(hbl::h1_norm_report(space->space, g, b, with_terms != 0), out);
  });
}

hbl_status hbl_bmo_norm(const hbl_space* space, const char* f_json, double q, double b, char** out) {
  return guard([&] {
    need(space, "space");
    need(out, "out");
    const auto f = hbl::function_from_json(space->space, parse(f_json, "f"));
    emit(hbl::bmo_norm_report(space->space, f, q, b), out);
  });
}

hbl_status hbl_split_atom(const hbl_space* space, const char* atom_json, const char* options_json, char** out) {
  return guard([&] {
    need(space, "space");
    need(out, "out");
    const hbl::Atom atom = hbl::atom_from_json(space->space, parse(atom_json, "atom"));
    const hbl::Json o = options(options_json);
    hbl::SplitOptions so;
    so.c = num(o, "c", 0.0);
    so.b_big = num(o, "b", atom.ball.radius);
    so.beta = num(o, "beta", so.beta);
    so.r0 = num(o, "r0", so.r0);
    if (o.contains("discrete")) {
      if (!o["discrete"].is_boolean()) hbl::fail(hbl::ErrorCode::ParseError, "options.discrete: expected a boolean");
      so.discrete = o["discrete"].get<bool>();
    }
    emit(hbl::split_atom_report(space->space, atom, so), out);
  });
}

hbl_status hbl_jn(const hbl_space* space, const hbl_forest* forest, const char* f_json, const char* options_json,
                  char** report_out, char** csv_out) {
  return guard([&] {
    check_forest(space, forest);
    need(report_out, "report_out");
    const auto f = hbl::function_from_json(space->space, parse(f_json, "f"));
    const hbl::Json o = options(options_json);
    std::optional<double> b0;
    if (o.contains("b0")) b0 = num(o, "b0", 0.0);
    const hbl::CommandOutput r = hbl::jn_report(space->space, forest->forest, f, b0, num(o, "q", 2.0),
                                                num(o, "r0", 1.0), num(o, "beta", 0.75));
    char* report = copy_string(hbl::canonical_dump(r.json));
    if (csv_out) {
      try {
        *csv_out = copy_string(r.csv);
      } catch (...) {
        std::free(report);
        throw;
      }
    }
    *report_out = report;
  });
}

hbl_status hbl_pairing(const hbl_space* space, const char* f_json, const char* g_json, double b, char** out) {
  return guard([&] {
    need(space, "space");
    need(out, "out");
    const auto f = hbl::function_from_json(space->space, parse(f_json, "f"));
    const auto g = hbl::function_from_json(space->space, parse(g_json, "g"));
    emit(hbl::pairing_report(space->space, f, g, b), out);
  });
}

hbl_status hbl_kernel_multiplier(const hbl_space* space, const char* multiplier_json, hbl_kernel** out) {
  return guard([&] {
    need(space, "space");
    need(out, "out");
    const hbl::Multiplier m = hbl::multiplier_from_json(parse(multiplier_json, "multiplier"));
    *out = new hbl_kernel{hbl::spectral_multiplier(space->space, m)};
  });
}

hbl_status hbl_kernel_parse(const hbl_space* space, const char* kernel_json, hbl_kernel** out) {
  return guard([&] {
    need(space, "space");
    need(out, "out");
    *out = new hbl_kernel{hbl::kernel_from_json(space->space, parse(kernel_json, "kernel"))};
  });
}

hbl_status hbl_kernel_to_json(const hbl_space* space, const hbl_kernel* kernel, char** out) {
  return guard([&] {
    need(space, "space");
    need(kernel, "kernel");
    need(out, "out");
    emit(hbl::kernel_to_json(space->space, kernel->op), out);
  });
}

hbl_status hbl_kernel_report(const hbl_space* space, const hbl_kernel* kernel, double b, size_t samples, uint64_t seed,
                             char** out) {
  return guard([&] {
    need(space, "space");
    need(kernel, "kernel");
    need(out, "out");
    emit(hbl::operator_report(space->space, kernel->op, b, samples, seed), out);
  });
}

void hbl_kernel_free(hbl_kernel* kernel) { delete kernel; }

hbl_status hbl_run(const char* config_json, int parallel, hbl_run_report** out) {
  return guard([&] {
    need(out, "out");
    const hbl::ExperimentConfig config = hbl::parse_config(parse(config_json, "config"));
    *out = new hbl_run_report{hbl::run(config, parallel != 0), config.output};
  });
}

int hbl_run_exit_code(const hbl_run_report* report) { return report ? report->report.exit_code() : 1; }

size_t hbl_run_hard_failure_count(const hbl_run_report* report) {
  return report ? report->report.hard_failures.size() : 0;
}

const char* hbl_run_hard_failure(const hbl_run_report* report, size_t i) {
  if (!report || i >= report->report.hard_failures.size()) return nullptr;
  return report->report.hard_failures[i].c_str();
}

hbl_status hbl_run_report_json(const hbl_run_report* report, char** out) {
  return guard([&] {
    need(report, "report");
    need(out, "out");
    emit(report->report.report, out);
  });
}

hbl_status hbl_run_timing_json(const hbl_run_report* report, char** out) {
  return guard([&] {
    need(report, "report");
    need(out, "out");
    emit(report->report.timing, out);
  });
}

hbl_status hbl_run_write(const hbl_run_report* report, const char* dir) {
  return guard([&] {
    need(report, "report");
    hbl::write_outputs(report->report, dir ? std::filesystem::path(dir) : report->output);
  });
}

void hbl_run_report_free(hbl_run_report* report) { delete report; }

}  // extern "C"
