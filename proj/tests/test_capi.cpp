#include "doctest.h"

#include <string>

#include <nlohmann/json.hpp>

#include "hbl/hbl.h"

using nlohmann::json;

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  hbl_string_free(s);
  return out;
}

struct Space {
  hbl_space* p = nullptr;
  explicit Space(const char* spec) { REQUIRE(hbl_space_generate(spec, &p) == HBL_OK); }
  ~Space() { hbl_space_free(p); }
};

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(hbl_version()) == "0.1.0");
  CHECK(std::string(hbl_status_name(HBL_OK)) == "ok");
  CHECK(std::string(hbl_status_name(HBL_ERR_DATA)).size() > 0);
}

TEST_CASE("space lifecycle and round trip") {
  Space s(R"({"generator": "tree", "q": 3, "depth": 2})");
  CHECK(hbl_space_size(s.p) == 10);
  char* text = nullptr;
  REQUIRE(hbl_space_to_json(s.p, &text) == HBL_OK);
  const std::string a = take(text);
  hbl_space* back = nullptr;
  REQUIRE(hbl_space_parse(a.c_str(), &back) == HBL_OK);
  REQUIRE(hbl_space_to_json(back, &text) == HBL_OK);
  CHECK(take(text) == a);
  hbl_space_free(back);
}

TEST_CASE("errors set the status and the thread message") {
  hbl_space* s = nullptr;
  CHECK(hbl_space_parse("{not json", &s) == HBL_ERR_PARSE);
  CHECK(s == nullptr);
  CHECK(std::string(hbl_last_error()).size() > 0);
  CHECK(hbl_space_parse(R"({"points": ["a", "b"], "weights": [1, 1], "dist": [[0, 1], [2, 0]]})", &s) ==
        HBL_ERR_DATA);
  CHECK(hbl_space_generate(R"({"generator": "tree", "q": 1, "depth": 2})", &s) == HBL_ERR_INVALID_PARAMETER);
  CHECK(hbl_space_generate(nullptr, &s) == HBL_ERR_INVALID_PARAMETER);
  CHECK(hbl_space_load("/nonexistent/space.json", &s) == HBL_ERR_IO);
  Space ok(R"({"generator": "path", "n": 3})");
  CHECK(std::string(hbl_last_error()).empty());
}

TEST_CASE("norms through the C interface") {
  Space s(R"({"generator": "path", "n": 3})");
  char* out = nullptr;
  REQUIRE(hbl_h1_norm(s.p, R"({"values": {"0": 1, "1": -2, "2": 1}})", 1.5, 1, &out) == HBL_OK);
  const auto h = json::parse(take(out));
  CHECK(h["value"]["value"] == "4");
  CHECK(h["value"]["provenance"] == "exact");
  REQUIRE(hbl_bmo_norm(s.p, R"({"values": {"0": 1, "1": 0, "2": 0}})", 1.0, 1.5, &out) == HBL_OK);
  CHECK(json::parse(take(out)).contains("value"));
  CHECK(hbl_h1_norm(s.p, R"({"values": {"0": 1}})", 1.5, 0, &out) != HBL_OK);
  CHECK(hbl_h1_norm(s.p, R"({"values": {"0": 1, "1": -2, "2": 1}})", -1.0, 0, &out) == HBL_ERR_INVALID_PARAMETER);
}

TEST_CASE("forests, maximal function and John-Nirenberg") {
  Space s(R"({"generator": "tree", "q": 3, "depth": 4})");
  hbl_forest* f = nullptr;
  REQUIRE(hbl_forest_build(s.p, 0.5, 0, 0, &f) == HBL_OK);
  char* out = nullptr;
  REQUIRE(hbl_forest_report(s.p, f, &out) == HBL_OK);
  const auto rep = json::parse(take(out));
  CHECK(rep["verification"]["ok"] == true);
  hbl_forest* g = nullptr;
  REQUIRE(hbl_forest_parse(s.p, rep["forest"].dump().c_str(), &g) == HBL_OK);
  hbl_forest_free(g);

  REQUIRE(hbl_function_generate(s.p, R"({"kind": "log_distance", "origin": "0"})", &out) == HBL_OK);
  const std::string fn = take(out);
  char* csv = nullptr;
  REQUIRE(hbl_maximal(s.p, f, fn.c_str(), nullptr, &out, &csv) == HBL_OK);
  CHECK(json::parse(take(out)).contains("weak_type"));
  CHECK(take(csv).rfind("alpha,lhs,rhs,ratio,status,provenance", 0) == 0);
  REQUIRE(hbl_jn(s.p, f, fn.c_str(), R"({"r0": 1, "beta": 0.75})", &out, nullptr) == HBL_OK);
  take(out);

  Space other(R"({"generator": "path", "n": 4})");
  CHECK(hbl_forest_report(other.p, f, &out) == HBL_ERR_INVALID_PARAMETER);
  hbl_forest_free(f);
}

TEST_CASE("kernels through the C interface") {
  Space s(R"({"generator": "path", "n": 6})");
  hbl_kernel* k = nullptr;
  REQUIRE(hbl_kernel_multiplier(s.p, R"({"kind": "heat", "t": 1})", &k) == HBL_OK);
  char* out = nullptr;
  REQUIRE(hbl_kernel_to_json(s.p, k, &out) == HBL_OK);
  const std::string text = take(out);
  hbl_kernel* back = nullptr;
  REQUIRE(hbl_kernel_parse(s.p, text.c_str(), &back) == HBL_OK);
  REQUIRE(hbl_kernel_report(s.p, back, 2.0, 8, 1, &out) == HBL_OK);
  CHECK(json::parse(take(out)).contains("nu"));
  CHECK(hbl_kernel_multiplier(s.p, R"({"kind": "heat", "t": -1})", &k) == HBL_ERR_INVALID_PARAMETER);
  hbl_kernel_free(back);
  hbl_kernel_free(k);
}

TEST_CASE("runs through the C interface") {
  hbl_run_report* r = nullptr;
  const char* cfg = R"({"space": {"generator": "path", "n": 12}, "seed": 5, "suites": ["geometry", "dyadic"]})";
  REQUIRE(hbl_run(cfg, 0, &r) == HBL_OK);
  CHECK(hbl_run_exit_code(r) == 0);
  CHECK(hbl_run_hard_failure_count(r) == 0);
  char* out = nullptr;
  REQUIRE(hbl_run_report_json(r, &out) == HBL_OK);
  const std::string a = take(out);
  CHECK(json::parse(a)["status"] == "pass");
  REQUIRE(hbl_run_timing_json(r, &out) == HBL_OK);
  take(out);
  hbl_run_report_free(r);

  REQUIRE(hbl_run(cfg, 1, &r) == HBL_OK);
  REQUIRE(hbl_run_report_json(r, &out) == HBL_OK);
  CHECK(take(out) == a);
  hbl_run_report_free(r);

  CHECK(hbl_run(R"({"space": {"generator": "path", "n": 4}, "typo": 1})", 0, &r) == HBL_ERR_INVALID_PARAMETER);
  CHECK(std::string(hbl_last_error()).find("typo") != std::string::npos);
}
