#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result hbl(const std::string& args) {
  const std::string cmd = std::string(HBL_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

struct Workdir {
  fs::path dir;
  Workdir() {
    dir = fs::temp_directory_path() / ("hbl_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workdir() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("generate, norms and pairing") {
  Workdir w;
  REQUIRE(hbl("generate --kind path --n 3 --out " + (w / "p3.json")).code == 0);
  put(w / "g.json", R"({"values": {"0": 1, "1": -2, "2": 1}})");
  put(w / "f.json", R"({"values": {"0": 0, "1": -2, "2": 0}})");
  auto r = hbl("h1-norm --space " + (w / "p3.json") + " --g " + (w / "g.json") + " --b 1.5 --terms");
  REQUIRE(r.code == 0);
  const auto h = json::parse(r.out);
  CHECK(h["value"]["value"] == "4");
  CHECK(h.contains("terms"));
  r = hbl("bmo-norm --space " + (w / "p3.json") + " --f " + (w / "f.json") + " --q 1 --b 1.5");
  REQUIRE(r.code == 0);
  r = hbl("pairing --space " + (w / "p3.json") + " --f " + (w / "f.json") + " --g " + (w / "g.json") + " --b 1.5");
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["holds"] == true);
}

TEST_CASE("forest, maximal and John-Nirenberg subcommands") {
  Workdir w;
  REQUIRE(hbl("generate --kind tree --q 3 --depth 4 --out " + (w / "t.json")).code == 0);
  auto r = hbl("forest --space " + (w / "t.json") + " --delta 0.5");
  REQUIRE(r.code == 0);
  const auto fr = json::parse(r.out);
  CHECK(fr["verification"]["ok"] == true);
  put(w / "forest.json", fr["forest"].dump());
  r = hbl("function --space " + (w / "t.json") + " --kind log_distance --point 0 --out " + (w / "f.json"));
  REQUIRE(r.code == 0);
  r = hbl("maximal --space " + (w / "t.json") + " --forest " + (w / "forest.json") + " --f " + (w / "f.json") +
          " --k-floor auto --csv " + (w / "gl.csv"));
  REQUIRE(r.code == 0);
  CHECK(slurp(w / "gl.csv").rfind("alpha,lhs,rhs,ratio,status,provenance", 0) == 0);
  r = hbl("jn --space " + (w / "t.json") + " --forest " + (w / "forest.json") + " --f " + (w / "f.json") +
          " --r0 1 --beta 0.75");
  REQUIRE(r.code == 0);
  r = hbl("geometry --space " + (w / "t.json") + " --b 5 --c 3.5 --r0 1 --beta 0.7");
  REQUIRE(r.code == 0);
}

TEST_CASE("operator subcommand writes and rereads kernels") {
  Workdir w;
  REQUIRE(hbl("generate --kind grid --d 2 --n 3 --out " + (w / "g.json")).code == 0);
  auto r = hbl("operator --space " + (w / "g.json") + " --kind heat --t 0.5 --b 2 --samples 8 --kernel-out " +
               (w / "k.json"));
  REQUIRE(r.code == 0);
  const auto a = json::parse(r.out);
  r = hbl("operator --space " + (w / "g.json") + " --kernel " + (w / "k.json") + " --b 2 --samples 8");
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["nu"] == a["nu"]);
}

TEST_CASE("run writes reproducible reports") {
  Workdir w;
  put(w / "cfg.json", R"({"space": {"generator": "tree", "q": 3, "depth": 3}, "seed": 2,
                         "suites": ["geometry", "dyadic", "maximal"]})");
  REQUIRE(hbl("run --config " + (w / "cfg.json") + " --out " + (w / "a")).code == 0);
  REQUIRE(hbl("run --parallel --config " + (w / "cfg.json") + " --out " + (w / "b")).code == 0);
  const std::string ra = slurp(w / "a/report.json");
  CHECK_FALSE(ra.empty());
  CHECK(ra == slurp(w / "b/report.json"));
  CHECK(fs::exists(w / "a/timing.json"));
}

TEST_CASE("exit codes") {
  Workdir w;
  CHECK(hbl("").code == 2);
  CHECK(hbl("frobnicate").code == 2);
  CHECK(hbl("generate --kind tree --q 1 --depth 2").code == 2);
  put(w / "bad.json", R"({"space": {"generator": "path", "n": 4}, "unknown": 1})");
  CHECK(hbl("run --config " + (w / "bad.json")).code == 2);
  put(w / "asym.json", R"({"points": ["a", "b"], "weights": [1, 1], "dist": [[0, 1], [2, 0]]})");
  CHECK(hbl("forest --space " + (w / "asym.json")).code == 3);
}
