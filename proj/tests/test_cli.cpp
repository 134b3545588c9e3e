#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "nvw/csv.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using doctest::Approx;

namespace {

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("nvw_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  fs::path write(const std::string& name, const json& j) const {
    std::ofstream(dir / name) << j.dump();
    return dir / name;
  }
};

int run(const std::string& args) {
  const std::string cmd = std::string(NVW_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json box_config(const fs::path& out) {
  return {{"law", {{"kind", "liquid_crystal"}, {"alpha", 0.2}, {"beta", 0.1}}},
          {"initial", {{"preset", "box-example"}}},
          {"s_range", {-5.0, 7.5}},
          {"N", 50},
          {"times", {0.0, 1.0, -1.5}},
          {"output_dir", out.string()}};
}

nvw::CsvTable read_table(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return nvw::read_csv(in);
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return json::parse(in);
}

using Header = std::vector<std::string>;

}  // namespace

TEST_CASE("solve writes every artifact with the documented layout") {
  unsetenv("NVW_OUTPUT_DIR");
  Workspace ws;
  const fs::path out = ws.dir / "out";
  REQUIRE(run("solve " + ws.write("box.json", box_config(out)).string()) == 0);

  auto grid = read_table(out / "grid.csv");
  CHECK(grid.header == Header{"i", "j", "X", "Y", "t", "x", "U", "J", "K"});
  CHECK(grid.rows.size() == 51 * 51);

  for (const char* T : {"0", "1", "-1.5"}) {
    CAPTURE(T);
    auto snap = read_table(out / ("snapshot_" + std::string(T) + ".csv"));
    CHECK(snap.header == Header{"x", "u", "R", "S"});
    CHECK(snap.rows.size() >= 2);
    auto m = read_json(out / ("measures_" + std::string(T) + ".json"));
    for (const char* key : {"T", "mu", "nu", "energy"}) CHECK(m.contains(key));
    CHECK(m["energy"].get<double>() == Approx(3.0));
    for (const char* key : {"breakpoints", "densities", "atoms"}) CHECK(m["mu"].contains(key));
  }

  auto iso = read_table(out / "isotimes.csv");
  CHECK(iso.header == Header{"T", "k", "i", "j", "X", "Y", "t", "x"});
  CHECK_FALSE(iso.rows.empty());
  auto chars = read_table(out / "characteristics.csv");
  CHECK(chars.header == Header{"family", "index", "X", "Y", "x", "t"});
  for (const auto& row : chars.rows) CHECK((row[0] == 0.0 || row[0] == 1.0));
  auto surf = read_table(out / "surface.csv");
  CHECK(surf.header == Header{"i", "j", "t", "x", "U"});

  auto diag = read_json(out / "diagnostics.json");
  for (const char* key : {"N", "h", "s_range", "initial_energy", "residuals", "energy"}) {
    CHECK(diag.contains(key));
  }
  CHECK(diag["N"] == 50);
  CHECK(diag["h"].get<double>() == Approx(0.25));
  CHECK(diag["initial_energy"].get<double>() == Approx(3.0));
  for (const auto& e : diag["energy"]) CHECK(e["energy"].get<double>() == Approx(3.0));
  for (const char* key : {"x_t_X", "x_t_Y", "J_K_X", "J_K_Y", "energy_X", "energy_Y"}) {
    CHECK(diag["residuals"].contains(key));
  }
}

TEST_CASE("emit flags and the output directory override") {
  Workspace ws;
  json cfg = box_config(ws.dir / "ignored");
  cfg["emit"] = {{"grid", false}, {"surface", false}, {"characteristics", false}};
  const auto path = ws.write("box.json", cfg);
  const fs::path redirected = ws.dir / "redirected";
  setenv("NVW_OUTPUT_DIR", redirected.c_str(), 1);
  const int rc = run("solve " + path.string());
  unsetenv("NVW_OUTPUT_DIR");
  REQUIRE(rc == 0);
  CHECK_FALSE(fs::exists(ws.dir / "ignored"));
  CHECK(fs::exists(redirected / "snapshot_1.csv"));
  CHECK(fs::exists(redirected / "isotimes.csv"));
  CHECK_FALSE(fs::exists(redirected / "grid.csv"));
  CHECK_FALSE(fs::exists(redirected / "surface.csv"));
  CHECK_FALSE(fs::exists(redirected / "characteristics.csv"));
}

TEST_CASE("convergence study") {
  unsetenv("NVW_OUTPUT_DIR");
  Workspace ws;
  const fs::path out = ws.dir / "out";
  json cfg = {{"law", {{"kind", "constant"}, {"c0", 1.0}}},
              {"initial",
               {{"grid", {-4.0, 0.0, 1.0, 5.0}},
                {"u", {0.0, 0.0, 0.0, 0.0}},
                {"R", {0.0, 1.0, 0.0, 0.0}},
                {"S", {0.0, 1.0, 0.0, 0.0}}}},
              {"times", {0.5, 1.0}},
              {"output_dir", out.string()}};
  const auto path = ws.write("dal.json", cfg);
  REQUIRE(run("convergence --n 16,32,64 " + path.string()) == 0);
  auto rep = read_json(out / "convergence.json");
  for (const char* key : {"law", "s_range", "times", "runs", "order_nodes", "order_u",
                          "order_residuals", "node_reference", "u_reference"}) {
    CHECK(rep.contains(key));
  }
  CHECK(rep["u_reference"] == "closed form");
  REQUIRE(rep["runs"].size() == 3);
  CHECK(rep["runs"][0]["N"] == 16);
  CHECK(rep["runs"][2]["u_error"].get<double>() < rep["runs"][0]["u_error"].get<double>());
  CHECK(fs::exists(out / "convergence.txt"));

  CHECK(run("convergence --n 16,32 " + path.string()) == 2);
  CHECK(run("convergence --n 32,16,64 " + path.string()) == 2);
  CHECK(run("convergence --n 16,abc,64 " + path.string()) == 2);
}

TEST_CASE("audit report") {
  unsetenv("NVW_OUTPUT_DIR");
  Workspace ws;
  const fs::path out = ws.dir / "out";
  json cfg = box_config(out);
  cfg["N"] = 16;
  cfg["audit_time"] = 1.0;
  cfg.erase("s_range");
  REQUIRE(run("audit " + ws.write("box.json", cfg).string()) == 0);
  auto rep = read_json(out / "audit.json");
  for (const char* key : {"M_of_L", "D_of_C", "Pi_idempotence", "relabel_invariance", "semigroup"}) {
    CHECK(rep.contains(key));
  }
  CHECK(rep["D_of_C"].get<double>() <= 1e-9);
  CHECK(rep["Pi_idempotence"].get<double>() <= 1e-12);
  CHECK(rep["relabel_invariance"].get<double>() <= 1e-8);
  for (const char* key : {"u", "R", "S", "mu", "nu"}) CHECK(rep["M_of_L"][key].get<double>() <= 1e-9);
  CHECK(rep["semigroup"]["runs"].size() == 2);
}

TEST_CASE("failures map to exit codes") {
  unsetenv("NVW_OUTPUT_DIR");
  Workspace ws;
  // Missing config file.
  CHECK(run("solve " + (ws.dir / "absent.json").string()) == 4);
  // Malformed JSON and semantic errors.
  {
    std::ofstream(ws.dir / "broken.json") << "{";
  }
  CHECK(run("solve " + (ws.dir / "broken.json").string()) == 2);
  json cfg = box_config(ws.dir / "out");
  cfg["N"] = 2;
  CHECK(run("solve " + ws.write("small.json", cfg).string()) == 2);
  cfg = box_config(ws.dir / "out");
  cfg["s_range"] = {-1.0, 3.0};
  CHECK(run("solve " + ws.write("range.json", cfg).string()) == 2);
  // Output directory below a regular file cannot be created.
  {
    std::ofstream(ws.dir / "plainfile") << "x";
  }
  cfg = box_config(ws.dir / "plainfile" / "out");
  CHECK(run("solve " + ws.write("io.json", cfg).string()) == 4);
  // Usage errors.
  CHECK(run("") != 0);
  CHECK(run("frobnicate x.json") != 0);
}
