// Integration tests driving the built CLI binary.
#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("pdspec_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(PDSPEC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& content) {
  const fs::path p = dir / name;
  std::ofstream out(p);
  out << content;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kQuickSolve =
    "grid.n = 128\n"
    "solver.t_max = 0.05\n"
    "solver.dt = 5e-4\n"
    "solver.snapshots = [0.02, 0.05]\n";

}  // namespace

TEST_CASE("solve writes artifacts and succeeds", "[cli]") {
  TempDir tmp;
  const fs::path cfg = write_file(tmp.path, "run.cfg", kQuickSolve);
  const fs::path out = tmp.path / "out";
  REQUIRE(run_cli("solve --config " + cfg.string() + " --out " + out.string()) == 0);

  CHECK(fs::exists(out / "snapshots.csv"));
  CHECK(fs::exists(out / "error_series.csv"));
  CHECK(fs::exists(out / "error_profile.csv"));
  REQUIRE(fs::exists(out / "manifest.json"));

  const std::string header = slurp(out / "snapshots.csv").substr(0, 14);
  CHECK(header == "t,x,y,exact\n-0");  // exact column present for manufactured problems

  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["command"] == "solve");
  CHECK(manifest["derived"]["status"] == "completed");
  CHECK(manifest["config"]["solver.dt"] == 5e-4);
  CHECK(manifest["derived"]["beta"].get<double>() > 0.0);
}

TEST_CASE("re-running from a manifest reproduces the outputs", "[cli]") {
  TempDir tmp;
  const fs::path cfg = write_file(tmp.path, "run.cfg", kQuickSolve);
  const fs::path out1 = tmp.path / "out1";
  const fs::path out2 = tmp.path / "out2";
  REQUIRE(run_cli("solve --config " + cfg.string() + " --out " + out1.string()) == 0);
  REQUIRE(run_cli("solve --config " + (out1 / "manifest.json").string() + " --out " +
                  out2.string()) == 0);
  CHECK(slurp(out1 / "snapshots.csv") == slurp(out2 / "snapshots.csv"));
  CHECK(slurp(out1 / "error_series.csv") == slurp(out2 / "error_series.csv"));
  CHECK(slurp(out1 / "error_profile.csv") == slurp(out2 / "error_profile.csv"));
}

TEST_CASE("config errors exit with code 1", "[cli]") {
  TempDir tmp;
  SECTION("malformed line") {
    const fs::path cfg = write_file(tmp.path, "bad.cfg", "grid.n = 128\nwhat is this\n");
    CHECK(run_cli("solve --config " + cfg.string() + " --out " + (tmp.path / "o").string()) == 1);
  }
  SECTION("unknown key") {
    const fs::path cfg = write_file(tmp.path, "bad.cfg", "grid.m = 128\n");
    CHECK(run_cli("solve --config " + cfg.string() + " --out " + (tmp.path / "o").string()) == 1);
  }
  SECTION("time step above the stability bound") {
    const fs::path cfg = write_file(tmp.path, "bad.cfg", "solver.dt = 1e-2\n");
    CHECK(run_cli("solve --config " + cfg.string() + " --out " + (tmp.path / "o").string()) == 1);
  }
  SECTION("missing subcommand") {
    CHECK(run_cli("") == 1);
  }
}

TEST_CASE("check-operator passes on the default configuration", "[cli]") {
  TempDir tmp;
  REQUIRE(run_cli("check-operator --set analysis.check_n=[128,256] --set analysis.check_fields=20"
                  " --out " + (tmp.path / "o").string()) == 0);
  const auto manifest = nlohmann::json::parse(slurp(tmp.path / "o" / "manifest.json"));
  CHECK(manifest["derived"]["passed"].get<bool>());
  CHECK(manifest["derived"]["max_rel_discrepancy"].get<double>() <= 1e-10);
}

TEST_CASE("check-operator flags an inadmissible kernel with exit 2", "[cli]") {
  TempDir tmp;
  // Negative-lobe kernel table; beta matches its trapezoidal integral (130).
  write_file(tmp.path, "kernel.csv",
             "0.0,3000\n0.05,1000\n0.1,-1200\n0.15,0\n0.2,0\n");
  const fs::path cfg = write_file(tmp.path, "run.cfg",
                                  "kernel.family = custom\n"
                                  "kernel.samples_path = " + (tmp.path / "kernel.csv").string() +
                                  "\nkernel.beta = 130\n");
  CHECK(run_cli("check-operator --config " + cfg.string() + " --set analysis.check_n=[256]" +
                " --set analysis.check_fields=5 --out " + (tmp.path / "o").string()) == 2);
}

TEST_CASE("bench and sweeps write their CSV artifacts", "[cli]") {
  TempDir tmp;
  SECTION("bench") {
    const fs::path out = tmp.path / "bench";
    REQUIRE(run_cli("bench --set analysis.bench_n=[256,512,1024] --set analysis.bench_reps=3"
                    " --out " + out.string()) == 0);
    const std::string csv = slurp(out / "benchmark.csv");
    CHECK(csv.find("n,method,seconds") == 0);
    CHECK(csv.find("quadrature") != std::string::npos);
    CHECK(csv.find("spectral") != std::string::npos);
  }
  SECTION("sweep-eps") {
    const fs::path out = tmp.path / "eps";
    REQUIRE(run_cli("sweep-eps --set grid.n=128 --set solver.t_max=0.2 --out " + out.string()) ==
            0);
    const std::string csv = slurp(out / "convergence.csv");
    CHECK(csv.find("param,error") == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  }
  SECTION("sweep-grid") {
    const fs::path out = tmp.path / "grid";
    REQUIRE(run_cli("sweep-grid --set analysis.n_list=[64,128,256] --set solver.t_max=0.1"
                    " --set solver.eps=1e-4 --out " + out.string()) == 0);
    const std::string csv = slurp(out / "convergence.csv");
    CHECK(csv.find("param,error") == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  }
}

TEST_CASE("custom problem via config", "[cli]") {
  TempDir tmp;
  write_file(tmp.path, "initial.csv", "-1.2,0\n-1.0,0\n0.0,1\n1.0,0\n1.2,0\n");
  const fs::path cfg = write_file(tmp.path, "run.cfg",
                                  "problem.kind = custom\n"
                                  "problem.initial_path = " + (tmp.path / "initial.csv").string() +
                                  "\n"
                                  "bc.left.kind = dirichlet\n"
                                  "bc.left.value = 0\n"
                                  "bc.right.kind = neumann\n"
                                  "bc.right.value = 0\n"
                                  "grid.n = 128\n"
                                  "solver.t_max = 0.05\n"
                                  "solver.record_error = false\n");
  const fs::path out = tmp.path / "o";
  REQUIRE(run_cli("solve --config " + cfg.string() + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "snapshots.csv"));
  CHECK_FALSE(fs::exists(out / "error_series.csv"));  // no exact reference
  const std::string header = slurp(out / "snapshots.csv").substr(0, 6);
  CHECK(header == "t,x,y\n");
}
