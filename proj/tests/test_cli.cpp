#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "cslab/commands.hpp"

using namespace cslab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cslab_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config validation and exit codes", "[cli]") {
  RunConfig cfg;
  cfg.out_dir = fresh_dir("validate").string();

  SECTION("s out of range") {
    cfg.s = 1.5;
    CHECK_THROWS_AS(cmd_eig(cfg), ValidationError);
  }
  SECTION("k must divide n_phi/2") {
    cfg.k_list = {5};
    cfg.n_phi = 128;
    CHECK_THROWS_AS(cfg.validate_common(), ValidationError);
  }
  SECTION("odd n_phi") {
    cfg.n_phi = 127;
    CHECK_THROWS_AS(cfg.validate_common(), ValidationError);
  }
  SECTION("negative beta") {
    cfg.beta_ladder = {-1.0};
    CHECK_THROWS_AS(cfg.validate_common(), ValidationError);
  }
  SECTION("sweep requires a positive kmax") {
    cfg.k_max = 0;
    CHECK_THROWS_AS(cmd_sweep(cfg), ValidationError);
  }
}

TEST_CASE("eig command writes the eigenvalue table", "[cli]") {
  RunConfig cfg;
  cfg.s = 0.5;
  cfg.n_theta = 24;
  cfg.n_phi = 48;
  cfg.k_list = {1};
  cfg.out_dir = fresh_dir("eig").string();
  REQUIRE(cmd_eig(cfg) == exit_ok);

  const std::string csv = slurp(fs::path(cfg.out_dir) / "eig" / "eig.csv");
  CHECK(csv.find("# config=" + cfg.hash()) == 0);
  auto doc = nlohmann::json::parse(slurp(fs::path(cfg.out_dir) / "eig" / "eig.json"));
  CHECK(std::abs(doc["rows"][0]["lambda"].get<double>() - 0.75) < 0.03);
  CHECK(fs::exists(fs::path(cfg.out_dir) / "eig" / "eigenfunction_0.bin"));

  SECTION("empty omega gives lambda near 2sN") {
    RunConfig c2 = cfg;
    c2.omega_spec = "empty";
    c2.out_dir = fresh_dir("eig_empty").string();
    REQUIRE(cmd_eig(c2) == exit_ok);
    auto doc = nlohmann::json::parse(slurp(fs::path(c2.out_dir) / "eig" / "eig.json"));
    CHECK(std::abs(doc["rows"][0]["lambda"].get<double>() - 2.0) < 0.05);
  }
}

TEST_CASE("determinism: identical config and seed give identical bytes", "[cli]") {
  RunConfig cfg;
  cfg.n_theta = 16;
  cfg.n_phi = 32;
  cfg.seed = 17;

  cfg.out_dir = fresh_dir("det_a").string();
  REQUIRE(cmd_symmetrize(cfg) == exit_ok);
  RunConfig cfg2 = cfg;
  cfg2.out_dir = fresh_dir("det_b").string();
  REQUIRE(cmd_symmetrize(cfg2) == exit_ok);

  // header hash depends on out_dir, so compare below the header
  auto tail = [](std::string s) { return s.substr(s.find('\n') + 1); };
  CHECK(tail(slurp(fs::path(cfg.out_dir) / "symmetrize" / "trace.csv")) ==
        tail(slurp(fs::path(cfg2.out_dir) / "symmetrize" / "trace.csv")));
  CHECK(slurp(fs::path(cfg.out_dir) / "symmetrize" / "symmetrized.csv") ==
        slurp(fs::path(cfg2.out_dir) / "symmetrize" / "symmetrized.csv"));
}

TEST_CASE("symmetrize on an already symmetric field stops at iteration zero", "[cli]") {
  RunConfig cfg;
  cfg.n_theta = 16;
  cfg.n_phi = 32;
  cfg.out_dir = fresh_dir("sym_fix").string();

  auto grid = build_hemisphere_grid(cfg.n_theta, cfg.n_phi, FractionalParams::make(cfg.s));
  auto f = foliated_schwarz(detail::seeded_random_field(grid, 5), grid);
  const fs::path field = fs::path(cfg.out_dir) / "input.csv";
  write_field_csv(f, field.string());
  cfg.field_file = field.string();
  REQUIRE(cmd_symmetrize(cfg) == exit_ok);

  auto report = nlohmann::json::parse(slurp(fs::path(cfg.out_dir) / "symmetrize" / "report.json"));
  CHECK(report["polarization_iterations"] == 0);
  CHECK(report["norm_conserved"] == true);
  // output equals input (already arranged)
  auto out = read_field_csv(grid, (fs::path(cfg.out_dir) / "symmetrize" / "symmetrized.csv").string());
  CHECK((out.values == f.values).all());
}

TEST_CASE("malformed field files are rejected with a line number", "[cli]") {
  RunConfig cfg;
  cfg.n_theta = 16;
  cfg.n_phi = 32;
  cfg.out_dir = fresh_dir("sym_bad").string();
  const fs::path field = fs::path(cfg.out_dir) / "bad.csv";
  {
    std::ofstream out(field);
    out << "theta_index,phi_index,value\n0,0,0.5\ngarbage,row\n";
  }
  cfg.field_file = field.string();
  CHECK_THROWS_WITH(cmd_symmetrize(cfg), Catch::Matchers::ContainsSubstring(":3:"));
}

TEST_CASE("sweep command emits the chain and the summary", "[cli]") {
  RunConfig cfg;
  cfg.s = 0.5;
  cfg.n_theta = 24;
  cfg.n_phi = 48;
  cfg.k_max = 4;
  cfg.out_dir = fresh_dir("sweep").string();
  REQUIRE(cmd_sweep(cfg) == exit_ok);
  auto doc = nlohmann::json::parse(slurp(fs::path(cfg.out_dir) / "sweep" / "sweep.json"));
  CHECK(doc["summary"]["lambda_nondecreasing"] == true);
  CHECK(doc["summary"]["d_below_2s"] == true);
  CHECK(doc["summary"]["gap_nonincreasing"] == true);
  CHECK(doc["rows"].size() == 4);  // k in {1,2,3,4} on 48 phi nodes
}

TEST_CASE("compete command writes the diagnostic bundle", "[cli]") {
  RunConfig cfg;
  cfg.s = 0.5;
  cfg.n_theta = 16;
  cfg.n_phi = 32;
  cfg.n_r = 24;
  cfg.r_min = 1e-2;
  cfg.k_list = {1};
  cfg.beta_ladder = {100.0};
  cfg.out_dir = fresh_dir("compete").string();
  REQUIRE(cmd_compete(cfg) == exit_ok);

  const fs::path dir = fs::path(cfg.out_dir) / "compete" / "k1_beta100";
  auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["converged"] == true);
  CHECK(manifest["positive_interior"] == true);
  CHECK(manifest["frequency_monotone"] == true);
  CHECK(manifest["two_I_over_d"].get<double>() <= 1.02);
  CHECK(manifest["doubling"]["ok"] == true);
  CHECK(fs::exists(dir / "trace.csv"));
  CHECK(fs::exists(dir / "convergence.csv"));
  CHECK(fs::exists(dir / "u.bin"));
}

TEST_CASE("config file round trip with flag overrides", "[cli]") {
  RunConfig cfg;
  cfg.s = 0.25;
  cfg.n_theta = 20;
  auto j = cfg.to_json();
  auto back = RunConfig::from_json(j);
  CHECK(back.s == cfg.s);
  CHECK(back.n_theta == cfg.n_theta);
  CHECK(back.hash() == cfg.hash());
}

TEST_CASE("the built binary honors the exit-code contract", "[cli]") {
  const std::string tool = CSLAB_TOOL_PATH;
  const fs::path dir = fresh_dir("binary");
  const std::string base = tool + " eig --ntheta 16 --nphi 32 --out " + dir.string();
  CHECK(std::system((base + " --s 0.5 --k 1 > /dev/null 2>&1").c_str()) == 0);
  const int bad = std::system((base + " --s 1.5 --k 1 > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(bad) == exit_validation);
  // machine-readable error document
  auto err = nlohmann::json::parse(slurp(dir / "error.json"));
  CHECK(err["error"] == "validation");
}
