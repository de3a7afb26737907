#include <CLI11.hpp>
#include <cstdio>
#include <fstream>

#include "cslab/commands.hpp"

namespace {

using cslab::RunConfig;

void add_common_options(CLI::App* cmd, RunConfig& cfg, std::string& config_path) {
  cmd->add_option("--config", config_path, "JSON run configuration (flags override it)");
  cmd->add_option("--s", cfg.s, "fractional order s in (0,1)");
  cmd->add_option("--ntheta", cfg.n_theta, "theta nodes");
  cmd->add_option("--nphi", cfg.n_phi, "phi nodes (even)");
  cmd->add_option("--gamma", cfg.grading_gamma, "theta grading exponent (0 = auto)");
  cmd->add_option("--out", cfg.out_dir, "output directory (default $CSLAB_OUT or .)");
  cmd->add_option("--seed", cfg.seed, "seed for random-field suites");
}

/// Re-parse order: defaults -> config file -> explicit flags.
RunConfig merge_config(const CLI::App* cmd, const RunConfig& parsed,
                       const std::string& config_path) {
  if (config_path.empty()) return parsed;
  RunConfig cfg = RunConfig::from_file(config_path);
  auto take = [&](const char* flag, auto member) {
    if (cmd->count(flag) > 0) cfg.*member = parsed.*member;
  };
  take("--s", &RunConfig::s);
  take("--ntheta", &RunConfig::n_theta);
  take("--nphi", &RunConfig::n_phi);
  take("--gamma", &RunConfig::grading_gamma);
  take("--out", &RunConfig::out_dir);
  take("--seed", &RunConfig::seed);
  take("--nr", &RunConfig::n_r);
  take("--rmin", &RunConfig::r_min);
  take("--k", &RunConfig::k_list);
  take("--kmax", &RunConfig::k_max);
  take("--beta", &RunConfig::beta_ladder);
  take("--omega", &RunConfig::omega_spec);
  take("--method", &RunConfig::method);
  take("--field", &RunConfig::field_file);
  take("--max-outer", &RunConfig::max_outer);
  take("--ladder", &RunConfig::radius_ladder);
  take("--tol", &RunConfig::sym_tol);
  take("--max-iter", &RunConfig::sym_max_iter);
  return cfg;
}

void write_error_json(const RunConfig& cfg, const std::string& kind, const std::string& what) {
  try {
    std::filesystem::create_directories(cfg.resolved_out_dir());
    std::ofstream out(std::filesystem::path(cfg.resolved_out_dir()) / "error.json");
    out << nlohmann::json{{"error", kind}, {"message", what}}.dump(2) << '\n';
  } catch (...) {
    // the stderr line below is the fallback
  }
}

int run_guarded(const RunConfig& cfg, int (*fn)(const RunConfig&)) {
  try {
    return fn(cfg);
  } catch (const cslab::ValidationError& e) {
    write_error_json(cfg, "validation", e.what());
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return cslab::exit_validation;
  } catch (const cslab::SolverError& e) {
    write_error_json(cfg, "solver", e.what());
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return cslab::exit_solver;
  } catch (const cslab::PropertyViolation& e) {
    write_error_json(cfg, "property", e.what());
    std::fprintf(stderr, "property violation: %s\n", e.what());
    return cslab::exit_property;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cslab: spectral and competition laboratory for the weighted extension operator"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;

  auto* eig = app.add_subcommand("eig", "first eigenvalues of the weighted spherical operator");
  add_common_options(eig, cfg, config_path);
  eig->add_option("--k", cfg.k_list, "symmetry orders");
  eig->add_option("--omega", cfg.omega_spec, "empty|full|half|arcs:lo,hi;lo,hi");
  eig->add_option("--method", cfg.method, "plain|symmetric|folded|both");

  auto* sweep = app.add_subcommand("sweep", "eigenvalue chain over the symmetry order k");
  add_common_options(sweep, cfg, config_path);
  sweep->add_option("--kmax", cfg.k_max, "largest symmetry order")->required();

  auto* compete = app.add_subcommand("compete", "boundary competition system on the half ball");
  add_common_options(compete, cfg, config_path);
  compete->add_option("--k", cfg.k_list, "symmetry orders");
  compete->add_option("--beta", cfg.beta_ladder, "competition parameters");
  compete->add_option("--nr", cfg.n_r, "radial shells");
  compete->add_option("--rmin", cfg.r_min, "innermost shell radius");
  compete->add_option("--max-outer", cfg.max_outer, "outer iteration budget");
  compete->add_option("--ladder", cfg.radius_ladder, "frequency trace length");

  auto* symmetrize = app.add_subcommand("symmetrize", "foliated Schwarz symmetrization demo");
  add_common_options(symmetrize, cfg, config_path);
  symmetrize->add_option("--field", cfg.field_file, "input field CSV (default: seeded random)");
  symmetrize->add_option("--tol", cfg.sym_tol, "polarization distance tolerance");
  symmetrize->add_option("--max-iter", cfg.sym_max_iter, "polarization budget (0 = 10 n_phi)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cslab::exit_validation;
  }

  try {
    if (eig->parsed()) return run_guarded(merge_config(eig, cfg, config_path), cslab::cmd_eig);
    if (sweep->parsed()) return run_guarded(merge_config(sweep, cfg, config_path), cslab::cmd_sweep);
    if (compete->parsed()) {
      return run_guarded(merge_config(compete, cfg, config_path), cslab::cmd_compete);
    }
    if (symmetrize->parsed()) {
      return run_guarded(merge_config(symmetrize, cfg, config_path), cslab::cmd_symmetrize);
    }
  } catch (const cslab::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return cslab::exit_validation;
  }
  return cslab::exit_validation;
}
