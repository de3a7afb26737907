#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "cslab/almgren.hpp"
#include "cslab/field_io.hpp"
#include "cslab/rearrange.hpp"
#include "cslab/run_config.hpp"
#include "cslab/sphere_beta.hpp"

namespace cslab {

/// Exit-code contract of the CLI.
enum ExitCode : int {
  exit_ok = 0,
  exit_validation = 2,
  exit_solver = 3,
  exit_property = 4,
};

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
  return out;
}

inline std::string table_header(const RunConfig& cfg, bool with_ball = false) {
  std::string h = "# config=" + cfg.hash() + " s=" + fmt_double(cfg.s) +
                  " n_theta=" + std::to_string(cfg.n_theta) +
                  " n_phi=" + std::to_string(cfg.n_phi);
  if (with_ball) {
    h += " n_r=" + std::to_string(cfg.n_r) + " r_min=" + fmt_double(cfg.r_min);
  }
  return h + "\n";
}

inline ArcSet parse_omega(const std::string& spec, int n_phi) {
  if (spec == "empty") return ArcSet::empty();
  if (spec == "full") return ArcSet::full_circle();
  if (spec.empty() || spec == "half") return canonical_omega_k(1);
  const std::string prefix = "arcs:";
  if (spec.rfind(prefix, 0) != 0) {
    throw ValidationError("omega: expected empty|full|half|arcs:lo,hi;lo,hi (got '" + spec + "')");
  }
  std::vector<Arc> arcs;
  std::string body = spec.substr(prefix.size());
  size_t pos = 0;
  while (pos < body.size()) {
    size_t end = body.find(';', pos);
    if (end == std::string::npos) end = body.size();
    const std::string piece = body.substr(pos, end - pos);
    double lo, hi;
    if (std::sscanf(piece.c_str(), "%lf,%lf", &lo, &hi) != 2) {
      throw ValidationError("omega: malformed arc '" + piece + "'");
    }
    arcs.push_back({lo, hi});
    pos = end + 1;
  }
  // user-supplied arcs snap to the nearest node coordinate
  return ArcSet(std::move(arcs)).snapped_to(n_phi);
}

inline ScalarField seeded_random_field(const HemisphereGrid& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ScalarField f = make_field(grid);
  for (int j = 0; j + 1 < f.n_theta; ++j) {
    for (int i = 0; i < f.n_phi; ++i) {
      f.at(j, i) = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    }
  }
  const double pole = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  for (int i = 0; i < f.n_phi; ++i) f.at(f.n_theta - 1, i) = pole;
  return f;
}

}  // namespace detail

/// eig: first-eigenvalue solves, plain (--omega) or k-symmetric/folded (--k).
inline int cmd_eig(const RunConfig& cfg) {
  cfg.validate_common();
  if (cfg.method != "plain" && cfg.method != "symmetric" && cfg.method != "folded" &&
      cfg.method != "both") {
    throw ValidationError("eig: method must be plain|symmetric|folded|both");
  }
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(cfg.resolved_out_dir()) / "eig";
  auto grid = build_hemisphere_grid(cfg.n_theta, cfg.n_phi, FractionalParams::make(cfg.s),
                                    cfg.grading_gamma);

  struct Row {
    std::string method;
    std::string label;
    EigenResult res;
  };
  std::vector<Row> rows;
  if (!cfg.omega_spec.empty()) {
    ArcSet omega = detail::parse_omega(cfg.omega_spec, cfg.n_phi);
    rows.push_back({"plain", cfg.omega_spec, first_eigenvalue(grid, omega)});
  } else {
    for (int k : cfg.k_list) {
      if (cfg.method == "plain") {
        rows.push_back({"plain", "k=" + std::to_string(k),
                        first_eigenvalue(grid, canonical_omega_k(k))});
      }
      if (cfg.method == "symmetric" || cfg.method == "both") {
        rows.push_back({"symmetric", "k=" + std::to_string(k), first_eigenvalue_symmetric(grid, k)});
      }
      if (cfg.method == "folded" || cfg.method == "both") {
        rows.push_back({"folded", "k=" + std::to_string(k), first_eigenvalue_folded(grid, k)});
      }
    }
  }

  auto csv = detail::open_out(dir / "eig.csv");
  csv << detail::table_header(cfg) << "method,case,lambda,d,residual,iterations\n";
  nlohmann::json jrows = nlohmann::json::array();
  for (size_t q = 0; q < rows.size(); ++q) {
    const auto& row = rows[q];
    csv << row.method << ',' << row.label << ',' << fmt_double(row.res.lambda) << ','
        << fmt_double(row.res.exponent_d) << ',' << fmt_double(row.res.residual) << ','
        << row.res.iterations << '\n';
    jrows.push_back({{"method", row.method},
                     {"case", row.label},
                     {"lambda", row.res.lambda},
                     {"d", row.res.exponent_d},
                     {"residual", row.res.residual}});
    const std::string stem = "eigenfunction_" + std::to_string(q);
    write_field_csv(row.res.eigenfunction, (dir / (stem + ".csv")).string());
    write_field_binary(row.res.eigenfunction, (dir / (stem + ".bin")).string());
  }
  auto js = detail::open_out(dir / "eig.json");
  js << nlohmann::json{{"config", cfg.to_json()},
                       {"config_hash", cfg.hash()},
                       {"grid", grid_to_json(grid)},
                       {"rows", jrows}}
            .dump(2)
     << '\n';
  return exit_ok;
}

/// sweep: the eigenvalue chain over admissible k <= k_max with a summary that
/// asserts monotonicity and the 2s ceiling.
inline int cmd_sweep(const RunConfig& cfg) {
  cfg.validate_common();
  if (cfg.k_max < 1) throw ValidationError("sweep: k_max must be >= 1");
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(cfg.resolved_out_dir()) / "sweep";
  auto grid = build_hemisphere_grid(cfg.n_theta, cfg.n_phi, FractionalParams::make(cfg.s),
                                    cfg.grading_gamma);
  auto rows = sweep_k(grid, cfg.k_max);

  auto csv = detail::open_out(dir / "sweep.csv");
  csv << detail::table_header(cfg) << "k,lambda,d,residual,grid_theta,grid_phi,s\n";
  nlohmann::json jrows = nlohmann::json::array();
  for (const auto& row : rows) {
    csv << row.k << ',' << fmt_double(row.lambda) << ',' << fmt_double(row.d) << ','
        << fmt_double(row.residual) << ',' << cfg.n_theta << ',' << cfg.n_phi << ','
        << fmt_double(cfg.s) << '\n';
    jrows.push_back({{"k", row.k}, {"lambda", row.lambda}, {"d", row.d},
                     {"residual", row.residual}});
  }

  bool lambda_monotone = true, d_below = true, gap_monotone = true;
  for (size_t q = 0; q < rows.size(); ++q) {
    if (q > 0 && rows[q].lambda < rows[q - 1].lambda - 1e-12) lambda_monotone = false;
    if (!(rows[q].d < 2.0 * cfg.s)) d_below = false;
    if (q > 0 && (2.0 * cfg.s - rows[q].d) > (2.0 * cfg.s - rows[q - 1].d) + 1e-12) {
      gap_monotone = false;
    }
  }
  auto js = detail::open_out(dir / "sweep.json");
  js << nlohmann::json{{"config", cfg.to_json()},
                       {"config_hash", cfg.hash()},
                       {"rows", jrows},
                       {"summary",
                        {{"lambda_nondecreasing", lambda_monotone},
                         {"d_below_2s", d_below},
                         {"gap_nonincreasing", gap_monotone}}}}
            .dump(2)
     << '\n';
  if (!(lambda_monotone && d_below && gap_monotone)) {
    throw PropertyViolation("sweep: eigenvalue chain violates the monotone ordering or the 2s ceiling");
  }
  return exit_ok;
}

/// compete: full pipeline solve -> r_beta -> blow-up -> frequency trace ->
/// growth rate, one diagnostic bundle per (k, beta).
inline int cmd_compete(const RunConfig& cfg) {
  cfg.validate_common();
  namespace fs = std::filesystem;
  auto grid = build_hemisphere_grid(cfg.n_theta, cfg.n_phi, FractionalParams::make(cfg.s),
                                    cfg.grading_gamma);
  auto ball = build_half_ball_grid(grid, cfg.n_r, cfg.r_min);

  bool property_ok = true;
  for (int k : cfg.k_list) {
    auto eig = first_eigenvalue_symmetric(grid, k);
    for (double beta : cfg.beta_ladder) {
      char tag[64];
      std::snprintf(tag, sizeof(tag), "k%d_beta%g", k, beta);
      const fs::path dir = fs::path(cfg.resolved_out_dir()) / "compete" / tag;

      CompetitionOptions opts;
      opts.max_outer = cfg.max_outer;
      auto state = solve_beta_system(ball, k, beta, eig, opts);
      if (!state.converged) {
        throw SolverError(std::string("compete ") + tag + ": solver did not converge in " +
                          std::to_string(cfg.max_outer) + " iterations");
      }

      auto conv = detail::open_out(dir / "convergence.csv");
      conv << detail::table_header(cfg, true) << "iter,I,interaction,delta\n";
      for (const auto& row : state.log) {
        conv << row.iter << ',' << fmt_double(row.energy) << ',' << fmt_double(row.interaction)
             << ',' << fmt_double(row.delta) << '\n';
      }

      auto trace = frequency_trace(state, default_radius_ladder(state, cfg.radius_ladder));
      auto tcsv = detail::open_out(dir / "trace.csv");
      tcsv << detail::table_header(cfg, true) << "r,E,H,N\n";
      bool monotone = true;
      for (size_t q = 0; q < trace.radii.size(); ++q) {
        tcsv << fmt_double(trace.radii[q]) << ',' << fmt_double(trace.E_vals[q]) << ','
             << fmt_double(trace.H_vals[q]) << ',' << fmt_double(trace.N_vals[q]) << '\n';
        if (trace.dip_flagged[q]) monotone = false;
      }

      nlohmann::json bundle{{"config", cfg.to_json()},
                            {"config_hash", cfg.hash()},
                            {"s", cfg.s},
                            {"k", k},
                            {"beta", beta},
                            {"grid", grid_to_json(grid)},
                            {"n_r", cfg.n_r},
                            {"r_min", cfg.r_min},
                            {"lambda_k", eig.lambda},
                            {"d_k", eig.exponent_d},
                            {"energy", state.energy},
                            {"two_I_over_d", 2.0 * state.energy / eig.exponent_d},
                            {"interaction", state.interaction},
                            {"converged", state.converged},
                            {"positive_interior", state.positive_interior},
                            {"outer_iterations", state.outer_iterations},
                            {"frequency_monotone", monotone}};

      if (beta > 1.0) {
        const double rb = select_r_beta(state);
        auto up = blow_up(state, rb);
        auto est = growth_rate_estimate(up);
        auto doubling = doubling_check(state, state.grid.r.front() * 10.0,
                                       state.grid.r_max, eig.exponent_d);
        bundle["r_beta"] = rb;
        bundle["growth_rate"] = est.rate;
        bundle["growth_rate_h_slope"] = est.h_slope;
        bundle["doubling"] = {{"r1", doubling.r1},
                              {"r2", doubling.r2},
                              {"h_ratio", doubling.h_ratio},
                              {"bound", doubling.bound},
                              {"ok", doubling.ok}};
        if (!doubling.ok) property_ok = false;
      }
      bundle["pohozaev_residual_rmax"] = pohozaev_residual(state, state.grid.r_max);

      // state serialization: flat binaries plus the JSON manifest
      {
        std::ofstream ub(dir / "u.bin", std::ios::binary);
        ub.write(reinterpret_cast<const char*>(state.u.values.data()),
                 static_cast<std::streamsize>(state.u.values.size() * sizeof(double)));
        std::ofstream vb(dir / "v.bin", std::ios::binary);
        vb.write(reinterpret_cast<const char*>(state.v.values.data()),
                 static_cast<std::streamsize>(state.v.values.size() * sizeof(double)));
      }
      auto mj = detail::open_out(dir / "manifest.json");
      mj << bundle.dump(2) << '\n';

      if (!monotone) property_ok = false;
    }
  }
  if (!property_ok) {
    throw PropertyViolation("compete: a diagnostic bundle violates monotonicity or doubling");
  }
  return exit_ok;
}

/// symmetrize: foliated Schwarz symmetrization plus the greedy polarization
/// trace on a supplied or seeded random field.
inline int cmd_symmetrize(const RunConfig& cfg) {
  cfg.validate_common();
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(cfg.resolved_out_dir()) / "symmetrize";
  auto grid = build_hemisphere_grid(cfg.n_theta, cfg.n_phi, FractionalParams::make(cfg.s),
                                    cfg.grading_gamma);
  ScalarField f = cfg.field_file.empty() ? detail::seeded_random_field(grid, cfg.seed)
                                         : read_field_csv(grid, cfg.field_file);
  if (f.values.minCoeff() < 0.0) {
    throw ValidationError("symmetrize: input field must be nonnegative");
  }

  const double e_before = weighted_dirichlet_energy(f, grid);
  const double n_before = weighted_l2_inner(f, f, grid);
  auto star = foliated_schwarz(f, grid);
  const double e_after = weighted_dirichlet_energy(star, grid);
  const double n_after = weighted_l2_inner(star, star, grid);

  const int max_iter = cfg.sym_max_iter > 0 ? cfg.sym_max_iter : 10 * cfg.n_phi;
  auto seq = polarization_sequence(f, grid, max_iter, cfg.sym_tol);

  auto tcsv = detail::open_out(dir / "trace.csv");
  tcsv << detail::table_header(cfg) << "iter,distance,chosen_plane_angle\n";
  for (const auto& step : seq.trace) {
    tcsv << step.iter << ',' << fmt_double(step.distance) << ',';
    if (step.plane_normal_angle) tcsv << fmt_double(*step.plane_normal_angle);
    tcsv << '\n';
  }
  write_field_csv(star, (dir / "symmetrized.csv").string());

  auto rj = detail::open_out(dir / "report.json");
  rj << nlohmann::json{{"config", cfg.to_json()},
                       {"config_hash", cfg.hash()},
                       {"energy_before", e_before},
                       {"energy_after", e_after},
                       {"energy_nonincreasing", e_after <= e_before * (1.0 + 1e-12) + 1e-15},
                       {"norm_conserved", n_after == n_before},
                       {"polarization_iterations", seq.trace.back().iter},
                       {"polarization_converged", seq.converged}}
            .dump(2)
     << '\n';
  if (e_after > e_before * (1.0 + 1e-12) + 1e-15) {
    throw PropertyViolation("symmetrize: rearrangement increased the Dirichlet energy");
  }
  return exit_ok;
}

}  // namespace cslab
