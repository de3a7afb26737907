#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cslab/errors.hpp"

namespace cslab {

/// One self-describing run description: every CLI subcommand validates the
/// module preconditions here before dispatching work.
struct RunConfig {
  double s = 0.5;
  int n_theta = 64;
  int n_phi = 128;
  int n_r = 48;
  double r_min = 1e-3;
  double grading_gamma = 0.0;  // 0 = grid default
  std::vector<int> k_list = {1};
  int k_max = 0;
  std::vector<double> beta_ladder = {1e3};
  int radius_ladder = 24;
  std::string omega_spec;           // "", "empty", "full", "half", "arcs:lo,hi;..."
  std::string method = "symmetric";  // plain | symmetric | folded | both
  std::string out_dir;
  std::uint64_t seed = 1;
  int max_outer = 300;
  std::string field_file;  // symmetrize input; empty = seeded random field
  int sym_max_iter = 0;    // 0 = 10 n_phi
  double sym_tol = 1e-8;

  void validate_common() const {
    if (!(s > 0.0 && s < 1.0)) throw ValidationError("config: s must lie in (0,1)");
    if (n_phi % 2 != 0) throw ValidationError("config: n_phi must be even");
    if (n_theta < 8 || n_phi < 8 || n_theta > 1024 || n_phi > 1024) {
      throw ValidationError("config: grid sizes must lie in [8, 1024]");
    }
    for (int k : k_list) {
      if (k < 1 || (n_phi / 2) % k != 0) {
        throw ValidationError("config: every k must divide n_phi/2 (k=" + std::to_string(k) + ")");
      }
    }
    for (double b : beta_ladder) {
      if (b < 0.0) throw ValidationError("config: beta must be >= 0");
    }
    if (n_r < 8 || n_r > 1024) throw ValidationError("config: n_r must lie in [8, 1024]");
    if (!(r_min > 0.0 && r_min < 1.0)) throw ValidationError("config: r_min must lie in (0,1)");
  }

  nlohmann::json to_json() const {
    return nlohmann::json{{"s", s},
                          {"n_theta", n_theta},
                          {"n_phi", n_phi},
                          {"n_r", n_r},
                          {"r_min", r_min},
                          {"grading_gamma", grading_gamma},
                          {"k_list", k_list},
                          {"k_max", k_max},
                          {"beta_ladder", beta_ladder},
                          {"radius_ladder", radius_ladder},
                          {"omega", omega_spec},
                          {"method", method},
                          {"out_dir", out_dir},
                          {"seed", seed},
                          {"max_outer", max_outer},
                          {"field_file", field_file},
                          {"sym_max_iter", sym_max_iter},
                          {"sym_tol", sym_tol}};
  }

  static RunConfig from_json(const nlohmann::json& j) {
    RunConfig c;
    c.s = j.value("s", c.s);
    c.n_theta = j.value("n_theta", c.n_theta);
    c.n_phi = j.value("n_phi", c.n_phi);
    c.n_r = j.value("n_r", c.n_r);
    c.r_min = j.value("r_min", c.r_min);
    c.grading_gamma = j.value("grading_gamma", c.grading_gamma);
    c.k_list = j.value("k_list", c.k_list);
    c.k_max = j.value("k_max", c.k_max);
    c.beta_ladder = j.value("beta_ladder", c.beta_ladder);
    c.radius_ladder = j.value("radius_ladder", c.radius_ladder);
    c.omega_spec = j.value("omega", c.omega_spec);
    c.method = j.value("method", c.method);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.seed = j.value("seed", c.seed);
    c.max_outer = j.value("max_outer", c.max_outer);
    c.field_file = j.value("field_file", c.field_file);
    c.sym_max_iter = j.value("sym_max_iter", c.sym_max_iter);
    c.sym_tol = j.value("sym_tol", c.sym_tol);
    return c;
  }

  static RunConfig from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("config: " + path + ": " + e.what());
    }
    return from_json(j);
  }

  /// FNV-1a over the canonical JSON dump; stable across runs and platforms.
  std::string hash() const {
    const std::string dump = to_json().dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : dump) {
      h ^= c;
      h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

  /// Output root: explicit flag, else the CSLAB_OUT environment variable,
  /// else the working directory.
  std::string resolved_out_dir() const {
    if (!out_dir.empty()) return out_dir;
    if (const char* env = std::getenv("CSLAB_OUT")) return env;
    return ".";
  }
};

}  // namespace cslab
