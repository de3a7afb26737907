#include <catch2/catch_amalgamated.hpp>

#include "cslab/almgren.hpp"

using namespace cslab;

namespace {

struct Setup {
  HemisphereGrid sphere;
  HalfBallGrid ball;
  EigenResult eig;
};

Setup small_setup(double s, int k, int nt = 24, int np = 48, int nr = 32) {
  Setup out{build_hemisphere_grid(nt, np, FractionalParams::make(s)), {}, {}};
  out.ball = build_half_ball_grid(out.sphere, nr, 1e-2);
  out.eig = first_eigenvalue_symmetric(out.sphere, k);
  return out;
}

}  // namespace

TEST_CASE("beta = 0 decouples into weighted harmonic extensions", "[competition]") {
  auto su = small_setup(0.5, 1);
  auto st = solve_beta_system(su.ball, 1, 0.0, su.eig);
  CHECK(st.converged);
  CHECK(st.interaction == 0.0);
  // harmonic extensions have less energy than the homogeneous competitor
  CHECK(2.0 * st.energy <= su.eig.exponent_d + 1e-10);
  CHECK(st.positive_interior);
}

TEST_CASE("competition solve at k=1, s=0.5, beta=1e3", "[competition]") {
  auto su = small_setup(0.5, 1);
  auto st = solve_beta_system(su.ball, 1, 1e3, su.eig);
  REQUIRE(st.converged);

  SECTION("energy ceiling 2I <= d within the frozen tolerance") {
    CHECK(2.0 * st.energy <= su.eig.exponent_d * 1.02 + 1e-12);
  }
  SECTION("energy decreases monotonically along the log") {
    for (size_t q = 1; q < st.log.size(); ++q) {
      CHECK(st.log[q].energy <= st.log[q - 1].energy * (1.0 + 1e-13) + 1e-15);
    }
  }
  SECTION("Dirichlet data is carried exactly on the outer shell") {
    auto tr = shell_trace(st.u, st.grid, st.grid.n_r() - 1);
    CHECK((tr.values == st.boundary_u.values).all());
    auto trv = shell_trace(st.v, st.grid, st.grid.n_r() - 1);
    CHECK((trv.values == st.boundary_v.values).all());
  }
  SECTION("the pair symmetry v = u o sigma holds exactly") {
    auto refl = reflect_ball_field(st.u, st.grid, su.sphere.paired_sigma_plane(1, 1));
    CHECK((st.v.values == refl.values).all());
  }
  SECTION("strict interior positivity after convergence") {
    CHECK(st.positive_interior);
    double mn = 1e300;
    for (int l = 0; l + 1 < st.grid.n_r(); ++l)
      for (int j = 0; j < su.sphere.n_theta(); ++j)
        for (int i = 0; i < su.sphere.n_phi; ++i) mn = std::min(mn, st.u.at(l, j, i));
    CHECK(mn > 0.0);
  }
  SECTION("frequency is nondecreasing and capped by 2s") {
    auto trace = frequency_trace(st, default_radius_ladder(st, 20));
    for (size_t q = 0; q < trace.radii.size(); ++q) {
      CHECK_FALSE(trace.dip_flagged[q]);
      CHECK(trace.N_vals[q] <= 2.0 * 0.5 * 1.02);
    }
    CHECK(trace.N_vals.back() <= su.eig.exponent_d * 1.02);
  }
}

TEST_CASE("equivariance of the k=2 competition solve is exact", "[competition]") {
  auto su = small_setup(0.5, 2);
  auto st = solve_beta_system(su.ball, 2, 100.0, su.eig);
  REQUIRE(st.converged);
  HalfBallField rot = st.u;
  for (int l = 0; l < st.grid.n_r(); ++l)
    for (int j = 0; j < su.sphere.n_theta(); ++j)
      for (int i = 0; i < su.sphere.n_phi; ++i)
        rot.at(l, j, i) = st.u.at(l, j, su.sphere.rotate_index(i, 2));
  CHECK((rot.values == st.u.values).all());
  auto refl = reflect_ball_field(st.u, st.grid, su.sphere.paired_sigma_plane(2, 2));
  CHECK((st.v.values == refl.values).all());
}

TEST_CASE("interaction decreases along the beta ladder", "[competition]") {
  auto su = small_setup(0.5, 1);
  double prev = std::numeric_limits<double>::max();
  for (double beta : {1e2, 1e3, 1e4}) {
    auto st = solve_beta_system(su.ball, 1, beta, su.eig);
    REQUIRE(st.converged);
    CHECK(st.interaction < prev);
    prev = st.interaction;
  }
}

TEST_CASE("energy I barely exceeds the beta = 0 floor and stays below d/2",
          "[competition]") {
  auto su = small_setup(0.25, 1);
  auto zero = solve_beta_system(su.ball, 1, 0.0, su.eig);
  auto strong = solve_beta_system(su.ball, 1, 1e4, su.eig);
  CHECK(strong.energy >= zero.energy - 1e-12);
  CHECK(2.0 * strong.energy <= su.eig.exponent_d * 1.02 + 1e-12);
}

TEST_CASE("competition solver validates input", "[competition]") {
  auto su = small_setup(0.5, 1);
  CHECK_THROWS_AS(solve_beta_system(su.ball, 1, -1.0, su.eig), ValidationError);
  CHECK_THROWS_AS(solve_beta_system(su.ball, 5, 1.0, su.eig), ValidationError);
  // eigen data must carry the canonical region for the requested k
  auto eig2 = first_eigenvalue_symmetric(su.sphere, 2);
  CHECK_THROWS_AS(solve_beta_system(su.ball, 1, 1.0, eig2), ValidationError);
}

TEST_CASE("growth rate of the blown-up solve matches d(k)", "[competition]") {
  auto su = small_setup(0.5, 1, 32, 64, 48);
  auto ball = build_half_ball_grid(su.sphere, 48, 1e-3);
  auto st = solve_beta_system(ball, 1, 1e4, su.eig);
  REQUIRE(st.converged);
  const double rb = select_r_beta(st);
  auto up = blow_up(st, rb);
  CHECK(almgren_H(up, 1.0) == Catch::Approx(1.0).margin(1e-6));
  auto est = growth_rate_estimate(up);
  CHECK(est.rate == Catch::Approx(su.eig.exponent_d).epsilon(0.05));
  CHECK(est.rate < 2.0 * 0.5);
}
