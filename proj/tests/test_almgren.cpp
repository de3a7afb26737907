#include <catch2/catch_amalgamated.hpp>

#include "cslab/almgren.hpp"

using namespace cslab;

namespace {

/// Segregated d-homogeneous extension pair of the k-symmetric eigenfunction,
/// with the joint normalization int y^a (g^2 + h^2) = 1, so H(1) = 1.
CompetitionState extension_state(const HalfBallGrid& ball, int k, double beta) {
  auto eig = first_eigenvalue_symmetric(ball.sphere, k);
  ScalarField g = competition_boundary_datum(ball.sphere, k, eig);
  CompetitionState st;
  st.grid = ball;
  st.u = homogeneous_extension(g, eig.exponent_d, ball);
  st.v = reflect_ball_field(st.u, ball, ball.sphere.paired_sigma_plane(1, k));
  st.boundary_u = g;
  st.boundary_v = reflect_field(g, ball.sphere, ball.sphere.paired_sigma_plane(1, k));
  st.beta = beta;
  st.k = k;
  st.converged = true;
  st.energy = energy_I(st);
  return st;
}

}  // namespace

TEST_CASE("H at r = 1 for the constant: the hemisphere measure", "[competition]") {
  auto sphere = build_hemisphere_grid(24, 48, FractionalParams::make(0.5));
  auto ball = build_half_ball_grid(sphere, 32, 1e-2);
  CompetitionState st;
  st.grid = ball;
  st.u = make_ball_field(ball, 1.0);
  st.v = make_ball_field(ball, 0.0);
  st.beta = 1.0;
  CHECK(almgren_H(st, 1.0) == Catch::Approx(two_pi).epsilon(1e-10));
  // constant u, v = 0: no gradient, no interaction
  CHECK(almgren_E(st, 0.5) == Catch::Approx(0.0).margin(1e-14));
  CHECK(frequency_N(st, 0.5) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("zero states are rejected by the positivity floor", "[competition]") {
  auto sphere = build_hemisphere_grid(16, 32, FractionalParams::make(0.5));
  auto ball = build_half_ball_grid(sphere, 16, 1e-2);
  CompetitionState st;
  st.grid = ball;
  st.u = make_ball_field(ball, 0.0);
  st.v = make_ball_field(ball, 0.0);
  st.beta = 1.0;
  CHECK_THROWS_WITH(frequency_N(st, 0.5), Catch::Matchers::ContainsSubstring("positivity floor"));
  CHECK(pohozaev_residual(st, 0.5) == 0.0);  // 0/0 guarded by convention
}

TEST_CASE("frequency of homogeneous eigen-extensions is the exponent", "[competition]") {
  for (double s : {0.25, 0.5, 0.75}) {
    auto sphere = build_hemisphere_grid(32, 64, FractionalParams::make(s));
    auto ball = build_half_ball_grid(sphere, 64, 1e-3);
    for (int k : {1, 2}) {
      auto st = extension_state(ball, k, 1e3);
      const double d = characteristic_exponent(first_eigenvalue_symmetric(sphere, k).lambda,
                                               sphere.params);
      // two decades, clear of the innermost shell's one-sided radial stencil
      std::vector<double> ladder(16);
      for (int q = 0; q < 16; ++q) ladder[q] = 0.01 * std::pow(100.0, q / 15.0);
      auto trace = frequency_trace(st, ladder);
      for (size_t q = 0; q < trace.radii.size(); ++q) {
        REQUIRE(trace.N_vals[q] == Catch::Approx(d).epsilon(0.005));
      }
    }
  }
}

TEST_CASE("frequency trace validates input", "[competition]") {
  auto sphere = build_hemisphere_grid(16, 32, FractionalParams::make(0.5));
  auto ball = build_half_ball_grid(sphere, 16, 1e-2);
  auto st = extension_state(ball, 1, 10.0);
  CHECK_THROWS_AS(frequency_trace(st, {0.5, 0.1}), ValidationError);   // unsorted
  CHECK_THROWS_AS(frequency_trace(st, {1e-5}), ValidationError);      // below range
  CHECK_THROWS_AS(frequency_trace(st, {1.5}), ValidationError);       // above range
}

TEST_CASE("doubling inequality on homogeneous surrogates", "[competition]") {
  auto sphere = build_hemisphere_grid(24, 48, FractionalParams::make(0.5));
  auto ball = build_half_ball_grid(sphere, 48, 1e-3);
  auto st = extension_state(ball, 1, 1e3);
  const double d = first_eigenvalue_symmetric(sphere, 1).exponent_d;

  SECTION("r1 == r2 gives ratio 1 below the bound") {
    auto rep = doubling_check(st, 0.5, 0.5, d);
    CHECK(rep.h_ratio == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(rep.ok);
  }
  SECTION("exact power scaling sits strictly below the bound") {
    auto rep = doubling_check(st, 0.05, 0.7, d);
    CHECK(rep.h_ratio == Catch::Approx(std::pow(0.7 / 0.05, 2 * d)).epsilon(1e-9));
    CHECK(rep.h_ratio < rep.bound);
    CHECK(rep.ok);
  }
  SECTION("precondition N(r_max) <= d is enforced") {
    CHECK_THROWS_AS(doubling_check(st, 0.1, 0.5, 0.5 * d), ValidationError);
  }
}

TEST_CASE("Pohozaev residual on harmonic homogeneous pairs", "[competition]") {
  auto sphere = build_hemisphere_grid(32, 64, FractionalParams::make(0.5));
  auto ball = build_half_ball_grid(sphere, 64, 1e-3);
  auto st = extension_state(ball, 1, 1e3);
  // identity holds in the continuum; discrete defect at quadrature scale
  CHECK(pohozaev_residual(st, 0.5) < 1e-2);
  CHECK(pohozaev_residual(st, 1.0) < 1e-2);
}

TEST_CASE("select_r_beta matches the closed form on power-law H", "[competition]") {
  const double s = 0.5;
  auto sphere = build_hemisphere_grid(24, 48, FractionalParams::make(s));
  auto ball = build_half_ball_grid(sphere, 48, 1e-3);
  const double beta = 1e3;
  auto st = extension_state(ball, 1, beta);
  const double d = first_eigenvalue_symmetric(sphere, 1).exponent_d;
  // H(r) = H(1) r^{2d} with H(1) = 1, so r_beta = beta^{-1/(2s+2d)}
  const double h1 = almgren_H(st, 1.0);
  const double closed = std::pow(beta * h1, -1.0 / (2 * s + 2 * d));
  CHECK(select_r_beta(st) == Catch::Approx(closed).margin(2e-10));

  SECTION("beta too small leaves no root bracket") {
    auto weak = extension_state(ball, 1, 0.5);
    CHECK_THROWS_WITH(select_r_beta(weak), Catch::Matchers::ContainsSubstring("beta too small"));
  }
  SECTION("r_beta decreases along an increasing beta ladder") {
    double prev = 1.0;
    for (double b : {1e2, 1e3, 1e4}) {
      auto stb = extension_state(ball, 1, b);
      const double rb = select_r_beta(stb);
      CHECK(rb < prev);
      prev = rb;
    }
  }
}

TEST_CASE("blow-up scaling identities", "[competition]") {
  const double s = 0.5;
  auto sphere = build_hemisphere_grid(24, 48, FractionalParams::make(s));
  auto ball = build_half_ball_grid(sphere, 48, 1e-3);

  SECTION("r_b = 1 with beta = 1 is the identity") {
    auto st = extension_state(ball, 1, 1.0);
    auto up = blow_up(st, 1.0);
    CHECK((up.u.values == st.u.values).all());
    CHECK(up.grid.r == st.grid.r);
    CHECK(up.beta == 1.0);
  }
  SECTION("H(., 1) = 1 after blowing up at r_beta") {
    auto st = extension_state(ball, 1, 1e3);
    const double rb = select_r_beta(st);
    auto up = blow_up(st, rb);
    CHECK(almgren_H(up, 1.0) == Catch::Approx(1.0).margin(1e-6));
  }
  SECTION("composition merges prefactors") {
    auto st = extension_state(ball, 1, 1e2);
    auto twice = blow_up(blow_up(st, 0.5), 0.4);
    auto once = blow_up(st, 0.2);
    CHECK((twice.u.values - once.u.values).abs().maxCoeff() <
          1e-10 * once.u.values.abs().maxCoeff());
    for (int l = 0; l < ball.n_r(); ++l) {
      CHECK(twice.grid.r[l] == Catch::Approx(once.grid.r[l]).epsilon(1e-12));
    }
  }
  SECTION("r_b outside (0,1] is rejected") {
    auto st = extension_state(ball, 1, 1e2);
    CHECK_THROWS_AS(blow_up(st, 0.0), ValidationError);
    CHECK_THROWS_AS(blow_up(st, 1.5), ValidationError);
  }
}

TEST_CASE("blow-down normalization and homogeneity deviation", "[competition]") {
  const double s = 0.5;
  auto sphere = build_hemisphere_grid(24, 48, FractionalParams::make(s));
  auto ball = build_half_ball_grid(sphere, 64, 1e-3);
  auto st = extension_state(ball, 1, 1e3);

  SECTION("kappa is definitionally exact and H(rescaled, 1) = 1") {
    for (double R : {0.3, 0.9, 1.0}) {
      auto bd = blow_down(st, R);
      CHECK(bd.kappa == bd.normalizer_L * bd.normalizer_L *
                            std::pow(bd.scale_R, 1.0 - sphere.params.a()));
      CHECK(almgren_H(bd.rescaled, 1.0) == Catch::Approx(1.0).margin(1e-8));
      CHECK(bd.homogeneity_deviation < 1e-12);  // exactly homogeneous input
    }
  }
  SECTION("a perturbation localized at the origin fades as R grows") {
    CompetitionState pert = st;
    for (int l = 0; l < ball.n_r(); ++l) {
      const double bump = 1.0 + 0.25 * std::exp(-ball.r[l] / 0.02);
      for (int j = 0; j < sphere.n_theta(); ++j) {
        for (int i = 0; i < sphere.n_phi; ++i) {
          pert.u.at(l, j, i) *= bump;
          pert.v.at(l, j, i) *= bump;
        }
      }
    }
    const double dev_small = blow_down(pert, 0.1).homogeneity_deviation;
    const double dev_large = blow_down(pert, 1.0).homogeneity_deviation;
    CHECK(dev_large < dev_small);
  }
  SECTION("R beyond the domain is rejected") {
    CHECK_THROWS_AS(blow_down(st, 2.0), ValidationError);
  }
}

TEST_CASE("growth rate estimates", "[competition]") {
  const double s = 0.5;
  auto sphere = build_hemisphere_grid(32, 64, FractionalParams::make(s));
  auto ball = build_half_ball_grid(sphere, 64, 1e-3);

  SECTION("homogeneous eigen-extension returns its exponent") {
    auto st = extension_state(ball, 1, 1e3);
    const double d = first_eigenvalue_symmetric(sphere, 1).exponent_d;
    auto est = growth_rate_estimate(st);
    CHECK(est.rate == Catch::Approx(d).epsilon(0.005));
    CHECK(est.h_slope == Catch::Approx(d).epsilon(0.005));
  }
  SECTION("extension of y^{2s} returns 2s") {
    auto g = make_field_from(sphere, [s](double th, double) {
      return std::pow(std::sin(th), 2 * s);
    });
    const double nrm = std::sqrt(weighted_l2_inner(g, g, sphere));
    g.values /= nrm * std::sqrt(2.0);
    CompetitionState st;
    st.grid = ball;
    st.u = homogeneous_extension(g, 2 * s, ball);
    st.v = st.u;
    st.beta = 1.0;
    st.k = 1;
    auto est = growth_rate_estimate(st);
    CHECK(est.rate == Catch::Approx(2 * s).epsilon(0.02));
  }
  SECTION("insufficient radial range is rejected") {
    auto shallow = build_half_ball_grid(sphere, 16, 0.5);
    CompetitionState st;
    st.grid = shallow;
    st.u = make_ball_field(shallow, 1.0);
    st.v = make_ball_field(shallow, 1.0);
    st.beta = 1.0;
    CHECK_THROWS_WITH(growth_rate_estimate(st),
                      Catch::Matchers::ContainsSubstring("insufficient radial range"));
  }
}
