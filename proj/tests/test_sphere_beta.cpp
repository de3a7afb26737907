#include <catch2/catch_amalgamated.hpp>

#include "cslab/sphere_beta.hpp"

using namespace cslab;

TEST_CASE("tiny beta decouples to the free ground state", "[spectral]") {
  auto g = build_hemisphere_grid(24, 48, FractionalParams::make(0.5));
  auto pair = sphere_beta_pair(g, 1, 1e-10);
  CHECK(pair.converged);
  CHECK(pair.lambda_beta < 1e-8);
  // unconstrained minimizer is the constant
  const double mean = pair.u.values.mean();
  CHECK((pair.u.values - mean).abs().maxCoeff() < 1e-4 * std::abs(mean));
}

TEST_CASE("sphere beta pair at k=1, s=0.5", "[spectral]") {
  auto g = build_hemisphere_grid(48, 96, FractionalParams::make(0.5));
  auto lam1 = first_eigenvalue_symmetric(g, 1).lambda;

  auto strong = sphere_beta_pair(g, 1, 1e4);
  auto weak = sphere_beta_pair(g, 1, 1e2);
  CHECK(strong.converged);
  CHECK(weak.converged);

  SECTION("lambda_beta within 10% of lambda_1^s(1)") {
    CHECK(strong.lambda_beta == Catch::Approx(0.75).epsilon(0.10));
    CHECK(strong.lambda_beta <= 2.0 * lam1 + 1e-9);
  }
  SECTION("interaction is small and decreases with beta") {
    CHECK(strong.interaction < weak.interaction);
  }
  SECTION("J trace is monotone nonincreasing") {
    for (size_t i = 1; i < strong.j_trace.size(); ++i) {
      CHECK(strong.j_trace[i] <= strong.j_trace[i - 1] + 1e-10 * strong.j_trace[i - 1]);
    }
  }
  SECTION("normalization and nonnegativity") {
    CHECK(weighted_l2_inner(strong.u, strong.u, g) == Catch::Approx(1.0).margin(1e-8));
    CHECK(weighted_l2_inner(strong.v, strong.v, g) == Catch::Approx(1.0).margin(1e-8));
    CHECK(strong.u.values.minCoeff() >= 0.0);
    CHECK(strong.v.values.minCoeff() >= 0.0);
  }
}

TEST_CASE("beta pair symmetry conditions hold exactly", "[spectral]") {
  auto g = build_hemisphere_grid(24, 48, FractionalParams::make(0.25));
  const int k = 2;
  auto pair = sphere_beta_pair(g, k, 100.0);
  // v == u o sigma_i for every generator
  for (int j = 1; j <= k; ++j) {
    auto reflected = reflect_field(pair.u, g, g.paired_sigma_plane(j, k));
    CHECK((pair.v.values == reflected.values).all());
  }
  auto rotated = rotate_field(pair.u, g, k);
  CHECK((rotated.values == pair.u.values).all());
}

TEST_CASE("sphere beta pair validates input", "[spectral]") {
  auto g = build_hemisphere_grid(16, 16, FractionalParams::make(0.5));
  CHECK_THROWS_AS(sphere_beta_pair(g, 1, -1.0), ValidationError);
  CHECK_THROWS_AS(sphere_beta_pair(g, 3, 1.0), ValidationError);
}
