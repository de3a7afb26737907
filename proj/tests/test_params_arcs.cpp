#include <catch2/catch_amalgamated.hpp>

#include "cslab/arc_set.hpp"
#include "cslab/params.hpp"

using namespace cslab;

TEST_CASE("fractional params recompute a from s", "[core]") {
  auto p = FractionalParams::make(0.25);
  CHECK(p.a() == 1.0 - 2.0 * 0.25);
  CHECK(p.dim_n == 2);
  CHECK(FractionalParams::make(0.5).a() == 0.0);
  CHECK_THROWS_AS(FractionalParams::make(0.0), ValidationError);
  CHECK_THROWS_AS(FractionalParams::make(1.0), ValidationError);
  CHECK_THROWS_AS(FractionalParams::make(1.5), ValidationError);
  CHECK_THROWS_AS(FractionalParams::make(0.5, 1), ValidationError);
}

TEST_CASE("canonical omega_k layout", "[core]") {
  SECTION("k=1 is the half circle [0, pi)") {
    ArcSet w = canonical_omega_k(1);
    REQUIRE(w.arcs().size() == 1);
    CHECK(w.arcs()[0].lo == 0.0);
    CHECK(w.arcs()[0].hi == Catch::Approx(M_PI).epsilon(1e-15));
  }
  SECTION("k=2 gives [0,pi/2) and [pi,3pi/2)") {
    ArcSet w = canonical_omega_k(2);
    REQUIRE(w.arcs().size() == 2);
    CHECK(w.arcs()[0].lo == 0.0);
    CHECK(w.arcs()[0].hi == Catch::Approx(M_PI / 2));
    CHECK(w.arcs()[1].lo == Catch::Approx(M_PI));
    CHECK(w.arcs()[1].hi == Catch::Approx(1.5 * M_PI));
  }
  SECTION("k=4 gives four arcs of length pi/4 at offsets i*pi/2") {
    ArcSet w = canonical_omega_k(4);
    REQUIRE(w.arcs().size() == 4);
    for (int i = 0; i < 4; ++i) {
      CHECK(w.arcs()[i].lo == Catch::Approx(i * M_PI / 2).margin(1e-15));
      CHECK(w.arcs()[i].length() == Catch::Approx(M_PI / 4));
    }
    CHECK(w.length() == Catch::Approx(M_PI));
  }
  SECTION("rejects k < 1") { CHECK_THROWS_AS(canonical_omega_k(0), ValidationError); }
}

TEST_CASE("arc set algebra", "[core]") {
  ArcSet w(std::vector<Arc>{{0.5, 1.5}, {3.0, 4.0}});
  ArcSet c = w.complement();
  CHECK(c.complement() == w);  // exact endpoint reuse
  CHECK(w.length() + c.length() == Catch::Approx(two_pi).epsilon(1e-15));

  CHECK(ArcSet::empty().complement() == ArcSet::full_circle());
  CHECK(ArcSet::full_circle().complement() == ArcSet::empty());

  CHECK(w.contains(0.5));
  CHECK_FALSE(w.contains(1.5));  // half-open
  CHECK_FALSE(w.contains(2.0));

  CHECK_THROWS_AS(ArcSet(std::vector<Arc>{{0.0, 1.0}, {0.5, 2.0}}), ValidationError);
  CHECK_THROWS_AS(ArcSet(std::vector<Arc>{{1.0, 1.0}}), ValidationError);
  CHECK_THROWS_AS(ArcSet(std::vector<Arc>{{-0.5, 1.0}}), ValidationError);
}

TEST_CASE("omega_k symmetry properties", "[core]") {
  // invariant under rotation by 2*pi/k; each reflection maps it to its complement
  for (int k : {1, 2, 3, 4, 6}) {
    ArcSet w = canonical_omega_k(k);
    const double period = two_pi / k;
    for (double phi = 0.01; phi < two_pi; phi += 0.137) {
      const double rotated = std::fmod(phi + period, two_pi);
      CHECK(w.contains(phi) == w.contains(rotated));
      // sigma_1 : phi -> -phi (mod 2*pi)
      const double mirrored = std::fmod(two_pi - phi, two_pi);
      CHECK(w.contains(phi) == !w.contains(mirrored));
    }
  }
}

TEST_CASE("arc snapping to the phi grid", "[core]") {
  ArcSet w(std::vector<Arc>{{0.01, 1.6}});
  ArcSet snapped = w.snapped_to(16);
  const double dphi = two_pi / 16;
  CHECK(snapped.arcs()[0].lo == Catch::Approx(0.0).margin(1e-15));
  CHECK(snapped.arcs()[0].hi == Catch::Approx(4 * dphi));
}
