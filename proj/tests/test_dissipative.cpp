#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "shiftlab/dissipative.hpp"
#include "shiftlab/rng.hpp"

using namespace shiftlab;

namespace {

DiscreteDissipativeSystem constant_sys(double p = 2.0) {
  return DiscreteDissipativeSystem::scalar(p, [](long) { return 1.0; });
}

DiscreteDissipativeSystem geometric_sys(double p = 2.0) {
  return DiscreteDissipativeSystem::scalar(
      p, [](long n) { return std::pow(2.0, -static_cast<double>(std::labs(n))); });
}

DiscreteDissipativeSystem periodic_sys(double p = 2.0) {
  return DiscreteDissipativeSystem::scalar(p, [](long n) { return (((n % 2) + 2) % 2) ? 2.0 : 1.0; });
}

// two points per cell with unequal masses
DiscreteDissipativeSystem two_point_sys(double p = 2.0) {
  return DiscreteDissipativeSystem(2, p, [](long n) {
    double base = (((n % 3) + 3) % 3 == 0) ? 0.5 : 1.5;
    return Vec{base, 2.0 * base};
  });
}

std::vector<SeqPoint> random_probes(int count, int fiber_dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SeqPoint> probes;
  for (int t = 0; t < count; ++t) {
    SeqPoint pt(-10, 10, 2.0, fiber_dim);
    for (long n = pt.a; n <= pt.b; ++n)
      for (int c = 0; c < fiber_dim; ++c) pt.at(n)[c] = rng.uniform(-3.0, 3.0);
    probes.push_back(std::move(pt));
  }
  return probes;
}

}  // namespace

TEST_CASE("construction guards") {
  CHECK_THROWS_AS(DiscreteDissipativeSystem(3, 2.0, [](long) { return Vec{1, 1, 1}; }),
                  dimension_error);
  CHECK_THROWS_AS(DiscreteDissipativeSystem(1, 0.5, [](long) { return Vec{1.0}; }),
                  std::invalid_argument);
  auto bad_mass = DiscreteDissipativeSystem::scalar(2.0, [](long) { return -1.0; });
  CHECK_THROWS_AS(bad_mass.mu(0), std::invalid_argument);
  auto wrong_dim = DiscreteDissipativeSystem(2, 2.0, [](long) { return Vec{1.0}; });
  CHECK_THROWS_AS(wrong_dim.mu(0), dimension_error);
}

TEST_CASE("b-norm agrees with hand sums") {
  auto sys = geometric_sys(2.0);
  SeqPoint psi(-1, 1, 2.0, 1);
  psi.at(-1) = Vec{2.0};
  psi.at(0) = Vec{1.0};
  psi.at(1) = Vec{3.0};
  // 4 * 1/2 + 1 * 1 + 9 * 1/2 = 7.5
  CHECK(b_norm(sys, psi) == doctest::Approx(std::sqrt(7.5)).epsilon(1e-14));

  auto sysp = geometric_sys(3.0);
  SeqPoint phi(0, 1, 3.0, 1);
  phi.at(0) = Vec{2.0};
  phi.at(1) = Vec{-1.0};
  CHECK(b_norm(sysp, phi) == doctest::Approx(std::cbrt(8.0 + 0.5)).epsilon(1e-14));
}

TEST_CASE("restriction map is an exact isometry on three measure profiles") {
  int idx = 0;
  for (auto* make : {&constant_sys, &geometric_sys, &periodic_sys}) {
    CAPTURE(idx++);
    auto sys = (*make)(2.0);
    for (const SeqPoint& phi : random_probes(100, 1, kDefaultProbeSeed)) {
      SeqPoint psi = gamma_forward(sys, phi);
      CHECK(std::abs(lp_norm(sys, phi) - b_norm(sys, psi)) <= 1e-12);
    }
  }
}

TEST_CASE("composition conjugacy: restriction of the Koopman image is the shift") {
  for (auto sys : {constant_sys(), geometric_sys(), periodic_sys()}) {
    CHECK(verify_composition_conjugacy(sys, random_probes(100, 1, kDefaultProbeSeed)) <= 1e-12);
  }
  auto two = two_point_sys();
  CHECK(verify_composition_conjugacy(two, random_probes(100, 2, kDefaultProbeSeed)) <= 1e-12);
}

TEST_CASE("uniform derivative check over the window") {
  auto constant = rn_uniform_check(constant_sys(), -1000, 1000);
  CHECK(constant.uniform);
  CHECK(constant.min_ratio == doctest::Approx(1.0));
  CHECK(constant.max_ratio == doctest::Approx(1.0));
  CHECK(constant.witness_c > 1.0);

  // 2^{-|n|} leaves every cap eventually; the window cap is 1e6
  auto geom = rn_uniform_check(geometric_sys(), -1000, 1000);
  CHECK_FALSE(geom.uniform);
  CHECK(geom.min_ratio < 1e-200);

  auto period = rn_uniform_check(periodic_sys(), -1000, 1000);
  CHECK(period.uniform);
  CHECK(period.max_ratio == doctest::Approx(2.0));
  CHECK(period.witness_c >= 2.0);

  auto two = rn_uniform_check(two_point_sys(), -1000, 1000);
  CHECK(two.uniform);
  CHECK(two.max_ratio == doctest::Approx(3.0));  // 1.5 / 0.5
}

TEST_CASE("rescaling carries the weighted norm to the flat norm") {
  for (auto sys : {periodic_sys(2.0), periodic_sys(3.0), two_point_sys(2.0)}) {
    REQUIRE(rn_uniform_check(sys, -200, 200).uniform);
    for (const SeqPoint& psi : random_probes(50, sys.cell_dim(), kDefaultProbeSeed)) {
      SeqPoint flat = rn_rescale(sys, psi);
      CHECK(std::abs(b_norm(sys, psi) - rescaled_norm(sys, flat)) <= 1e-12);
    }
  }
}

TEST_CASE("coordinate-line decomposition intertwines the weighted shift") {
  for (double w : {0.5, 1.0, 2.0}) {
    CAPTURE(w);
    WeightSeq ws = WeightSeq::constant(w, 3.0);
    CHECK(dissipative_decomposition_conjugacy(ws, random_probes(50, 1, kDefaultProbeSeed)) <=
          1e-9);
  }
  WeightSeq varying(3.0, [](long n) { return (((n % 2) + 2) % 2) ? 1.25 : 0.8; });
  CHECK(dissipative_decomposition_conjugacy(varying, random_probes(50, 1, kDefaultProbeSeed)) <=
        1e-9);
}
