#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "shiftlab/linalg.hpp"
#include "shiftlab/rng.hpp"

using namespace shiftlab;

namespace {

Mat random_matrix(Rng& rng, int d) {
  std::vector<double> a(static_cast<std::size_t>(d) * d);
  for (double& x : a) x = rng.uniform(-2.0, 2.0);
  return Mat(d, std::move(a));
}

Mat random_invertible(Rng& rng, int d) {
  for (;;) {
    Mat m = random_matrix(rng, d);
    if (std::abs(det(m)) > 0.1) return m;
  }
}

Vec random_vec(Rng& rng, int d) {
  Vec v = Vec::zero(d);
  for (int i = 0; i < d; ++i) v[i] = rng.uniform(-3.0, 3.0);
  return v;
}

constexpr double kSqrt5 = 2.23606797749978969;

}  // namespace

TEST_CASE("apply") {
  CHECK(apply(Mat::identity(2), Vec{3, 4}).e == std::vector<double>{3, 4});

  // eigenvector of [[2,1],[1,1]] with eigenvalue (3+sqrt5)/2
  Mat L{{2, 1}, {1, 1}};
  Vec vp{1.0, (kSqrt5 - 1.0) / 2.0};
  Vec img = apply(L, vp);
  double lambda = (3.0 + kSqrt5) / 2.0;
  CHECK(vnorm(img - lambda * vp) == doctest::Approx(0.0).epsilon(1e-12));

  Mat J{{1, 1}, {0, 1}};
  Vec jv = apply(J, Vec{0, 1});
  CHECK(jv[0] == 1.0);
  CHECK(jv[1] == 1.0);

  CHECK_THROWS_AS(apply(Mat::identity(3), Vec{1, 2}), dimension_error);
}

TEST_CASE("invert closed forms") {
  Mat id = invert(Mat::identity(3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(id.at(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));

  Mat di = invert(Mat::diagonal({2.0, 0.5}));
  CHECK(di.at(0, 0) == doctest::Approx(0.5));
  CHECK(di.at(1, 1) == doctest::Approx(2.0));

  Mat ji = invert(Mat{{1, 1}, {0, 1}});
  CHECK(ji.at(0, 1) == doctest::Approx(-1.0));
  Mat prod = Mat{{1, 1}, {0, 1}} * ji;
  CHECK(vnorm(Vec{prod.at(0, 0) - 1, prod.at(0, 1), prod.at(1, 0), prod.at(1, 1) - 1}) <= 1e-12);

  CHECK_THROWS_AS(invert(Mat{{1, 1}, {1, 1}}), singular_matrix_error);
}

TEST_CASE("invert is an involution on random matrices") {
  Rng rng(1);
  for (int d = 1; d <= 4; ++d) {
    for (int t = 0; t < 50; ++t) {
      Mat m = random_invertible(rng, d);
      Mat mm = invert(invert(m));
      double worst = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) worst = std::max(worst, std::abs(mm.at(i, j) - m.at(i, j)));
      CHECK(worst <= 1e-10);
    }
  }
}

TEST_CASE("vnorm") {
  CHECK(vnorm(Vec{3, 4}) == doctest::Approx(5.0));
  CHECK(vnorm(Vec{-7, 1}, NormSpec::max_norm()) == 7.0);
  CHECK(vnorm(Vec{1, 1, 1}, NormSpec::pnorm(1)) == doctest::Approx(3.0));
  CHECK(vnorm(Vec{1, 1}, NormSpec::pnorm(3)) == doctest::Approx(std::pow(2.0, 1.0 / 3.0)));
  CHECK(vnorm(Vec::zero(3)) == 0.0);
}

TEST_CASE("vnorm homogeneity and triangle inequality") {
  Rng rng(2);
  const NormSpec norms[] = {NormSpec::euclidean(), NormSpec::pnorm(1), NormSpec::pnorm(3),
                            NormSpec::max_norm()};
  for (const auto& n : norms) {
    for (int t = 0; t < 200; ++t) {
      int d = 1 + static_cast<int>(rng.next_u64() % 4);
      Vec u = random_vec(rng, d), v = random_vec(rng, d);
      double s = rng.uniform(-4.0, 4.0);
      CHECK(vnorm(s * u, n) == doctest::Approx(std::abs(s) * vnorm(u, n)).epsilon(1e-12));
      CHECK(vnorm(u + v, n) <= vnorm(u, n) + vnorm(v, n) + 1e-12);
    }
  }
}

TEST_CASE("cos_angle") {
  CHECK(cos_angle(Vec{1, 0}, Vec{0, 1}) == 0.0);
  // orthogonal eigenvectors of the symmetric matrix [[2,1],[1,1]]
  Vec vp{1.0, (kSqrt5 - 1.0) / 2.0};
  Vec vm{1.0, -(kSqrt5 + 1.0) / 2.0};
  CHECK(std::abs(cos_angle(vp, vm)) <= 1e-14);
  for (double n : {1.0, 5.0, 40.0}) {
    CHECK(cos_angle(Vec{1, 0}, Vec{1, 1 / n}) == doctest::Approx(n / std::sqrt(n * n + 1)));
  }
  CHECK_THROWS_AS(cos_angle(Vec::zero(2), Vec{1, 0}), zero_vector_error);
}

TEST_CASE("coordinates_in_basis") {
  auto c = coordinates_in_basis(Vec{1, 0, 0}, {Vec{1, 0, 0}, Vec{0, 1, 0}, Vec{0, 0, 1}});
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(c[1] == doctest::Approx(0.0));

  double n = 7.0;
  auto c2 = coordinates_in_basis(Vec{0, 1}, {Vec{1, 0}, Vec{1, 1 / n}});
  CHECK(c2[0] == doctest::Approx(-n));
  CHECK(c2[1] == doctest::Approx(n));

  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    int d = 2 + static_cast<int>(rng.next_u64() % 3);
    std::vector<Vec> basis;
    for (int i = 0; i < d; ++i) basis.push_back(random_vec(rng, d));
    if (gram_det(basis) < 1e-3) continue;
    Vec v = random_vec(rng, d);
    auto alpha = coordinates_in_basis(v, basis);
    Vec rec = Vec::zero(d);
    for (int i = 0; i < d; ++i) rec += alpha[static_cast<std::size_t>(i)] * basis[static_cast<std::size_t>(i)];
    CHECK(vnorm(rec - v) <= 1e-10 * std::max(1.0, vnorm(v)));
  }

  CHECK_THROWS_AS(coordinates_in_basis(Vec{1, 1}, {Vec{1, 0}, Vec{2, 0}}), degenerate_basis_error);
}

TEST_CASE("projection_operator_norm") {
  // orthogonal projections have norm one
  CHECK(projection_operator_norm(0, {Vec{1, 0}, Vec{0, 1}}) == doctest::Approx(1.0));
  CHECK(projection_operator_norm(2, {Vec{1, 0, 0}, Vec{0, 1, 0}, Vec{0, 0, 1}}) ==
        doctest::Approx(1.0));

  // nearly collinear pair under the max-norm: the second projection has norm n
  for (double n : {4.0, 10.0, 100.0}) {
    double nm = projection_operator_norm(1, {Vec{1, 0}, Vec{1, 1 / n}}, NormSpec::max_norm());
    CHECK(nm == doctest::Approx(n).epsilon(1e-10));
    CHECK(nm >= n - 1e-9);
  }

  // sphere-sampling oracle agrees with the rank-one dual-norm formula
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    std::vector<Vec> basis{normalized(random_vec(rng, 2)), normalized(random_vec(rng, 2))};
    if (gram_det(basis) < 1e-2) continue;
    double exact = projection_operator_norm(0, basis);
    Vec e{1.0, 0.0};
    Vec g = solve(transpose(columns(basis)), e);
    double sampled = detail::sphere_maximize(2, [&](const Vec& v) {
      return vnorm(dot(g, v) * basis[0]);
    });
    CHECK(sampled == doctest::Approx(exact).epsilon(1e-6));
  }
}

TEST_CASE("projection norms blow up for a nearly degenerate triple") {
  for (double delta : {1e-2, 1e-3, 1e-4}) {
    Mat gram{{1, -0.5, -0.5 + delta}, {-0.5, 1, -0.5 + delta}, {-0.5 + delta, -0.5 + delta, 1}};
    auto basis = basis_from_gram(gram);
    Vec x0 = basis[0] + basis[1] + basis[2];
    CHECK(vnorm(x0) * vnorm(x0) == doctest::Approx(4 * delta).epsilon(1e-9));
    double bound = 1.0 / (2.0 * std::sqrt(delta));
    double pn = projection_operator_norm(0, basis);
    CHECK(pn >= bound * (1 - 1e-9));
  }
}

TEST_CASE("operator_norm") {
  Mat half_rot = 0.5 * Mat::rotation(0.7);
  CHECK(operator_norm(half_rot) == doctest::Approx(0.5));
  CHECK(operator_norm(invert(half_rot)) == doctest::Approx(2.0));
  CHECK(operator_norm(Mat::diagonal({2, 0.5})) == doctest::Approx(2.0));

  Mat J{{1, 1}, {0, 1}};
  CHECK(operator_norm(J, NormSpec::max_norm()) == doctest::Approx(2.0));  // row sums
  CHECK(operator_norm(J, NormSpec::pnorm(1)) == doctest::Approx(2.0));   // column sums

  // generic p: cross-check the sphere search against p = 2 on a known matrix
  CHECK(operator_norm(Mat::diagonal({3, 1}), NormSpec::pnorm(2.5)) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("sym_eigenvalues") {
  auto ev = sym_eigenvalues(Mat{{2, 1}, {1, 1}});
  CHECK(ev[0] == doctest::Approx((3.0 - kSqrt5) / 2.0));
  CHECK(ev[1] == doctest::Approx((3.0 + kSqrt5) / 2.0));
}

TEST_CASE("real_eigenpairs") {
  auto pairs = real_eigenpairs(Mat{{2, 3}, {1, 2}});
  REQUIRE(pairs.size() == 2);
  double s3 = std::sqrt(3.0);
  CHECK(pairs[0].value == doctest::Approx(2.0 - s3));
  CHECK(pairs[1].value == doctest::Approx(2.0 + s3));
  // eigenvectors proportional to (-sqrt3, 1) and (sqrt3, 1)
  CHECK(std::abs(pairs[0].vector[0] / pairs[0].vector[1] + s3) <= 1e-8);
  CHECK(std::abs(pairs[1].vector[0] / pairs[1].vector[1] - s3) <= 1e-8);

  CHECK(real_eigenpairs(Mat::rotation(0.4)).empty());

  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    int d = 2 + static_cast<int>(rng.next_u64() % 3);
    Mat m = random_matrix(rng, d);
    for (const auto& pr : real_eigenpairs(m)) {
      CHECK(vnorm(apply(m, pr.vector) - pr.value * pr.vector) <= 1e-7);
    }
  }
}

TEST_CASE("basis_from_gram reproduces the Gram matrix") {
  Mat gram{{1, 0.2, -0.3}, {0.2, 1, 0.1}, {-0.3, 0.1, 1}};
  auto basis = basis_from_gram(gram);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(dot(basis[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(j)]) ==
            doctest::Approx(gram.at(i, j)).epsilon(1e-12));

  CHECK_THROWS_AS(basis_from_gram(Mat{{1, -0.5, -0.5}, {-0.5, 1, -0.5}, {-0.5, -0.5, 1}}),
                  degenerate_basis_error);
}

TEST_CASE("solve") {
  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    int d = 1 + static_cast<int>(rng.next_u64() % 4);
    Mat m = random_invertible(rng, d);
    Vec b = random_vec(rng, d);
    Vec x = solve(m, b);
    CHECK(vnorm(apply(m, x) - b) <= 1e-9 * std::max(1.0, vnorm(b)));
  }
}
