#include "dilation/error.hpp"
#include "dilation/matcore.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

using namespace dilation;
using namespace testing_support;

TEST_CASE("psd_check on hand-evaluated matrices") {
  auto d = psd_check(real_matrix(2, 2, {1, 0, 0, 0.75}));
  CHECK(d.pass);
  CHECK(d.min_eigenvalue == doctest::Approx(0.75).epsilon(1e-14));

  auto f = psd_check(real_matrix(2, 2, {1, 2, 2, 1}));
  CHECK_FALSE(f.pass);
  CHECK(f.min_eigenvalue == doctest::Approx(-1.0).epsilon(1e-14));

  auto z = psd_check(ComplexMatrix::Zero(3, 3));
  CHECK(z.pass);
  CHECK(z.min_eigenvalue == 0.0);
}

TEST_CASE("psd_check rejects bad shapes") {
  CHECK_THROWS_AS(psd_check(ComplexMatrix::Zero(2, 3)), PreconditionError);
  CHECK_THROWS_AS(psd_check(real_matrix(2, 2, {1, 1, 0, 1})), PreconditionError);
}

TEST_CASE("defect of scalar, identity and nilpotent") {
  CHECK(defect(scalar(0.5))(0, 0).real() == doctest::Approx(std::sqrt(0.75)).epsilon(1e-14));
  CHECK(spectral_norm(defect(identity(3))) <= 1e-15);
  const ComplexMatrix expect = real_matrix(2, 2, {1, 0, 0, std::sqrt(0.19)});
  CHECK(dist(defect(nilpotent()), expect) <= 1e-14);
}

TEST_CASE("defect rejects non-contractions with the norm") {
  try {
    defect(scalar(1.5));
    FAIL("expected throw");
  } catch (const PreconditionError& e) {
    CHECK(e.code() == "not_a_contraction");
    CHECK(e.value() == doctest::Approx(1.5));
  }
}

TEST_CASE("defect identity D^2 + T*T = I on random contractions") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 1 + trial % 6;
    ComplexMatrix t(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) t(i, j) = Complex(g(rng), g(rng));
    t /= spectral_norm(t) * (trial % 3 == 0 ? 1.0 : 1.2);
    const ComplexMatrix dt = defect(t);
    CHECK(spectral_norm(dt * dt + t.adjoint() * t - identity(n)) <= 1e-10);
    CHECK(spectral_norm(dt - dt.adjoint()) <= 1e-12);
    CHECK(psd_check(dt).pass);
  }
}

TEST_CASE("numerical_kernel examples") {
  CHECK(numerical_kernel(ComplexMatrix::Zero(2, 2)).cols() == 2);
  const ComplexMatrix rot = real_matrix(2, 2, {0, -1, 1, 0}) - identity(2);
  CHECK(numerical_kernel(rot).cols() == 0);
  const ComplexMatrix k = numerical_kernel(real_matrix(2, 2, {0, 0, 0, 3}));
  REQUIRE(k.cols() == 1);
  CHECK(std::abs(k(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(k(1, 0)) <= 1e-14);
}

TEST_CASE("span_orthonormalize examples") {
  CHECK(span_orthonormalize(real_matrix(2, 2, {1, 2, 0, 0})).cols() == 1);
  const ComplexMatrix q = span_orthonormalize(real_matrix(2, 2, {1, 1, 0, 1}));
  CHECK(q.cols() == 2);
  CHECK(isometry_residual(q) <= 1e-14);
  CHECK(span_orthonormalize(ComplexMatrix(3, 0)).cols() == 0);
}

TEST_CASE("extend_isometry_to_unitary examples") {
  const ComplexMatrix e1 = real_matrix(2, 1, {1, 0});
  const ComplexMatrix e2 = real_matrix(2, 1, {0, 1});
  const ComplexMatrix g = extend_isometry_to_unitary(e1, e2, 2);
  CHECK(isometry_residual(g) <= 1e-10);
  CHECK(dist(g * e1, e2) <= 1e-12);

  const ComplexMatrix same = extend_isometry_to_unitary(e1, e1, 2);
  CHECK(dist(same * e1, e1) <= 1e-12);

  const double r = std::sqrt(0.5);
  const ComplexMatrix d = real_matrix(3, 1, {r, r, 0});
  const ComplexMatrix im = real_matrix(3, 1, {0, 0, 1});
  const ComplexMatrix g3 = extend_isometry_to_unitary(d, im, 3);
  CHECK(dist(g3 * d, im) <= 1e-10);
  CHECK(isometry_residual(g3) <= 1e-10);
  CHECK(isometry_residual(g3.adjoint()) <= 1e-10);
}

TEST_CASE("extend_isometry_to_unitary rejects Gram mismatch") {
  const ComplexMatrix a = real_matrix(2, 1, {1, 0});
  const ComplexMatrix b = real_matrix(2, 1, {2, 0});
  try {
    extend_isometry_to_unitary(a, b, 2);
    FAIL("expected throw");
  } catch (const PreconditionError& e) {
    CHECK(e.code() == "not_an_isometric_correspondence");
  }
}

TEST_CASE("extend_isometry_to_unitary is unitary for any seed and rank-deficient input") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Index n = 2 + static_cast<Index>(seed % 5);
    const ComplexMatrix u = random_unitary(n, seed + 100);
    ComplexMatrix dom = random_unitary(n, seed + 200).leftCols(n / 2 + 1);
    // duplicate a column to make the correspondence rank deficient
    ComplexMatrix dom2(n, dom.cols() + 1);
    dom2 << dom, dom.col(0) * Complex(0.5, 0.5);
    const ComplexMatrix img = u * dom2;
    const ComplexMatrix g = extend_isometry_to_unitary(dom2, img, n, seed);
    CHECK(isometry_residual(g) <= 1e-10);
    CHECK(isometry_residual(g.adjoint()) <= 1e-10);
    CHECK(dist(g * dom2, img) <= 1e-9);
  }
}

TEST_CASE("eigenvalue_one_check examples") {
  CHECK_FALSE(eigenvalue_one_check(identity(2), Tolerance(1e-6)).pass);
  CHECK(eigenvalue_one_check(identity(2), Tolerance(1e-6)).distance == doctest::Approx(0.0));
  auto z = eigenvalue_one_check(scalar(0.0), Tolerance(1e-6));
  CHECK(z.pass);
  CHECK(z.distance == doctest::Approx(1.0));
  auto near = eigenvalue_one_check(real_matrix(2, 2, {1 + 1e-12, 0, 0, 0.3}), Tolerance(1e-6));
  CHECK_FALSE(near.pass);
  CHECK(near.distance <= 1e-11);
}

TEST_CASE("SpaceDecomposition offsets and blocks") {
  SpaceDecomposition d(2);
  d.append("M", 3).append("L2", 1);
  CHECK(d.total() == 6);
  CHECK(d.offset("M") == 2);
  CHECK(d.offset("L2") == 5);
  CHECK(d.dim("M") == 3);
  ComplexMatrix op = ComplexMatrix::Zero(6, 6);
  op(5, 2) = 4.0;
  CHECK(d.block(op, "L2", "M")(0, 0) == Complex(4.0));
  CHECK_THROWS(d.offset("Q"));
}

TEST_CASE("Tolerance must be positive") {
  CHECK_THROWS(Tolerance(0.0));
  CHECK_THROWS(Tolerance(-1.0));
  CHECK(Tolerance{}.value() == 1e-9);
}
