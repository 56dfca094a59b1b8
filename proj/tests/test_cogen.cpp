#include "dilation/cogen.hpp"
#include "dilation/error.hpp"
#include "dilation/scenario.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace dilation;
using namespace dilation::cogen;
using namespace testing_support;

TEST_CASE("cogenerator of scalar generators") {
  CHECK(std::abs(cogenerator_from_generator(scalar(-1)).matrix()(0, 0)) <= 1e-15);
  CHECK(cogenerator_from_generator(scalar(-2)).matrix()(0, 0).real() ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  const auto t0 = cogenerator_from_generator(ComplexMatrix::Zero(2, 2));
  CHECK(dist(t0.matrix(), -identity(2)) <= 1e-15);
  CHECK(t0.spectral_gap() == doctest::Approx(2.0));
  CHECK(t0.provenance() == Cogenerator::Provenance::from_generator);
}

TEST_CASE("non-dissipative generator is rejected") {
  try {
    cogenerator_from_generator(scalar(0.5));
    FAIL("expected throw");
  } catch (const PreconditionError& e) {
    CHECK(e.code() == "not_dissipative");
    CHECK(e.value() == doctest::Approx(1.0));
  }
}

TEST_CASE("Cogenerator rejects eigenvalue 1 and non-contractions") {
  CHECK_THROWS_AS(Cogenerator(identity(2)), PreconditionError);
  CHECK_THROWS_AS(Cogenerator(scalar(1.5)), PreconditionError);
  CHECK_NOTHROW(Cogenerator(scalar(0.0)));
}

TEST_CASE("phi_s scalar evaluations") {
  CHECK(phi_s_apply(scalar(std::exp(-0.01)), 0.01)(0, 0).real() ==
        doctest::Approx(-0.002498).epsilon(1e-3));
  CHECK(std::abs(phi_s_apply(scalar(0.0), 1.0)(0, 0)) <= 1e-15);
  CHECK(dist(phi_s_apply(identity(2), 0.5), -identity(2)) <= 1e-15);
  CHECK_THROWS_AS(phi_s_apply(scalar(0.0), 0.0), PreconditionError);
  // X - (1+s)I singular
  CHECK_THROWS_AS(phi_s_apply(scalar(1.5), 0.5), PreconditionError);
}

TEST_CASE("cogenerator limit on scalar and diagonal generators") {
  const auto r = cogenerator_limit_check(scalar(-1), {1e-1, 1e-2, 1e-3});
  CHECK(r.passed());
  const auto errors = r.details["errors"].get<std::vector<double>>();
  REQUIRE(errors.size() == 3);
  CHECK(errors[0] == doctest::Approx(0.0244).epsilon(0.1));
  CHECK(errors[1] == doctest::Approx(0.0025).epsilon(0.1));
  CHECK(errors[2] == doctest::Approx(0.00025).epsilon(0.1));

  const auto z = cogenerator_limit_check(ComplexMatrix::Zero(2, 2), {1e-1, 1e-2});
  CHECK(z.passed());
  for (double e : z.details["errors"].get<std::vector<double>>()) CHECK(e <= 1e-14);

  CHECK(cogenerator_limit_check(real_matrix(2, 2, {-1, 0, 0, -2}), {1e-1, 1e-2, 1e-3}).passed());
  CHECK_THROWS(cogenerator_limit_check(scalar(-1), {1e-2, 1e-1}));
}

TEST_CASE("e_sr and e_s scalar evaluations") {
  CHECK(e_sr_apply(scalar(0), 1.0, 0.5)(0, 0).real() == doctest::Approx(std::exp(-1.0)));
  CHECK(dist(e_sr_apply(scalar(0.3), 0.0, 0.5), scalar(1)) == 0.0);
  CHECK(e_sr_apply(scalar(1), 1.0, 0.5)(0, 0).real() == doctest::Approx(std::exp(-3.0)));
  CHECK_THROWS(e_sr_apply(scalar(0), 1.0, 1.0));

  CHECK(e_s_apply(Cogenerator(scalar(0)), 2.0)(0, 0).real() == doctest::Approx(std::exp(-2.0)));
  CHECK(dist(e_s_apply(Cogenerator(scalar(0.2)), 0.0), scalar(1)) == 0.0);
  const auto t = cogenerator_from_generator(scalar(-2));
  CHECK(e_s_apply(t, 1.0)(0, 0).real() == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("Cayley round trip, functional calculus and commutation transfer") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Index n = 1 + static_cast<Index>(seed % 5);
    const ComplexMatrix a = scenario::random_dissipative(n, seed);
    const auto t = cogenerator_from_generator(a);
    CHECK(dist(generator_from_cogenerator(t), a) <= 1e-10);
    for (double s : {0.0, 0.25, 1.0, 4.0}) {
      CHECK(dist(e_s_apply(t, s), expm(s * a)) <= 1e-10);
    }
    // semigroup law
    CHECK(dist(e_s_apply(t, 0.3) * e_s_apply(t, 0.9), e_s_apply(t, 1.2)) <= 1e-9);
    // r -> 1 consistency
    const double far = dist(e_sr_apply(t.matrix(), 1.0, 0.9), e_s_apply(t, 1.0));
    const double near = dist(e_sr_apply(t.matrix(), 1.0, 0.999), e_s_apply(t, 1.0));
    CHECK(near < far);
    CHECK(spectral_norm(e_sr_apply(t.matrix(), 2.0, 0.7)) <= 1.0 + 1e-9);

    const auto [a1, a2] = scenario::gen_commuting_dissipative(n, seed);
    const GeneratorPair pair(a1, a2);
    CHECK(commutator_norm(cogenerator_from_generator(a1).matrix(),
                          cogenerator_from_generator(a2).matrix()) <= 1e-10);
    CHECK(dist(pair.t1(0.5) * pair.t2(0.5), pair.t2(0.5) * pair.t1(0.5)) <= 1e-10);
  }
}

TEST_CASE("GeneratorPair rejects non-commuting generators") {
  const ComplexMatrix a1 = real_matrix(2, 2, {-1, 1, 0, -1});
  const ComplexMatrix a2 = real_matrix(2, 2, {-1, 0, 1, -1});
  try {
    GeneratorPair p(a1, a2);
    FAIL("expected throw");
  } catch (const PreconditionError& e) {
    CHECK(e.code() == "not_commuting");
  }
}
