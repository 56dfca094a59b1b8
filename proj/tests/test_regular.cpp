#include "dilation/error.hpp"
#include "dilation/regular.hpp"
#include "dilation/scenario.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace dilation;
using namespace dilation::regular;
using namespace testing_support;

namespace {

IndexElement el(std::initializer_list<long> coords) {
  std::vector<Rational> v;
  for (long c : coords) v.emplace_back(c);
  return IndexElement(v.size(), v);
}

std::vector<IndexElement> unit_box(std::size_t k, std::size_t depth = 1) {
  std::vector<IndexElement> gens;
  for (std::size_t j = 0; j < k; ++j) gens.push_back(IndexElement::unit(k, j));
  return group_box(gens, depth);
}

}  // namespace

TEST_CASE("t_hat examples") {
  const ComplexMatrix t = real_matrix(2, 2, {0.3, 0.1, 0, 0.2});
  const auto single = SemigroupFamily::with_unit_generators({t});
  CHECK(dist(t_hat(single, el({0})), identity(2)) == 0.0);
  CHECK(dist(t_hat(single, el({-2})), (t * t).adjoint()) <= 1e-15);

  const ComplexMatrix a = real_matrix(2, 2, {0.5, 0, 0, 0.1});
  const ComplexMatrix b = real_matrix(2, 2, {0.2, 0, 0, 0.7});
  const auto pair = SemigroupFamily::with_unit_generators({a, b});
  CHECK(dist(t_hat(pair, el({1, -1})), b.adjoint() * a) <= 1e-15);
}

TEST_CASE("rational generators evaluate on their lattice") {
  const ComplexMatrix t = scalar(0.5);
  SemigroupFamily fam({IndexElement::unit(1, 0, Rational(1, 2))}, {t});
  CHECK(fam.evaluate(IndexElement::unit(1, 0, Rational(3, 2)))(0, 0).real() ==
        doctest::Approx(0.125));
  CHECK_FALSE(fam.in_lattice(IndexElement::unit(1, 0, Rational(1, 3))));
  CHECK_THROWS(fam.evaluate(IndexElement::unit(1, 0, Rational(1, 3))));
}

TEST_CASE("brehmer fixtures") {
  const auto single = SemigroupFamily::with_unit_generators({scalar(0.5)});
  const auto v1 = brehmer_check(single, el({1}), SubsetMask({0}, 1));
  CHECK(v1.pass);
  CHECK(v1.min_eigenvalue == doctest::Approx(0.75));

  const auto nil = SemigroupFamily::with_unit_generators({nilpotent(), nilpotent()});
  const ComplexMatrix sum = brehmer_sum(nil, el({1, 1}), SubsetMask({0, 1}, 2));
  CHECK(dist(sum, real_matrix(2, 2, {1, 0, 0, -0.62})) <= 1e-12);
  const auto v2 = brehmer_check(nil, el({1, 1}), SubsetMask({0, 1}, 2));
  CHECK_FALSE(v2.pass);
  CHECK(std::abs(v2.min_eigenvalue + 0.62) <= 1e-9);

  const auto [a, b] = scenario::gen_doubly_commuting(2, 2, 3);
  const auto tensor = SemigroupFamily::with_unit_generators({a, b});
  CHECK(brehmer_check(tensor, el({1, 1}), SubsetMask({0, 1}, 2)).pass);
  // factorises as (I - A*A) ⊗ (I - B*B)
  const ComplexMatrix lhs = brehmer_sum(tensor, el({1, 1}), SubsetMask({0, 1}, 2));
  const ComplexMatrix rhs = (identity(4) - a.adjoint() * a) * (identity(4) - b.adjoint() * b);
  CHECK(dist(lhs, rhs) <= 1e-12);
}

TEST_CASE("brehmer rejects oversized subsets") {
  std::vector<ComplexMatrix> ops(21, scalar(0.1));
  const auto fam = SemigroupFamily::with_unit_generators(ops);
  IndexElement s(21);
  for (std::size_t j = 0; j < 21; ++j) s.set(j, 1);
  CHECK_THROWS_AS(brehmer_check(fam, s, SubsetMask::full(21)), PreconditionError);
}

TEST_CASE("doubly commuting check") {
  const auto [a, b] = scenario::gen_doubly_commuting(2, 2, 1);
  const auto r = doubly_commuting_check(SemigroupFamily::with_unit_generators({a, b}));
  CHECK(r.passed());
  CHECK(r.checks.front().value <= 1e-12);
  CHECK_FALSE(
      doubly_commuting_check(SemigroupFamily::with_unit_generators({nilpotent(), nilpotent()}))
          .passed());
  const ComplexMatrix d1 = real_matrix(2, 2, {0.5, 0, 0, -0.3});
  const ComplexMatrix d2 = real_matrix(2, 2, {0.1, 0, 0, 0.9});
  CHECK(doubly_commuting_check(SemigroupFamily::with_unit_generators({d1, d2})).passed());
}

TEST_CASE("kernel gram examples") {
  const auto single = SemigroupFamily::with_unit_generators({scalar(0.5)});
  const auto g = kernel_gram(single, group_box({el({1})}, 2));
  CHECK(dist(g.gram, real_matrix(3, 3, {1, .5, .25, .5, 1, .5, .25, .5, 1})) <= 1e-15);
  CHECK(g.psd.pass);

  const auto units = SemigroupFamily::with_unit_generators(scenario::random_unitary_family(2, 2, 4));
  CHECK(kernel_gram(units, unit_box(2)).psd.pass);

  const auto nil = SemigroupFamily::with_unit_generators({nilpotent(), nilpotent()});
  const auto ng = kernel_gram(nil, unit_box(2));
  CHECK(ng.gram.rows() == 8);
  CHECK_FALSE(ng.psd.pass);
  CHECK(ng.psd.min_eigenvalue < 0.0);
}

TEST_CASE("naimark on the zero contraction and identity family") {
  const auto zero = SemigroupFamily::with_unit_generators({scalar(0)});
  const auto box = group_box({el({1})}, 3);
  const auto b = naimark_truncated(zero, box);
  CHECK(b.space_dim() == 4);
  CHECK(b.residuals.at("identity") <= 1e-12);
  CHECK(regular_identity_residual(b, zero) <= 1e-12);
  const auto iso = isometric_from_unitary(b);
  CHECK(iso.residuals.at("restricted_isometry") <= 1e-9);
  CHECK(iso.residuals.at("restricted_dim") == 4);

  const auto ident = SemigroupFamily::with_unit_generators({identity(2), identity(2)});
  const auto ib = naimark_truncated(ident, unit_box(2));
  CHECK(ib.space_dim() == 2);
  for (const auto& g : ib.representable) CHECK(dist(ib.compression(g), identity(2)) <= 1e-12);
  CHECK(isometric_from_unitary(ib).residuals.at("restricted_dim") == 2);
  CHECK(extension_check(ib, ident).passed());
}

TEST_CASE("naimark identities and gram determinacy on tensor pairs") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto [a, b] = scenario::gen_doubly_commuting(2, 1 + seed % 2, seed);
    const auto fam = SemigroupFamily::with_unit_generators({a, b});
    const auto box = unit_box(2, 1 + seed % 2);
    const auto n1 = naimark_truncated(fam, box, 0);
    const auto n2 = naimark_truncated(fam, box, 12345 + seed);
    CHECK(regular_identity_residual(n1, fam) <= 1e-9);
    CHECK(regular_identity_residual(n2, fam) <= 1e-9);
    CHECK(gram_determinacy_residual(n1, n2) <= 1e-10);
    CHECK(n1.residuals.at("shift_unitarity") <= 1e-10);
    CHECK(isometric_from_unitary(n1).residuals.at("restricted_isometry") <= 1e-9);
  }
}

TEST_CASE("naimark rejects non-positive kernels") {
  const auto nil = SemigroupFamily::with_unit_generators({nilpotent(), nilpotent()});
  try {
    naimark_truncated(nil, unit_box(2));
    FAIL("expected throw");
  } catch (const PreconditionError& e) {
    CHECK(e.code() == "not_positive_definite");
  }
}

TEST_CASE("extension check") {
  const ComplexMatrix u = real_matrix(2, 2, {0, 1, 1, 0});
  const ComplexMatrix d(ComplexMatrix::Identity(2, 2) * std::polar(1.0, 0.4));
  const auto fam = SemigroupFamily::with_unit_generators({u, d});
  const auto b = naimark_truncated(fam, unit_box(2));
  CHECK(extension_check(b, fam).passed());

  const auto strict = SemigroupFamily::with_unit_generators({scalar(0.5)});
  const auto sb = naimark_truncated(strict, group_box({el({1})}, 2));
  CHECK_THROWS_AS(extension_check(sb, strict), PreconditionError);
}

TEST_CASE("coisometric dilation") {
  ComplexMatrix rot(1, 1);
  rot(0, 0) = std::polar(1.0, 0.7);
  const auto scalar_fam = SemigroupFamily::with_unit_generators({rot});
  const auto r0 = coisometric_dilation(scalar_fam, group_box({el({1})}, 2));
  CHECK(r0.report.passed());
  CHECK(r0.adjoint_bundle.space_dim() == 1);

  const ComplexMatrix p = real_matrix(3, 3, {0, 0, 1, 1, 0, 0, 0, 1, 0});
  const auto perm = SemigroupFamily::with_unit_generators({p, p * p});
  const auto r = coisometric_dilation(perm, unit_box(2), 5);
  CHECK(r.report.passed());
  CHECK(r.report.find("coisometric_identity")->value <= 1e-10);
  CHECK(r.report.find("span_deficiency")->value == 0.0);
  for (const auto& g : r.adjoint_bundle.representable) {
    const auto parts = pos_neg_parts(g);
    const ComplexMatrix expect = perm.evaluate(parts.minus) * perm.evaluate(parts.plus).adjoint();
    CHECK(dist(r.compression(g), expect) <= 1e-10);
  }

  const auto strict = SemigroupFamily::with_unit_generators({scalar(0.5)});
  try {
    coisometric_dilation(strict, group_box({el({1})}, 1));
    FAIL("expected throw");
  } catch (const PreconditionError& e) {
    CHECK(e.code() == "not_coisometric");
  }
}

TEST_CASE("gram PSD agrees with the brehmer sweep on commuting pairs") {
  int agree = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto [a, b] = scenario::gen_commuting_pair(1 + seed % 3, seed);
    const auto fam = SemigroupFamily::with_unit_generators({a, b});
    const auto box = unit_box(2);
    agree += kernel_gram(fam, box).psd.pass == brehmer_box_check(fam, box).pass;
  }
  CHECK(agree == 40);
}
