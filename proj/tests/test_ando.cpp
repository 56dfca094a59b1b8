#include "dilation/ando.hpp"
#include "dilation/error.hpp"
#include "dilation/regular.hpp"
#include "dilation/scenario.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace dilation;
using namespace dilation::ando;
using namespace testing_support;

namespace {

ComplexMatrix power(const ComplexMatrix& m, int k) {
  ComplexMatrix p = identity(m.rows());
  for (int i = 0; i < k; ++i) p = p * m;
  return p;
}

ComplexMatrix direct_sum(std::initializer_list<ComplexMatrix> parts) {
  Index n = 0;
  for (const auto& p : parts) n += p.rows();
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  Index o = 0;
  for (const auto& p : parts) {
    out.block(o, o, p.rows(), p.cols()) = p;
    o += p.rows();
  }
  return out;
}

// Ando bundle padded with planted fixed vectors: V1 ⊕ I_a ⊕ R_b and
// V2 ⊕ I_a ⊕ I_b, then conjugated by I_H ⊕ (random unitary).
DilationBundle padded_bundle(const DilationBundle& b, Index a, Index nb, std::uint64_t seed) {
  const ComplexMatrix rb = -identity(nb);
  const ComplexMatrix v1 = direct_sum({b.op("V1"), identity(a), rb});
  const ComplexMatrix v2 = direct_sum({b.op("V2"), identity(a), identity(nb)});
  const Index d = b.h_dim();
  const Index n = v1.rows();
  const ComplexMatrix q = direct_sum({identity(d), random_unitary(n - d, seed)});
  DilationBundle out = b;
  out.decomposition.append("pad", a + nb);
  out.operators["V1"] = q * v1 * q.adjoint();
  out.operators["V2"] = q * v2 * q.adjoint();
  return out;
}

}  // namespace

TEST_CASE("schaffer examples") {
  const auto z = schaffer_truncated(scalar(0), 3);
  CHECK(z.dim() == 4);
  for (int n = 1; n <= 3; ++n) CHECK(std::abs(compress(power(z.op("V"), n), 1)(0, 0)) == 0.0);
  // lower shift
  CHECK(dist(z.op("V"), real_matrix(4, 4, {0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0})) == 0.0);

  const auto h = schaffer_truncated(scalar(0.5), 4);
  CHECK(compress(power(h.op("V"), 2), 1)(0, 0).real() == doctest::Approx(0.25).epsilon(1e-14));

  const auto i = schaffer_truncated(identity(2), 2);
  CHECK(dist(compress(i.op("V"), 2), identity(2)) <= 1e-15);
  CHECK(i.residuals.at("compression") <= 1e-15);
}

TEST_CASE("schaffer compression and truncated isometry on random contractions") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Index n = 1 + static_cast<Index>(seed % 6);
    const int depth = 1 + static_cast<int>(seed % 8);
    const auto b = schaffer_truncated(scenario::random_contraction(n, seed), depth);
    CHECK(b.residuals.at("compression") <= 1e-10);
    CHECK(b.residuals.at("isometry_interior") <= 1e-9);
    CHECK(compression_residual(b, depth) <= 1e-10);
  }
}

TEST_CASE("schaffer rejects non-contractions") {
  CHECK_THROWS_AS(schaffer_truncated(scalar(2), 3), PreconditionError);
}

TEST_CASE("ando on zero pair and nilpotent pair") {
  const auto z = ando_truncated(scalar(0), scalar(0), 4);
  CHECK(z.residuals.at("commutation_interior") <= 1e-12);
  CHECK(z.residuals.at("compression") <= 1e-12);

  const auto b = ando_truncated(nilpotent(), nilpotent(), 3);
  const ComplexMatrix pv = compress(b.op("V1") * b.op("V2"), 2);
  CHECK(spectral_norm(pv) <= 1e-12);
  CHECK(dist(compress(b.op("V1"), 2), nilpotent()) <= 1e-12);
  CHECK(b.residuals.at("commutation_interior") <= 1e-8);
  CHECK(b.residuals.at("isometry_interior_V1") <= 1e-9);
  CHECK(b.residuals.at("isometry_interior_V2") <= 1e-9);
}

TEST_CASE("ando contract on random commuting pairs") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Index n = 1 + static_cast<Index>(seed % 4);
    const auto [t1, t2] = scenario::gen_commuting_pair(n, seed);
    const auto b = ando_truncated(t1, t2, 4, seed);
    CHECK(interior_commutation_residual(b) <= 1e-8);
    CHECK(interior_isometry_residual(b, "V1") <= 1e-9);
    CHECK(interior_isometry_residual(b, "V2") <= 1e-9);
    // brute-force products against T1^m T2^n
    for (int m = 0; m <= 4; ++m) {
      for (int k = 0; m + k <= 4; ++k) {
        const ComplexMatrix lhs = compress(power(b.op("V1"), m) * power(b.op("V2"), k), n);
        CHECK(dist(lhs, power(t1, m) * power(t2, k)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("ando compressions match the naimark oracle on a tensor pair") {
  const auto [t1, t2] = scenario::gen_doubly_commuting(2, 2, 5);
  const auto b = ando_truncated(t1, t2, 3);
  const auto fam = regular::SemigroupFamily::with_unit_generators({t1, t2});
  const auto box = group_box({IndexElement::unit(2, 0), IndexElement::unit(2, 1)}, 1);
  const auto nb = regular::naimark_truncated(fam, box);
  int compared = 0;
  for (const auto& g : nb.representable) {
    if (!g.in_semigroup()) continue;
    const int m = static_cast<int>(g[0]);
    const int k = static_cast<int>(g[1]);
    const ComplexMatrix lhs = compress(power(b.op("V1"), m) * power(b.op("V2"), k), 4);
    CHECK(dist(lhs, nb.compression(g)) <= 1e-9);
    ++compared;
  }
  CHECK(compared == 4);
}

TEST_CASE("ando rejects non-commuting inputs and shallow depth") {
  const ComplexMatrix a = real_matrix(2, 2, {0, 0.5, 0, 0});
  const ComplexMatrix b = real_matrix(2, 2, {0, 0, 0.5, 0});
  CHECK_THROWS_AS(ando_truncated(a, b, 3), PreconditionError);
  CHECK_THROWS_AS(ando_truncated(scalar(0), scalar(0), 1), PreconditionError);
}

TEST_CASE("fixed-vector removal is the identity on shifts") {
  for (const auto& t : {scalar(0), nilpotent()}) {
    const auto b = ando_truncated(t, t, 3);
    const auto r = remove_fixed_vectors(b);
    CHECK(r.blocks.dims.at("Ltilde1") == 0);
    CHECK(r.blocks.dims.at("Ltilde2") == 0);
    CHECK(r.blocks.dims.at("L1") == 0);
    CHECK(r.blocks.dims.at("L2") == 0);
    CHECK(r.bundle.dim() == b.dim());
    CHECK(r.blocks.pass());
    CHECK(r.bundle.residuals.at("reduction_compression_shift") <= 1e-10);
  }
}

TEST_CASE("fixed-vector removal finds planted fixed vectors") {
  const auto [t1, t2] = scenario::gen_commuting_pair(2, 3);
  const auto base = ando_truncated(t1, t2, 3, 3);
  const auto padded = padded_bundle(base, 2, 3, 99);
  const auto r = remove_fixed_vectors(padded);
  CHECK(r.blocks.dims.at("Ltilde1") == 2);
  CHECK(r.blocks.dims.at("Ltilde2") == 5);
  CHECK(r.blocks.dims.at("L1") == 2);
  CHECK(r.blocks.dims.at("L2") == 3);
  CHECK(r.blocks.dims.at("L") == 3);
  CHECK(r.bundle.dim() == base.dim());
  for (const char* key : {"B", "C", "Y", "Z", "L1_identity", "W1_Z"}) {
    CHECK(r.blocks.residuals.at(key) <= 1e-8);
  }
  CHECK(r.bundle.residuals.at("reduction_compression_shift") <= 1e-10);
  CHECK(r.bundle.residuals.at("gap_U1") > 1e-6);
  CHECK(r.bundle.residuals.at("gap_U2") > 1e-6);
}

TEST_CASE("planted B block is reported and fails the verdict") {
  SpaceDecomposition dec(std::vector<SpaceDecomposition::Block>{
      {"H", 1}, {"M", 2}, {"L1", 2}, {"L2", 1}});
  const ComplexMatrix rnd = random_unitary(6, 17);
  ComplexMatrix planted = rnd.block(0, 0, 2, 3);
  DilationBundle b;
  b.decomposition = dec;
  ComplexMatrix v1 = identity(6);
  v1.block(3, 0, 2, 3) = 0.1 * planted;
  b.operators["V1"] = v1;
  b.operators["V2"] = identity(6);
  const auto rep = verify_block_structure(b, dec);
  CHECK(rep.residuals.at("B") == doctest::Approx(0.1 * spectral_norm(planted)).epsilon(1e-12));
  CHECK(rep.residuals.at("C") == 0.0);
  CHECK_FALSE(rep.pass());

  SpaceDecomposition empty(std::vector<SpaceDecomposition::Block>{
      {"H", 2}, {"M", 1}, {"L1", 0}, {"L2", 0}});
  DilationBundle e;
  e.decomposition = empty;
  e.operators["V1"] = identity(3);
  e.operators["V2"] = identity(3);
  const auto er = verify_block_structure(e, empty);
  for (const char* key : {"B", "C", "Y", "Z"}) CHECK(er.residuals.at(key) == 0.0);
  CHECK(er.pass());
}

TEST_CASE("fixed-vector removal needs the eigenvalue gap") {
  const auto b = ando_truncated(scalar(1.0), scalar(0.0), 3);
  try {
    remove_fixed_vectors(b);
    FAIL("expected throw");
  } catch (const PreconditionError& e) {
    CHECK(e.code() == "eigenvalue_one");
  }
}

TEST_CASE("continuous pipeline on scalar generators") {
  cogen::GeneratorPair same(scalar(-1), scalar(-1));
  const auto b = continuous_pair_dilation(same, 4);
  CHECK(b.residuals.at("semigroup_law") <= 1e-10);
  CHECK(spectral_norm(compress(b.op("T1"), 1)) <= 1e-15);

  cogen::GeneratorPair pair(scalar(-1), scalar(-2));
  const auto c = continuous_pair_dilation(pair, 6);
  CHECK(c.residuals.at("semigroup_law") <= 1e-8);
  CHECK(c.residuals.at("commutation") <= 1e-7);
  CHECK(dilation_compression_residual(c, 0.0, 0.0) == 0.0);
  for (const auto& p : default_grid()) {
    CHECK(dilation_compression_residual(c, p.s, p.t) <= 0.05);
  }
  const auto [v1, v2] = c.evaluate(0.7, 1.3);
  CHECK(commutator_norm(v1, v2) <= 1e-7);

  cogen::GeneratorPair zero(ComplexMatrix::Zero(1, 1), ComplexMatrix::Zero(1, 1));
  const auto z = continuous_pair_dilation(zero, 3);
  // identity on H; the unreachable padding is not
  const auto [i1, i2] = z.evaluate(1.5, 0.5);
  const ComplexMatrix eh = z.embedding();
  CHECK(dist(i1 * eh, eh) <= 1e-12);
  CHECK(dist(i2 * eh, eh) <= 1e-12);
  const auto zm = minimal_restriction(z, default_grid());
  const auto [m1, m2] = zm.evaluate(1.5, 0.5);
  CHECK(dist(m1, identity(1)) <= 1e-12);
  CHECK(dist(m2, identity(1)) <= 1e-12);
}

TEST_CASE("continuous pipeline specialisation and depth comparison") {
  cogen::GeneratorPair pair(scalar(-1), scalar(-2));
  const auto b6 = continuous_pair_dilation(pair, 6);
  const auto b8 = continuous_pair_dilation(pair, 8);
  CHECK(dilation_compression_residual(b8, 0.5, 0.5) <= dilation_compression_residual(b6, 0.5, 0.5));
  for (double t : {0.25, 1.0}) {
    CHECK(dilation_compression_residual(b6, 0.0, t) <=
          std::max(dilation_compression_residual(b6, 0.5, t), 1e-14));
  }
}

TEST_CASE("continuous pipeline on random diagonalisable generators") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto [a1, a2] = scenario::gen_commuting_dissipative(2, seed);
    const auto b = continuous_pair_dilation(cogen::GeneratorPair(a1, a2), 4);
    CHECK(b.residuals.at("semigroup_law") <= 1e-8);
    CHECK(b.residuals.at("commutation") <= 1e-7);
    CHECK(b.residuals.at("grid_compression") <= 0.05);
  }
}

TEST_CASE("minimal restriction examples") {
  cogen::GeneratorPair zero(ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(2, 2));
  const auto z = continuous_pair_dilation(zero, 3);
  const auto zm = minimal_restriction(z, default_grid());
  CHECK(zm.dim() == 2);

  const int depth = 4;
  const auto b = ando_truncated(scalar(0), scalar(0), depth);
  std::vector<GridPoint> mono;
  for (int m = 0; m <= depth; ++m)
    for (int n = 0; m + n <= depth; ++n) mono.push_back({double(m), double(n)});
  const auto bm = minimal_restriction(b, mono);
  CHECK(bm.dim() == depth + 1);
  CHECK(bm.dim() <= b.dim());
  CHECK(bm.residuals.at("minimal_compression_shift") <= 1e-9);
}

TEST_CASE("minimal restriction drops an unreachable padding block") {
  const auto [t1, t2] = scenario::gen_commuting_pair(2, 8);
  const auto b = ando_truncated(t1, t2, 3);
  std::vector<GridPoint> mono;
  for (int m = 0; m <= 3; ++m)
    for (int n = 0; m + n <= 3; ++n) mono.push_back({double(m), double(n)});
  const auto plain = minimal_restriction(b, mono);
  DilationBundle padded = b;
  padded.decomposition.append("pad", 3);
  padded.operators["V1"] = direct_sum({b.op("V1"), identity(3)});
  padded.operators["V2"] = direct_sum({b.op("V2"), identity(3)});
  const auto pm = minimal_restriction(padded, mono);
  CHECK(pm.dim() == plain.dim());
  CHECK(padded.dim() - pm.dim() == b.dim() - plain.dim() + 3);
}
