#include "dilation/regular.hpp"

#include "dilation/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace dilation::regular {

namespace mp = boost::multiprecision;

namespace {

constexpr double kCommuteRel = 1e-10;
constexpr double kContractionSlack = 1e-9;
constexpr double kIsometryTol = 1e-10;
// Gram eigenvalues at or below this (relative) floor are dropped from the
// frame; they are rounding noise of a semidefinite kernel.
constexpr double kFactorFloor = 1e-12;

std::vector<long> lattice_exponents(const std::vector<IndexElement>& generators,
                                    const IndexElement& s) {
  std::vector<long> out(generators.size(), 0);
  std::size_t matched = 0;
  for (std::size_t i = 0; i < generators.size(); ++i) {
    const auto& g = generators[i];
    const auto& [coord, base] = *g.support().begin();
    const Rational q = s[coord] / base;
    if (mp::denominator(q) != 1) {
      throw PreconditionError("outside_lattice",
                              s.to_string() + " is not on the generator lattice");
    }
    out[i] = static_cast<long>(mp::numerator(q));
    if (s[coord] != 0) ++matched;
  }
  if (matched != s.support().size()) {
    throw PreconditionError("outside_lattice",
                            s.to_string() + " uses a coordinate without a generator");
  }
  return out;
}

ComplexMatrix matrix_power(const ComplexMatrix& m, long k) {
  ComplexMatrix out = identity(m.rows());
  for (long i = 0; i < k; ++i) out = out * m;
  return out;
}

bool contains(const std::vector<IndexElement>& box, const IndexElement& p) {
  return std::find(box.begin(), box.end(), p) != box.end();
}

// Points visited by applying the generators coordinate by coordinate.
bool path_in_box(const std::vector<IndexElement>& box,
                 const std::vector<IndexElement>& generators, const IndexElement& s) {
  const auto ex = lattice_exponents(generators, s);
  IndexElement at(s.omega_size());
  for (std::size_t i = 0; i < generators.size(); ++i) {
    for (long c = 0; c < ex[i]; ++c) {
      at = at + generators[i];
      if (!contains(box, at)) return false;
    }
  }
  return true;
}

ComplexMatrix stack_embeddings(const NaimarkBundle& b, const std::vector<IndexElement>& pts) {
  ComplexMatrix out(b.space_dim(), b.h_dim * static_cast<Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out.middleCols(b.h_dim * static_cast<Index>(i), b.h_dim) = b.embedding(pts[i]);
  }
  return out;
}

}  // namespace

// -- SemigroupFamily -----------------------------------------------------------

SemigroupFamily::SemigroupFamily(std::vector<IndexElement> generators,
                                 std::vector<ComplexMatrix> operators)
    : generators_(std::move(generators)), operators_(std::move(operators)) {
  if (generators_.empty() || generators_.size() != operators_.size()) {
    throw PreconditionError("bad_family", "need one operator per generator, at least one");
  }
  omega_size_ = generators_.front().omega_size();
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    const auto& g = generators_[i];
    if (g.omega_size() != omega_size_) {
      throw PreconditionError("omega_mismatch", "generators over different Ω");
    }
    if (g.support().size() != 1 || !g.in_semigroup()) {
      throw PreconditionError("bad_generator",
                              "generator " + g.to_string() + " must be r e_j with r > 0");
    }
    const std::size_t coord = g.support().begin()->first;
    if (!by_coord_.emplace(coord, i).second) {
      throw PreconditionError("bad_generator", "two generators on coordinate " +
                                                   std::to_string(coord));
    }
    const auto& t = operators_[i];
    require_square(t, "family operator");
    require_finite(t, "family operator");
    if (t.rows() != operators_.front().rows()) {
      throw PreconditionError("dimension_mismatch", "family operators of different sizes");
    }
    const double norm = spectral_norm(t);
    if (norm > 1.0 + kContractionSlack) {
      throw PreconditionError("not_a_contraction",
                              "family operator " + std::to_string(i) + " has norm " +
                                  std::to_string(norm),
                              norm);
    }
  }
  for (std::size_t i = 0; i < operators_.size(); ++i) {
    for (std::size_t j = i + 1; j < operators_.size(); ++j) {
      const double c = commutator_norm(operators_[i], operators_[j]);
      const double scale =
          std::max(1.0, spectral_norm(operators_[i]) * spectral_norm(operators_[j]));
      if (c > kCommuteRel * scale) {
        throw PreconditionError("not_commuting",
                                "operators " + std::to_string(i) + " and " +
                                    std::to_string(j) + " do not commute",
                                c);
      }
    }
  }
}

SemigroupFamily SemigroupFamily::with_unit_generators(std::vector<ComplexMatrix> operators) {
  std::vector<IndexElement> gens;
  for (std::size_t j = 0; j < operators.size(); ++j) {
    gens.push_back(IndexElement::unit(operators.size(), j));
  }
  return SemigroupFamily(std::move(gens), std::move(operators));
}

std::vector<long> SemigroupFamily::exponents(const IndexElement& s) const {
  if (s.omega_size() != omega_size_) {
    throw PreconditionError("omega_mismatch", "index element over a different Ω");
  }
  return lattice_exponents(generators_, s);
}

bool SemigroupFamily::in_lattice(const IndexElement& g) const {
  try {
    exponents(g);
    return true;
  } catch (const PreconditionError&) {
    return false;
  }
}

ComplexMatrix SemigroupFamily::evaluate(const IndexElement& s) const {
  if (!s.in_semigroup()) {
    throw PreconditionError("not_in_semigroup", s.to_string() + " has a negative coordinate");
  }
  const auto ex = exponents(s);
  ComplexMatrix out = identity(dim());
  for (std::size_t i = 0; i < ex.size(); ++i) out = out * matrix_power(operators_[i], ex[i]);
  return out;
}

SemigroupFamily SemigroupFamily::adjoint() const {
  std::vector<ComplexMatrix> adj;
  for (const auto& t : operators_) adj.push_back(t.adjoint());
  return SemigroupFamily(generators_, std::move(adj));
}

// -- kernel and positivity -------------------------------------------------------

ComplexMatrix t_hat(const SemigroupFamily& family, const IndexElement& g) {
  const auto parts = pos_neg_parts(g);
  return family.evaluate(parts.minus).adjoint() * family.evaluate(parts.plus);
}

ComplexMatrix brehmer_sum(const SemigroupFamily& family, const IndexElement& s,
                          const SubsetMask& v) {
  if (!s.in_semigroup()) {
    throw PreconditionError("not_in_semigroup", s.to_string() + " has a negative coordinate");
  }
  if (v.size() > kMaxBrehmerSubset) {
    throw PreconditionError("subset_too_large",
                            "|v| = " + std::to_string(v.size()) + " exceeds 20",
                            static_cast<double>(v.size()));
  }
  const auto& members = v.members();
  ComplexMatrix sum = ComplexMatrix::Zero(family.dim(), family.dim());
  const std::size_t count = std::size_t{1} << members.size();
  for (std::size_t bits = 0; bits < count; ++bits) {
    std::vector<std::size_t> u;
    for (std::size_t k = 0; k < members.size(); ++k) {
      if (bits & (std::size_t{1} << k)) u.push_back(members[k]);
    }
    const ComplexMatrix ts = family.evaluate(mask(s, SubsetMask(u, v.omega_size())));
    const double sign = (u.size() % 2 == 0) ? 1.0 : -1.0;
    sum += sign * (ts.adjoint() * ts);
  }
  return sum;
}

PsdVerdict brehmer_check(const SemigroupFamily& family, const IndexElement& s,
                         const SubsetMask& v, Tolerance tol) {
  return psd_check(brehmer_sum(family, s, v), tol);
}

BrehmerSweep brehmer_box_check(const SemigroupFamily& family,
                               const std::vector<IndexElement>& box, Tolerance tol) {
  BrehmerSweep sweep;
  sweep.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& s : box) {
    if (!s.in_semigroup() || s.is_zero()) continue;
    std::vector<std::size_t> supp;
    for (const auto& kv : s.support()) supp.push_back(kv.first);
    const std::size_t count = std::size_t{1} << supp.size();
    for (std::size_t bits = 1; bits < count; ++bits) {
      std::vector<std::size_t> v;
      for (std::size_t k = 0; k < supp.size(); ++k) {
        if (bits & (std::size_t{1} << k)) v.push_back(supp[k]);
      }
      const auto verdict = brehmer_check(family, s, SubsetMask(v, s.omega_size()), tol);
      sweep.pass = sweep.pass && verdict.pass;
      sweep.min_eigenvalue = std::min(sweep.min_eigenvalue, verdict.min_eigenvalue);
      ++sweep.tested;
    }
  }
  if (sweep.tested == 0) sweep.min_eigenvalue = 0.0;
  return sweep;
}

Report doubly_commuting_check(const SemigroupFamily& family) {
  if (family.size() < 2) {
    throw PreconditionError("too_few_generators", "doubly commuting needs >= 2 generators");
  }
  double worst = 0.0;
  double scale = 1.0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    scale = std::max(scale, spectral_norm(family.op(i)) * spectral_norm(family.op(i)));
    for (std::size_t j = 0; j < family.size(); ++j) {
      if (i == j) continue;
      const ComplexMatrix& ti = family.op(i);
      const ComplexMatrix& tj = family.op(j);
      worst = std::max(worst, spectral_norm(tj * ti.adjoint() - ti.adjoint() * tj));
    }
  }
  Report r;
  r.scenario = "doubly_commuting";
  r.add_upper("doubly_commuting_residual", "regular.doubly_commuting", worst, 1e-9 * scale);
  return r;
}

GramResult kernel_gram(const SemigroupFamily& family, const std::vector<IndexElement>& box,
                       Tolerance tol) {
  const Index d = family.dim();
  const Index nb = static_cast<Index>(box.size());
  for (const auto& p : box) {
    if (!family.in_lattice(p)) {
      throw PreconditionError("outside_lattice", "box point " + p.to_string() +
                                                     " is not on the family lattice");
    }
  }
  GramResult out;
  out.gram = ComplexMatrix::Zero(nb * d, nb * d);
  for (Index p = 0; p < nb; ++p) {
    for (Index q = p; q < nb; ++q) {
      const ComplexMatrix blk = t_hat(family, box[q] - box[p]);
      out.gram.block(p * d, q * d, d, d) = blk;
      if (q != p) out.gram.block(q * d, p * d, d, d) = blk.adjoint();
    }
  }
  out.psd = psd_check(out.gram, tol);
  return out;
}

// -- Naimark construction ------------------------------------------------------

std::size_t NaimarkBundle::position(const IndexElement& s) const {
  const auto it = std::find(box.begin(), box.end(), s);
  if (it == box.end()) {
    throw PreconditionError("outside_box", s.to_string() + " is not in the box");
  }
  return static_cast<std::size_t>(it - box.begin());
}

ComplexMatrix NaimarkBundle::embedding(const IndexElement& s) const {
  return factor.middleCols(h_dim * static_cast<Index>(position(s)), h_dim);
}

ComplexMatrix NaimarkBundle::shift_power(const IndexElement& s) const {
  const auto ex = lattice_exponents(generators, s);
  ComplexMatrix out = identity(space_dim());
  for (std::size_t i = 0; i < ex.size(); ++i) {
    for (long c = 0; c < ex[i]; ++c) out = shifts[i] * out;
  }
  return out;
}

ComplexMatrix NaimarkBundle::compression(const IndexElement& g) const {
  const auto parts = pos_neg_parts(g);
  const IndexElement zero(g.omega_size());
  const ComplexMatrix j0 = embedding(zero);
  return j0.adjoint() * shift_power(parts.minus).adjoint() * shift_power(parts.plus) * j0;
}

NaimarkBundle naimark_truncated(const SemigroupFamily& family,
                                const std::vector<IndexElement>& box, std::uint64_t seed,
                                Tolerance tol) {
  const IndexElement zero(family.omega_size());
  if (!contains(box, zero)) throw PreconditionError("bad_box", "box must contain 0");
  GramResult g = kernel_gram(family, box, tol);
  if (!g.psd.pass) {
    throw PreconditionError("not_positive_definite",
                            "kernel Gram has eigenvalue " + std::to_string(g.psd.min_eigenvalue),
                            g.psd.min_eigenvalue);
  }

  NaimarkBundle b;
  b.box = box;
  b.generators = family.generators();
  b.h_dim = family.dim();
  b.seed = seed;
  b.gram = std::move(g.gram);

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (b.gram + b.gram.adjoint()));
  const auto& ev = es.eigenvalues();
  const double floor = kFactorFloor * std::max(1.0, ev(ev.size() - 1));
  std::vector<Index> kept;
  for (Index i = ev.size() - 1; i >= 0; --i) {
    if (ev(i) > floor) kept.push_back(i);
  }
  b.factor = ComplexMatrix(static_cast<Index>(kept.size()), b.gram.cols());
  for (std::size_t r = 0; r < kept.size(); ++r) {
    b.factor.row(static_cast<Index>(r)) =
        std::sqrt(ev(kept[r])) * es.eigenvectors().col(kept[r]).adjoint();
  }
  const Index dim = b.space_dim();

  for (std::size_t a = 0; a < b.generators.size(); ++a) {
    std::vector<IndexElement> from;
    std::vector<IndexElement> to;
    for (const auto& s : box) {
      const IndexElement next = s + b.generators[a];
      if (contains(box, next)) {
        from.push_back(s);
        to.push_back(next);
      }
    }
    const std::uint64_t sub_seed = seed == 0 ? 0 : seed * 1000003ULL + a + 1;
    b.shifts.push_back(extend_isometry_to_unitary(stack_embeddings(b, from),
                                                  stack_embeddings(b, to), dim, sub_seed,
                                                  Tolerance(1e-8)));
  }

  for (const auto& p : box) {
    if (!p.in_semigroup()) continue;
    for (const auto& q : box) {
      if (!q.in_semigroup()) continue;
      const IndexElement diff = p - q;
      const auto parts = pos_neg_parts(diff);
      if (contains(box, parts.plus) && contains(box, parts.minus) &&
          path_in_box(box, b.generators, parts.plus) &&
          path_in_box(box, b.generators, parts.minus)) {
        b.representable.push_back(diff);
      }
    }
  }
  std::sort(b.representable.begin(), b.representable.end());
  b.representable.erase(std::unique(b.representable.begin(), b.representable.end()),
                        b.representable.end());

  b.residuals["gram_factor"] = spectral_norm(b.factor.adjoint() * b.factor - b.gram);
  b.residuals["J0_isometry"] = isometry_residual(b.embedding(zero));
  double unitarity = 0.0;
  for (const auto& u : b.shifts) unitarity = std::max(unitarity, isometry_residual(u));
  b.residuals["shift_unitarity"] = unitarity;
  b.residuals["identity"] = regular_identity_residual(b, family);
  return b;
}

double regular_identity_residual(const NaimarkBundle& bundle, const SemigroupFamily& family) {
  double worst = 0.0;
  for (const auto& g : bundle.representable) {
    worst = std::max(worst, spectral_norm(bundle.compression(g) - t_hat(family, g)));
  }
  return worst;
}

double gram_determinacy_residual(const NaimarkBundle& a, const NaimarkBundle& b) {
  double worst = 0.0;
  for (const auto& g : a.representable) {
    if (!contains(b.representable, g)) continue;
    worst = std::max(worst, spectral_norm(a.compression(g) - b.compression(g)));
  }
  return worst;
}

NaimarkBundle isometric_from_unitary(const NaimarkBundle& bundle) {
  std::vector<IndexElement> nonneg;
  for (const auto& s : bundle.box) {
    if (s.in_semigroup()) nonneg.push_back(s);
  }
  const ComplexMatrix q = span_orthonormalize(stack_embeddings(bundle, nonneg), Tolerance(1e-10));

  NaimarkBundle out = bundle;
  out.restricted = true;
  out.factor = q.adjoint() * bundle.factor;
  out.shifts.clear();
  for (const auto& u : bundle.shifts) out.shifts.push_back(q.adjoint() * u * q);
  out.representable.clear();
  for (const auto& g : bundle.representable) {
    const auto parts = pos_neg_parts(g);
    if (contains(nonneg, parts.plus) && contains(nonneg, parts.minus)) {
      out.representable.push_back(g);
    }
  }

  double isometry = 0.0;
  double invariance = 0.0;
  const ComplexMatrix outside = identity(bundle.space_dim()) - q * q.adjoint();
  for (std::size_t a = 0; a < bundle.generators.size(); ++a) {
    std::vector<IndexElement> from;
    for (const auto& s : nonneg) {
      if (contains(nonneg, s + bundle.generators[a])) from.push_back(s);
    }
    if (from.empty()) continue;
    const ComplexMatrix js = stack_embeddings(bundle, from);
    const ComplexMatrix dom = span_orthonormalize(q.adjoint() * js, Tolerance(1e-10));
    isometry = std::max(isometry, isometry_residual(out.shifts[a] * dom));
    invariance = std::max(invariance, spectral_norm(outside * bundle.shifts[a] * js));
  }
  double shift = 0.0;
  for (const auto& g : out.representable) {
    shift = std::max(shift, spectral_norm(out.compression(g) - bundle.compression(g)));
  }
  out.residuals["restricted_isometry"] = isometry;
  out.residuals["restricted_invariance"] = invariance;
  out.residuals["restricted_identity_shift"] = shift;
  out.residuals["restricted_dim"] = static_cast<double>(q.cols());
  return out;
}

Report extension_check(const NaimarkBundle& bundle, const SemigroupFamily& family) {
  for (std::size_t a = 0; a < family.size(); ++a) {
    const double r = isometry_residual(family.op(a));
    if (r > kIsometryTol) {
      throw PreconditionError("not_isometric",
                              "family operator " + std::to_string(a) + " has ‖T*T - I‖ = " +
                                  std::to_string(r),
                              r);
    }
  }
  const IndexElement zero(family.omega_size());
  const ComplexMatrix j0 = bundle.embedding(zero);
  double worst = 0.0;
  for (std::size_t a = 0; a < family.size(); ++a) {
    worst = std::max(worst, spectral_norm(bundle.shifts[a] * j0 - j0 * family.op(a)));
  }
  Report r;
  r.scenario = "extension";
  r.add_upper("extension_residual", "regular.extension", worst, 1e-9);
  return r;
}

// -- coisometric wrapper ---------------------------------------------------------

ComplexMatrix CoisometricResult::compression(const IndexElement& g) const {
  const auto parts = pos_neg_parts(g);
  // U_s = W_s*, with W_s applied coordinate by coordinate.
  auto u_power = [&](const IndexElement& s) {
    const auto ex = lattice_exponents(adjoint_bundle.generators, s);
    ComplexMatrix out = identity(adjoint_bundle.space_dim());
    for (std::size_t i = 0; i < ex.size(); ++i) {
      for (long c = 0; c < ex[i]; ++c) out = out * unitaries[i];
    }
    return out;
  };
  const ComplexMatrix j0 = adjoint_bundle.embedding(IndexElement(g.omega_size()));
  return j0.adjoint() * u_power(parts.minus) * u_power(parts.plus).adjoint() * j0;
}

CoisometricResult coisometric_dilation(const SemigroupFamily& family,
                                       const std::vector<IndexElement>& box,
                                       std::uint64_t seed) {
  for (std::size_t a = 0; a < family.size(); ++a) {
    const ComplexMatrix& t = family.op(a);
    const double r = spectral_norm(t * t.adjoint() - identity(t.rows()));
    if (r > kIsometryTol) {
      throw PreconditionError("not_coisometric",
                              "family operator " + std::to_string(a) + " has ‖TT* - I‖ = " +
                                  std::to_string(r),
                              r);
    }
  }
  const SemigroupFamily adj = family.adjoint();
  CoisometricResult out;
  out.adjoint_bundle = naimark_truncated(adj, box, seed);
  for (const auto& w : out.adjoint_bundle.shifts) out.unitaries.push_back(w.adjoint());

  out.report.scenario = "coisometric";
  out.report.merge(extension_check(out.adjoint_bundle, adj));

  double identity_res = 0.0;
  double duality = 0.0;
  for (const auto& g : out.adjoint_bundle.representable) {
    const auto parts = pos_neg_parts(g);
    const ComplexMatrix expected =
        family.evaluate(parts.minus) * family.evaluate(parts.plus).adjoint();
    const ComplexMatrix got = out.compression(g);
    identity_res = std::max(identity_res, spectral_norm(got - expected));
    if (contains(out.adjoint_bundle.representable, -g)) {
      duality = std::max(duality,
                         spectral_norm(got - out.adjoint_bundle.compression(-g).adjoint()));
    }
  }
  out.report.add_upper("coisometric_identity", "regular.coisometric_identity", identity_res,
                       1e-10);
  out.report.add_upper("adjoint_duality", "regular.adjoint_duality", duality, 1e-10);

  // K = ∨_s U_s J_0 H over s ∈ box ∩ S.
  const IndexElement zero(family.omega_size());
  const ComplexMatrix j0 = out.adjoint_bundle.embedding(zero);
  std::vector<ComplexMatrix> images;
  for (const auto& s : box) {
    if (!s.in_semigroup()) continue;
    const auto ex = lattice_exponents(out.adjoint_bundle.generators, s);
    ComplexMatrix u = identity(out.adjoint_bundle.space_dim());
    for (std::size_t i = 0; i < ex.size(); ++i) {
      for (long c = 0; c < ex[i]; ++c) u = u * out.unitaries[i];
    }
    images.push_back(u * j0);
  }
  ComplexMatrix all(out.adjoint_bundle.space_dim(), j0.cols() * static_cast<Index>(images.size()));
  for (std::size_t i = 0; i < images.size(); ++i) {
    all.middleCols(j0.cols() * static_cast<Index>(i), j0.cols()) = images[i];
  }
  const Index span_dim = span_orthonormalize(all, Tolerance(1e-10)).cols();
  const double deficiency = static_cast<double>(out.adjoint_bundle.space_dim() - span_dim);
  out.report.add_upper("span_deficiency", "regular.coisometric_span", deficiency, 0.0);
  out.report.details["space_dim"] = out.adjoint_bundle.space_dim();
  out.report.details["span_dim"] = span_dim;
  return out;
}

}  // namespace dilation::regular
