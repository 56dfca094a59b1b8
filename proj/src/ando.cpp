#include "dilation/ando.hpp"

#include "dilation/error.hpp"

#include <algorithm>
#include <cmath>

namespace dilation::ando {

namespace {

constexpr double kCommuteRel = 1e-10;

ComplexMatrix semigroup_at(const ComplexMatrix& a, double s) {
  if (s == 0.0) return identity(a.rows());
  return cogen::expm(s * a);
}

ComplexMatrix generator_exp(const ComplexMatrix& b, double s) {
  if (s == 0.0) return identity(b.rows());
  return cogen::expm(s * b);
}

Index trailing_dims(const SpaceDecomposition& dec, int blocks) {
  Index drop = 0;
  const auto& bl = dec.blocks();
  for (int k = 0; k < blocks && static_cast<std::size_t>(k) + 1 < bl.size(); ++k) {
    drop += bl[bl.size() - 1 - static_cast<std::size_t>(k)].dim;
  }
  return drop;
}

void require_contraction(const ComplexMatrix& t, const char* what, Tolerance tol) {
  require_square(t, what);
  require_finite(t, what);
  const double norm = spectral_norm(t);
  if (norm > 1.0 + tol.value()) {
    throw PreconditionError("not_a_contraction",
                            std::string(what) + " has norm " + std::to_string(norm), norm);
  }
}

ComplexMatrix concat_columns(std::initializer_list<const ComplexMatrix*> parts, Index rows) {
  Index cols = 0;
  for (const auto* p : parts) cols += p->cols();
  ComplexMatrix out(rows, cols);
  Index at = 0;
  for (const auto* p : parts) {
    if (p->cols() > 0) out.middleCols(at, p->cols()) = *p;
    at += p->cols();
  }
  return out;
}

ComplexMatrix power(const ComplexMatrix& m, int k) {
  ComplexMatrix out = identity(m.rows());
  for (int i = 0; i < k; ++i) out = out * m;
  return out;
}

// P_H V1^m V2^n |_H for every m + n <= depth, keyed by (m, n).
std::map<std::pair<int, int>, ComplexMatrix> joint_compressions(const ComplexMatrix& v1,
                                                                const ComplexMatrix& v2,
                                                                Index d, int depth) {
  const Index n = v1.rows();
  std::vector<ComplexMatrix> rows;  // top d rows of V1^m
  std::vector<ComplexMatrix> cols;  // first d columns of V2^k
  rows.push_back(ComplexMatrix::Identity(d, n));
  cols.push_back(ComplexMatrix::Identity(n, d));
  for (int m = 1; m <= depth; ++m) {
    rows.push_back(rows.back() * v1);
    cols.push_back(v2 * cols.back());
  }
  std::map<std::pair<int, int>, ComplexMatrix> out;
  for (int m = 0; m <= depth; ++m) {
    for (int k = 0; m + k <= depth; ++k) out[{m, k}] = rows[m] * cols[k];
  }
  return out;
}

}  // namespace

const char* to_string(BundleKind kind) {
  switch (kind) {
    case BundleKind::schaffer: return "schaffer";
    case BundleKind::ando: return "ando";
    case BundleKind::reduced: return "reduced";
    case BundleKind::continuous: return "continuous";
  }
  return "unknown";
}

BundleKind bundle_kind_from_string(const std::string& name) {
  if (name == "schaffer") return BundleKind::schaffer;
  if (name == "ando") return BundleKind::ando;
  if (name == "reduced") return BundleKind::reduced;
  if (name == "continuous") return BundleKind::continuous;
  throw PreconditionError("bad_kind", "unknown bundle kind " + name);
}

std::vector<GridPoint> default_grid() {
  const double values[] = {0.0, 0.25, 0.5, 1.0, 2.0};
  std::vector<GridPoint> grid;
  for (double s : values) {
    for (double t : values) grid.push_back({s, t});
  }
  return grid;
}

const ComplexMatrix& DilationBundle::op(const std::string& name) const {
  const auto it = operators.find(name);
  if (it == operators.end()) {
    throw PreconditionError("missing_operator",
                            std::string("bundle of kind ") + to_string(kind) +
                                " has no operator " + name);
  }
  return it->second;
}

std::pair<ComplexMatrix, ComplexMatrix> DilationBundle::evaluate(double s, double t) const {
  if (kind != BundleKind::continuous) {
    throw PreconditionError("bad_kind", "evaluate needs a continuous bundle");
  }
  if (!(s >= 0.0) || !(t >= 0.0)) {
    throw PreconditionError("bad_parameter", "semigroup parameters must be >= 0");
  }
  return {generator_exp(op("B1"), s), generator_exp(op("B2"), t)};
}

bool BlockReport::pass(double tol) const {
  for (const char* key : {"B", "C", "Y", "Z", "L1_identity"}) {
    const auto it = residuals.find(key);
    if (it != residuals.end() && !(it->second <= tol)) return false;
  }
  return true;
}

// -- constructions -------------------------------------------------------------

DilationBundle schaffer_truncated(const ComplexMatrix& t, int depth, Tolerance tol) {
  require_contraction(t, "T", tol);
  if (depth < 1) throw PreconditionError("bad_depth", "Schäffer depth must be >= 1", depth);
  const Index d = t.rows();
  const Index n = d * (1 + depth);
  const ComplexMatrix dt = defect(t, tol);

  ComplexMatrix v = ComplexMatrix::Zero(n, n);
  v.topLeftCorner(d, d) = t;
  v.block(d, 0, d, d) = dt;
  for (int k = 1; k < depth; ++k) v.block(d * (k + 1), d * k, d, d) = identity(d);

  DilationBundle b;
  b.decomposition = SpaceDecomposition(d);
  for (int k = 1; k <= depth; ++k) b.decomposition.append("D" + std::to_string(k), d);
  b.operators["V"] = std::move(v);
  b.operators["T"] = t;
  b.depth = depth;
  b.kind = BundleKind::schaffer;
  b.residuals["compression"] = compression_residual(b, depth);
  b.residuals["isometry_interior"] = interior_isometry_residual(b, "V", 1);
  return b;
}

DilationBundle ando_truncated(const ComplexMatrix& t1, const ComplexMatrix& t2, int depth,
                              std::uint64_t seed, Tolerance tol) {
  require_contraction(t1, "T1", tol);
  require_contraction(t2, "T2", tol);
  if (t1.rows() != t2.rows()) {
    throw PreconditionError("dimension_mismatch", "T1 and T2 act on different spaces");
  }
  if (depth < 2) throw PreconditionError("bad_depth", "Ando depth must be >= 2", depth);
  const double comm = commutator_norm(t1, t2);
  const double scale = std::max(1.0, spectral_norm(t1) * spectral_norm(t2));
  if (comm > kCommuteRel * scale) {
    throw PreconditionError("not_commuting", "‖T1T2 - T2T1‖ = " + std::to_string(comm), comm);
  }

  const Index d = t1.rows();
  const Index block = 4 * d;
  const Index n = d + block * depth;
  const Index positions = 4 * static_cast<Index>(depth);
  const ComplexMatrix d1 = defect(t1, tol);
  const ComplexMatrix d2 = defect(t2, tol);

  auto shift_with_defect = [&](const ComplexMatrix& t, const ComplexMatrix& dt) {
    ComplexMatrix w = ComplexMatrix::Zero(n, n);
    w.topLeftCorner(d, d) = t;
    w.block(d, 0, d, d) = dt;
    for (Index p = 3; p <= positions; ++p) w.block(d * p, d * (p - 2), d, d) = identity(d);
    return w;
  };
  const ComplexMatrix w1 = shift_with_defect(t1, d1);
  const ComplexMatrix w2 = shift_with_defect(t2, d2);

  ComplexMatrix domain = ComplexMatrix::Zero(block, d);
  ComplexMatrix image = ComplexMatrix::Zero(block, d);
  domain.topRows(d) = d1 * t2;
  domain.middleRows(2 * d, d) = d2;
  image.topRows(d) = d2 * t1;
  image.middleRows(2 * d, d) = d1;
  const ComplexMatrix g = extend_isometry_to_unitary(domain, image, block, seed);

  ComplexMatrix gt = ComplexMatrix::Zero(n, n);
  gt.topLeftCorner(d, d) = identity(d);
  for (int k = 0; k < depth; ++k) gt.block(d + block * k, d + block * k, block, block) = g;

  DilationBundle b;
  b.decomposition = SpaceDecomposition(d);
  for (int k = 1; k <= depth; ++k) b.decomposition.append("E" + std::to_string(k), block);
  b.operators["V1"] = gt * w1;
  b.operators["V2"] = w2 * gt.adjoint();
  b.operators["T1"] = t1;
  b.operators["T2"] = t2;
  b.depth = depth;
  b.kind = BundleKind::ando;
  b.residuals["G_correspondence"] = spectral_norm(g * domain - image);
  b.residuals["G_unitarity"] = isometry_residual(g);
  b.residuals["compression"] = compression_residual(b, depth);
  b.residuals["isometry_interior_V1"] = interior_isometry_residual(b, "V1", 1);
  b.residuals["isometry_interior_V2"] = interior_isometry_residual(b, "V2", 1);
  b.residuals["commutation_interior"] = interior_commutation_residual(b, 2);
  return b;
}

double compression_residual(const DilationBundle& bundle, int depth) {
  const Index d = bundle.h_dim();
  double worst = 0.0;
  if (bundle.kind == BundleKind::schaffer) {
    const ComplexMatrix& v = bundle.op("V");
    const ComplexMatrix& t = bundle.op("T");
    ComplexMatrix vp = identity(v.rows());
    ComplexMatrix tp = identity(d);
    for (int k = 1; k <= depth; ++k) {
      vp = vp * v;
      tp = tp * t;
      worst = std::max(worst, spectral_norm(compress(vp, d) - tp));
    }
    return worst;
  }
  if (bundle.kind == BundleKind::continuous) {
    throw PreconditionError("bad_kind", "use dilation_compression_residual for continuous bundles");
  }
  const auto comp = joint_compressions(bundle.op("V1"), bundle.op("V2"), d, depth);
  const ComplexMatrix& t1 = bundle.op("T1");
  const ComplexMatrix& t2 = bundle.op("T2");
  for (const auto& [mn, c] : comp) {
    const ComplexMatrix expected = power(t1, mn.first) * power(t2, mn.second);
    worst = std::max(worst, spectral_norm(c - expected));
  }
  return worst;
}

double interior_isometry_residual(const DilationBundle& bundle, const std::string& name,
                                  int dropped_blocks) {
  const ComplexMatrix& v = bundle.op(name);
  const Index keep = v.cols() - trailing_dims(bundle.decomposition, dropped_blocks);
  const ComplexMatrix gram = v.adjoint() * v - identity(v.cols());
  return spectral_norm(gram.leftCols(keep));
}

double interior_commutation_residual(const DilationBundle& bundle, int dropped_blocks) {
  const ComplexMatrix& v1 = bundle.op("V1");
  const ComplexMatrix& v2 = bundle.op("V2");
  const Index keep = v1.cols() - trailing_dims(bundle.decomposition, dropped_blocks);
  const ComplexMatrix c = v1 * v2 - v2 * v1;
  return spectral_norm(c.leftCols(keep));
}

// -- fixed-vector reduction -------------------------------------------------------

BlockReport verify_block_structure(const DilationBundle& bundle,
                                   const SpaceDecomposition& dec) {
  const auto& bl = dec.blocks();
  if (bl.size() != 4 || bl[1].name != "M" || bl[2].name != "L1" || bl[3].name != "L2") {
    throw PreconditionError("bad_decomposition", "expected blocks H, M, L1, L2");
  }
  const ComplexMatrix& v1 = bundle.op("V1");
  const ComplexMatrix& v2 = bundle.op("V2");
  if (v1.rows() != dec.total() || v2.rows() != dec.total()) {
    throw PreconditionError("dimension_mismatch",
                            "operators act on " + std::to_string(v1.rows()) +
                                " dims, decomposition has " + std::to_string(dec.total()));
  }
  const Index hm = dec.dim("H") + dec.dim("M");
  const Index l1 = dec.dim("L1");
  const Index l2 = dec.dim("L2");
  const Index o1 = dec.offset("L1");
  const Index o2 = dec.offset("L2");

  const ComplexMatrix w1 = v1.block(o2, o2, l2, l2);
  const ComplexMatrix z = v2.block(o1, o2, l1, l2);

  BlockReport r;
  r.residuals["B"] = spectral_norm(v1.block(o1, 0, l1, hm));
  r.residuals["C"] = spectral_norm(v1.block(o1, o2, l1, l2));
  r.residuals["L1_identity"] = spectral_norm(v1.block(o1, o1, l1, l1) - identity(l1));
  r.residuals["Y"] = spectral_norm(v2.block(o1, 0, l1, hm));
  r.residuals["Z"] = spectral_norm(z);
  r.residuals["W1_Z"] = spectral_norm((w1.adjoint() - identity(l2)) * z.adjoint());
  r.residuals["V1_HM_L"] = spectral_norm(v1.block(0, o1, hm, l1 + l2));
  r.residuals["V2_HM_L"] = spectral_norm(v2.block(0, o1, hm, l1 + l2));
  r.residuals["V1_L2_L1"] = spectral_norm(v1.block(o2, o1, l2, l1));
  r.dims["M"] = dec.dim("M");
  r.dims["L1"] = l1;
  r.dims["L2"] = l2;
  return r;
}

ReductionResult remove_fixed_vectors(const DilationBundle& bundle, Tolerance gap_tol,
                                     Tolerance tol) {
  if (bundle.kind != BundleKind::ando) {
    throw PreconditionError("bad_kind", "remove_fixed_vectors needs an ando bundle");
  }
  const Index d = bundle.h_dim();
  const Index n = bundle.dim();
  for (const char* name : {"T1", "T2"}) {
    const auto v = eigenvalue_one_check(bundle.op(name), gap_tol);
    if (!v.pass) {
      throw PreconditionError("eigenvalue_one",
                              std::string(name) + " has spectrum within " +
                                  std::to_string(v.distance) + " of 1",
                              v.distance);
    }
  }
  const ComplexMatrix& v1 = bundle.op("V1");
  const ComplexMatrix& v2 = bundle.op("V2");
  const ComplexMatrix e_h = leading_embedding(n, d);

  auto require_perp_h = [&](const ComplexMatrix& basis, const char* what) {
    const double overlap = basis.cols() > 0 ? spectral_norm(basis.topRows(d)) : 0.0;
    if (overlap > tol.value()) {
      throw PreconditionError("fixed_vector_meets_H",
                              std::string(what) + " has component in H of size " +
                                  std::to_string(overlap),
                              overlap);
    }
  };

  // First stage: K = H ⊕ M ⊕ L1 ⊕ L2.
  const ComplexMatrix lt1 = numerical_kernel(v1 - identity(n), gap_tol);
  const ComplexMatrix lt2 = numerical_kernel(v2 - identity(n), gap_tol);
  require_perp_h(lt1, "ker(V1 - I)");
  require_perp_h(lt2, "ker(V2 - I)");
  const ComplexMatrix& l1 = lt1;
  const ComplexMatrix l2 = extend_orthonormal(l1, lt2, tol);
  const ComplexMatrix h_l = concat_columns({&e_h, &l1, &l2}, n);
  const ComplexMatrix m = orthogonal_complement(h_l, n);
  const ComplexMatrix q = concat_columns({&e_h, &m, &l1, &l2}, n);

  SpaceDecomposition dec(std::vector<SpaceDecomposition::Block>{
      {"H", d}, {"M", m.cols()}, {"L1", l1.cols()}, {"L2", l2.cols()}});
  DilationBundle rotated;
  rotated.decomposition = dec;
  rotated.operators["V1"] = q.adjoint() * v1 * q;
  rotated.operators["V2"] = q.adjoint() * v2 * q;
  BlockReport report = verify_block_structure(rotated, dec);
  report.dims["Ltilde1"] = lt1.cols();
  report.dims["Ltilde2"] = lt2.cols();

  // K̃ = H ⊕ M ⊕ L2 must be invariant: the L1 rows over K̃ columns vanish.
  const Index hm = d + m.cols();
  std::vector<Index> keep;
  for (Index i = 0; i < hm; ++i) keep.push_back(i);
  for (Index i = 0; i < l2.cols(); ++i) keep.push_back(dec.offset("L2") + i);
  auto restrict_to = [](const ComplexMatrix& x, const std::vector<Index>& idx) {
    ComplexMatrix out(static_cast<Index>(idx.size()), static_cast<Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      for (std::size_t j = 0; j < idx.size(); ++j) out(i, j) = x(idx[i], idx[j]);
    }
    return out;
  };
  for (const char* name : {"V1", "V2"}) {
    const ComplexMatrix& x = rotated.op(name);
    double leak = 0.0;
    const Index o1 = dec.offset("L1");
    if (l1.cols() > 0 && !keep.empty()) {
      ComplexMatrix rows(l1.cols(), static_cast<Index>(keep.size()));
      for (Index i = 0; i < l1.cols(); ++i) {
        for (std::size_t j = 0; j < keep.size(); ++j) rows(i, j) = x(o1 + i, keep[j]);
      }
      leak = spectral_norm(rows);
    }
    if (leak > tol.value()) {
      throw PreconditionError("not_invariant",
                              std::string("H ⊕ M ⊕ L2 is not invariant under ") + name +
                                  " (leak " + std::to_string(leak) + ")",
                              leak);
    }
  }
  const ComplexMatrix vt1 = restrict_to(rotated.op("V1"), keep);
  const ComplexMatrix vt2 = restrict_to(rotated.op("V2"), keep);
  const Index nt = vt1.rows();

  // Second stage: G = K̃ ⊖ L with L = ker(Ṽ2 - I).
  const ComplexMatrix l = numerical_kernel(vt2 - identity(nt), gap_tol);
  require_perp_h(l, "ker(Ṽ2 - I)");
  const ComplexMatrix e_ht = leading_embedding(nt, d);
  const ComplexMatrix h_lt = concat_columns({&e_ht, &l}, nt);
  const ComplexMatrix rest = orthogonal_complement(h_lt, nt);
  const ComplexMatrix q2 = concat_columns({&e_ht, &rest, &l}, nt);
  const Index g_dim = d + rest.cols();
  const ComplexMatrix x1 = q2.adjoint() * vt1 * q2;
  const ComplexMatrix x2 = q2.adjoint() * vt2 * q2;
  const Index lc = l.cols();
  report.dims["L"] = lc;
  report.residuals["offdiag_V1"] =
      std::max(spectral_norm(x1.block(0, g_dim, g_dim, lc)),
               spectral_norm(x1.block(g_dim, 0, lc, g_dim)));
  report.residuals["offdiag_V2"] =
      std::max(spectral_norm(x2.block(0, g_dim, g_dim, lc)),
               spectral_norm(x2.block(g_dim, 0, lc, g_dim)));
  for (const char* key : {"offdiag_V1", "offdiag_V2"}) {
    if (report.residuals[key] > tol.value()) {
      throw PreconditionError("not_invariant",
                              std::string("K̃ ⊖ L is not reducing: ") + key + " = " +
                                  std::to_string(report.residuals[key]),
                              report.residuals[key]);
    }
  }

  DilationBundle out;
  out.decomposition = SpaceDecomposition(d);
  out.decomposition.append("M", g_dim - d);
  out.operators["V1"] = x1.topLeftCorner(g_dim, g_dim);
  out.operators["V2"] = x2.topLeftCorner(g_dim, g_dim);
  out.operators["T1"] = bundle.op("T1");
  out.operators["T2"] = bundle.op("T2");
  out.depth = bundle.depth;
  out.kind = BundleKind::reduced;
  out.residuals = bundle.residuals;

  const auto before = joint_compressions(v1, v2, d, bundle.depth);
  const auto after = joint_compressions(out.op("V1"), out.op("V2"), d, bundle.depth);
  double shift = 0.0;
  for (const auto& [mn, c] : before) shift = std::max(shift, spectral_norm(c - after.at(mn)));
  out.residuals["reduction_compression_shift"] = shift;
  out.residuals["compression"] = compression_residual(out, bundle.depth);
  const auto gap1 = eigenvalue_one_check(out.op("V1"), gap_tol);
  const auto gap2 = eigenvalue_one_check(out.op("V2"), gap_tol);
  out.residuals["gap_U1"] = gap1.distance;
  out.residuals["gap_U2"] = gap2.distance;
  report.residuals["gap_U1"] = gap1.distance;
  report.residuals["gap_U2"] = gap2.distance;
  return {std::move(out), std::move(report)};
}

// -- continuous pipeline -----------------------------------------------------------

DilationBundle continuous_pair_dilation(const cogen::GeneratorPair& gens, int depth,
                                        const PipelineOptions& options) {
  auto stage = [](const char* name, auto&& fn) {
    try {
      return fn();
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(name, e.what());
    }
  };

  const auto t1 = stage("cogenerator", [&] { return cogen::cogenerator_from_generator(gens.a1()); });
  const auto t2 = stage("cogenerator", [&] { return cogen::cogenerator_from_generator(gens.a2()); });
  stage("eigenvalue_one", [&] {
    for (const auto* t : {&t1, &t2}) {
      const auto v = eigenvalue_one_check(t->matrix(), options.gap_tol);
      if (!v.pass) {
        throw PreconditionError("eigenvalue_one", "cogenerator spectrum within " +
                                                      std::to_string(v.distance) + " of 1",
                                v.distance);
      }
    }
    return 0;
  });
  const DilationBundle ando = stage("ando", [&] {
    return ando_truncated(t1.matrix(), t2.matrix(), depth, options.seed);
  });
  const ReductionResult reduced = stage("remove_fixed_vectors", [&] {
    return remove_fixed_vectors(ando, options.gap_tol);
  });
  const ComplexMatrix& u1 = reduced.bundle.op("V1");
  const ComplexMatrix& u2 = reduced.bundle.op("V2");
  const auto c1 = stage("cogenerator_dilation", [&] {
    return cogen::Cogenerator(u1, options.gap_tol.value());
  });
  const auto c2 = stage("cogenerator_dilation", [&] {
    return cogen::Cogenerator(u2, options.gap_tol.value());
  });

  DilationBundle b;
  b.decomposition = reduced.bundle.decomposition;
  b.operators["U1"] = u1;
  b.operators["U2"] = u2;
  b.operators["B1"] = cogen::generator_from_cogenerator(c1);
  b.operators["B2"] = cogen::generator_from_cogenerator(c2);
  b.operators["A1"] = gens.a1();
  b.operators["A2"] = gens.a2();
  b.operators["T1"] = t1.matrix();
  b.operators["T2"] = t2.matrix();
  b.depth = depth;
  b.kind = BundleKind::continuous;
  b.residuals = reduced.bundle.residuals;
  b.grid = options.grid;

  double semigroup = 0.0;
  double commutation = 0.0;
  double compression = 0.0;
  double isometry_on_h = 0.0;
  const ComplexMatrix e_h = b.embedding();
  for (const auto& p : options.grid) {
    const auto [v1s, v2t] = b.evaluate(p.s, p.t);
    if (p.s <= 2.0 && p.t <= 2.0) {
      const auto [v1st, v2st] = b.evaluate(p.s + p.t, p.s + p.t);
      const auto [v1t, v2s] = b.evaluate(p.t, p.s);
      semigroup = std::max(semigroup, spectral_norm(v1s * v1t - v1st));
      semigroup = std::max(semigroup, spectral_norm(v2s * v2t - v2st));
    }
    commutation = std::max(commutation, spectral_norm(v1s * v2t - v2t * v1s));
    compression = std::max(compression, dilation_compression_residual(b, p.s, p.t));
    const ComplexMatrix orbit = v1s * v2t * e_h;
    isometry_on_h = std::max(isometry_on_h, isometry_residual(orbit));
  }
  b.residuals["semigroup_law"] = semigroup;
  b.residuals["commutation"] = commutation;
  b.residuals["grid_compression"] = compression;
  b.residuals["isometry_defect_on_H"] = isometry_on_h;
  return b;
}

double dilation_compression_residual(const DilationBundle& bundle, double s, double t) {
  if (bundle.kind != BundleKind::continuous) {
    throw PreconditionError("bad_kind", "dilation_compression_residual needs a continuous bundle");
  }
  const auto [v1, v2] = bundle.evaluate(s, t);
  const ComplexMatrix expected =
      semigroup_at(bundle.op("A1"), s) * semigroup_at(bundle.op("A2"), t);
  return spectral_norm(expected - compress(v1 * v2, bundle.h_dim()));
}

DilationBundle minimal_restriction(const DilationBundle& bundle,
                                   const std::vector<GridPoint>& grid, Tolerance tol) {
  const Index d = bundle.h_dim();
  const Index n = bundle.dim();
  const ComplexMatrix e_h = bundle.embedding();

  auto orbit = [&](const GridPoint& p) -> ComplexMatrix {
    if (bundle.kind == BundleKind::continuous) {
      const auto [v1, v2] = bundle.evaluate(p.s, p.t);
      return v1 * (v2 * e_h);
    }
    const int m = static_cast<int>(std::lround(p.s));
    const int k = static_cast<int>(std::lround(p.t));
    if (m < 0 || k < 0 || std::abs(p.s - m) > 0 || std::abs(p.t - k) > 0) {
      throw PreconditionError("bad_grid", "discrete bundles need nonnegative integer exponents");
    }
    if (bundle.kind == BundleKind::schaffer) {
      if (k != 0) throw PreconditionError("bad_grid", "Schäffer bundles have one operator");
      return power(bundle.op("V"), m) * e_h;
    }
    return power(bundle.op("V1"), m) * (power(bundle.op("V2"), k) * e_h);
  };

  std::vector<ComplexMatrix> images;
  for (const auto& p : grid) images.push_back(orbit(p));
  ComplexMatrix all(n, d * static_cast<Index>(images.size()));
  for (std::size_t i = 0; i < images.size(); ++i) all.middleCols(d * static_cast<Index>(i), d) = images[i];
  const ComplexMatrix extra = extend_orthonormal(e_h, all, tol);
  const ComplexMatrix q = concat_columns({&e_h, &extra}, n);

  DilationBundle out;
  out.decomposition = SpaceDecomposition(d);
  out.decomposition.append("M", extra.cols());
  for (const auto& [name, x] : bundle.operators) {
    out.operators[name] = x.rows() == n && n != d ? ComplexMatrix(q.adjoint() * x * q) : x;
  }
  out.depth = bundle.depth;
  out.kind = bundle.kind;
  out.residuals = bundle.residuals;
  out.grid = grid;

  double shift = 0.0;
  const ComplexMatrix e_small = out.embedding();
  for (const auto& p : grid) {
    ComplexMatrix before;
    ComplexMatrix after;
    if (bundle.kind == BundleKind::continuous) {
      const auto [a1, a2] = bundle.evaluate(p.s, p.t);
      const auto [b1, b2] = out.evaluate(p.s, p.t);
      before = compress(a1 * a2, d);
      after = compress(b1 * b2, d);
    } else {
      before = e_h.adjoint() * orbit(p);
      const int m = static_cast<int>(std::lround(p.s));
      const int k = static_cast<int>(std::lround(p.t));
      if (bundle.kind == BundleKind::schaffer) {
        after = e_small.adjoint() * power(out.op("V"), m) * e_small;
      } else {
        after = e_small.adjoint() * power(out.op("V1"), m) * power(out.op("V2"), k) * e_small;
      }
    }
    shift = std::max(shift, spectral_norm(before - after));
  }
  out.residuals["minimal_dim"] = static_cast<double>(q.cols());
  out.residuals["minimal_compression_shift"] = shift;
  return out;
}

}  // namespace dilation::ando
