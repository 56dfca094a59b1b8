#include "dilation/matcore.hpp"

#include "dilation/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace dilation {

namespace {

// Relative singular-value floor below which a domain direction is treated
// as numerically absent when building unitary extensions.
constexpr double kExtensionRankFloor = 1e-10;

// Orthonormal columns spanning span(m), keeping pivots above `abs_threshold`.
ComplexMatrix pivoted_basis(const ComplexMatrix& m, double abs_threshold) {
  if (m.cols() == 0 || m.rows() == 0) return ComplexMatrix(m.rows(), 0);
  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(m);
  const double max_pivot = qr.maxPivot();
  if (max_pivot <= abs_threshold || max_pivot == 0.0) {
    return ComplexMatrix(m.rows(), 0);
  }
  qr.setThreshold(abs_threshold / max_pivot);
  const Index rank = qr.rank();
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(m.rows(), rank);
  return q;
}

double max_column_norm(const ComplexMatrix& m) {
  double best = 0.0;
  for (Index j = 0; j < m.cols(); ++j) best = std::max(best, m.col(j).norm());
  return best;
}

// Nearest matrix with orthonormal columns (polar factor).
ComplexMatrix polar_factor(const ComplexMatrix& m) {
  if (m.cols() == 0) return m;
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace

Tolerance::Tolerance(double value) : value_(value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw PreconditionError("bad_tolerance", "tolerance must be positive and finite",
                            value);
  }
}

// -- SpaceDecomposition ------------------------------------------------------

SpaceDecomposition::SpaceDecomposition(Index h_dim) {
  if (h_dim < 0) throw PreconditionError("bad_decomposition", "negative H dimension");
  blocks_.push_back({"H", h_dim});
}

SpaceDecomposition::SpaceDecomposition(std::vector<Block> blocks)
    : blocks_(std::move(blocks)) {
  if (blocks_.empty() || blocks_.front().name != "H") {
    throw PreconditionError("bad_decomposition", "first block must be labeled H");
  }
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].dim < 0) {
      throw PreconditionError("bad_decomposition", "negative block dimension");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (blocks_[i].name == blocks_[j].name) {
        throw PreconditionError("bad_decomposition",
                                "duplicate block label " + blocks_[i].name);
      }
    }
  }
}

SpaceDecomposition& SpaceDecomposition::append(std::string name, Index dim) {
  if (contains(name)) {
    throw PreconditionError("bad_decomposition", "duplicate block label " + name);
  }
  if (dim < 0) throw PreconditionError("bad_decomposition", "negative block dimension");
  blocks_.push_back({std::move(name), dim});
  return *this;
}

Index SpaceDecomposition::total() const noexcept {
  Index n = 0;
  for (const auto& b : blocks_) n += b.dim;
  return n;
}

bool SpaceDecomposition::contains(const std::string& name) const {
  return std::any_of(blocks_.begin(), blocks_.end(),
                     [&](const Block& b) { return b.name == name; });
}

const SpaceDecomposition::Block& SpaceDecomposition::find(const std::string& name) const {
  for (const auto& b : blocks_) {
    if (b.name == name) return b;
  }
  throw PreconditionError("unknown_block", "no block labeled " + name);
}

Index SpaceDecomposition::offset(const std::string& name) const {
  Index off = 0;
  for (const auto& b : blocks_) {
    if (b.name == name) return off;
    off += b.dim;
  }
  throw PreconditionError("unknown_block", "no block labeled " + name);
}

Index SpaceDecomposition::dim(const std::string& name) const { return find(name).dim; }

ComplexMatrix SpaceDecomposition::block(const ComplexMatrix& op, const std::string& row,
                                        const std::string& col) const {
  if (op.rows() != total() || op.cols() != total()) {
    throw PreconditionError("dimension_mismatch",
                            "operator does not act on the decomposition");
  }
  return op.block(offset(row), offset(col), dim(row), dim(col));
}

// -- helpers -----------------------------------------------------------------

ComplexMatrix identity(Index n) { return ComplexMatrix::Identity(n, n); }

double spectral_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

bool all_finite(const ComplexMatrix& m) { return m.allFinite(); }

void require_finite(const ComplexMatrix& m, const char* what) {
  if (!m.allFinite()) {
    throw PreconditionError("non_finite", std::string(what) + " has NaN/Inf entries");
  }
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw PreconditionError("not_square",
                            std::string(what) + " is " + std::to_string(m.rows()) +
                                "x" + std::to_string(m.cols()));
  }
}

double isometry_residual(const ComplexMatrix& m) {
  return spectral_norm(m.adjoint() * m - identity(m.cols()));
}

double commutator_norm(const ComplexMatrix& a, const ComplexMatrix& b) {
  return spectral_norm(a * b - b * a);
}

ComplexMatrix leading_embedding(Index total, Index h_dim) {
  return ComplexMatrix::Identity(total, h_dim);
}

ComplexMatrix compress(const ComplexMatrix& op, Index h_dim) {
  return op.topLeftCorner(h_dim, h_dim);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// -- spectral ----------------------------------------------------------------

PsdVerdict psd_check(const ComplexMatrix& m, Tolerance tol) {
  require_square(m, "psd_check input");
  require_finite(m, "psd_check input");
  if (m.rows() == 0) return {true, 0.0};
  const double asym = spectral_norm(m - m.adjoint());
  const double scale = spectral_norm(m);
  if (asym > tol.value() * scale) {
    throw PreconditionError("not_hermitian", "‖M - M*‖ exceeds tol·‖M‖", asym);
  }
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  return {lmin >= -tol.value(), lmin};
}

ComplexMatrix hermitian_sqrt(const ComplexMatrix& m, Tolerance tol) {
  require_square(m, "hermitian_sqrt input");
  if (m.rows() == 0) return m;
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym);
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev(0) < -tol.value()) {
    throw PreconditionError("not_psd", "negative eigenvalue below -tol", ev(0));
  }
  for (Index i = 0; i < ev.size(); ++i) ev(i) = std::sqrt(std::max(ev(i), 0.0));
  const ComplexMatrix& q = es.eigenvectors();
  return q * ev.cast<Complex>().asDiagonal() * q.adjoint();
}

ComplexMatrix defect(const ComplexMatrix& t, Tolerance tol) {
  require_square(t, "defect input");
  require_finite(t, "defect input");
  const double norm = spectral_norm(t);
  if (norm > 1.0 + tol.value()) {
    throw PreconditionError("not_a_contraction",
                            "‖T‖ = " + std::to_string(norm) + " > 1", norm);
  }
  return hermitian_sqrt(identity(t.rows()) - t.adjoint() * t, tol);
}

EigenOneVerdict eigenvalue_one_check(const ComplexMatrix& x, Tolerance gap_tol) {
  require_square(x, "eigenvalue_one_check input");
  if (x.rows() == 0) return {true, std::numeric_limits<double>::infinity()};
  Eigen::ComplexEigenSolver<ComplexMatrix> es(x, false);
  double dist = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    dist = std::min(dist, std::abs(es.eigenvalues()(i) - Complex(1.0, 0.0)));
  }
  return {dist > gap_tol.value(), dist};
}

// -- subspaces ---------------------------------------------------------------

ComplexMatrix numerical_kernel(const ComplexMatrix& m, Tolerance tol) {
  const Index n = m.cols();
  if (n == 0) return ComplexMatrix(0, 0);
  if (m.rows() == 0) return identity(n);
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  Index rank = 0;
  if (smax > 0.0) {
    for (Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > tol.value() * smax) ++rank;
    }
  }
  return svd.matrixV().rightCols(n - rank);
}

ComplexMatrix span_orthonormalize(const ComplexMatrix& vectors, Tolerance tol) {
  if (vectors.cols() == 0) return ComplexMatrix(vectors.rows(), 0);
  Eigen::ColPivHouseholderQR<ComplexMatrix> probe(vectors);
  return pivoted_basis(vectors, tol.value() * probe.maxPivot());
}

ComplexMatrix orthogonal_complement(const ComplexMatrix& q, Index n) {
  if (q.rows() != n && q.cols() > 0) {
    throw PreconditionError("dimension_mismatch", "basis rows differ from ambient dim");
  }
  const Index k = q.cols();
  if (k == 0) return identity(n);
  if (k >= n) return ComplexMatrix(n, 0);
  const ComplexMatrix proj = identity(n) - q * q.adjoint();
  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(proj);
  ComplexMatrix c = qr.householderQ() * ComplexMatrix::Identity(n, n - k);
  c -= q * (q.adjoint() * c);
  Eigen::HouseholderQR<ComplexMatrix> clean(c);
  ComplexMatrix out = clean.householderQ() * ComplexMatrix::Identity(n, n - k);
  // Fix column phases against c so the result tracks the pivoted order.
  for (Index j = 0; j < out.cols(); ++j) {
    const Complex ip = out.col(j).dot(c.col(j));
    if (std::abs(ip) > 0.0) out.col(j) *= ip / std::abs(ip);
  }
  return out;
}

ComplexMatrix extend_orthonormal(const ComplexMatrix& q, const ComplexMatrix& vectors,
                                 Tolerance tol) {
  const Index n = vectors.rows();
  if (vectors.cols() == 0) return ComplexMatrix(n, 0);
  const double scale = max_column_norm(vectors);
  if (scale == 0.0) return ComplexMatrix(n, 0);
  ComplexMatrix r = vectors;
  if (q.cols() > 0) {
    r -= q * (q.adjoint() * r);
    r -= q * (q.adjoint() * r);
  }
  ComplexMatrix basis = pivoted_basis(r, tol.value() * scale);
  if (q.cols() > 0 && basis.cols() > 0) {
    basis -= q * (q.adjoint() * basis);
    basis = polar_factor(basis);
  }
  return basis;
}

double subspace_distance(const ComplexMatrix& q1, const ComplexMatrix& q2) {
  const Index n = std::max(q1.rows(), q2.rows());
  ComplexMatrix p1 = ComplexMatrix::Zero(n, n);
  ComplexMatrix p2 = ComplexMatrix::Zero(n, n);
  if (q1.cols() > 0) p1 = q1 * q1.adjoint();
  if (q2.cols() > 0) p2 = q2 * q2.adjoint();
  return spectral_norm(p1 - p2);
}

ComplexMatrix random_unitary(Index n, std::uint64_t seed) {
  if (n == 0) return ComplexMatrix(0, 0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix z(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) z(i, j) = Complex(gauss(rng), gauss(rng));
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * identity(n);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

ComplexMatrix extend_isometry_to_unitary(const ComplexMatrix& domain_vectors,
                                         const ComplexMatrix& image_vectors,
                                         Index ambient_dim, std::uint64_t seed,
                                         Tolerance tol) {
  const auto& d = domain_vectors;
  const auto& im = image_vectors;
  if (d.rows() != ambient_dim || im.rows() != ambient_dim || d.cols() != im.cols()) {
    throw PreconditionError("dimension_mismatch",
                            "domain/image must be ambient_dim x k with equal k");
  }
  require_finite(d, "domain vectors");
  require_finite(im, "image vectors");

  ComplexMatrix qd(ambient_dim, 0);
  ComplexMatrix qi(ambient_dim, 0);
  if (d.cols() > 0) {
    const ComplexMatrix gd = d.adjoint() * d;
    const ComplexMatrix gi = im.adjoint() * im;
    const double dev = (gd - gi).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, gd.cwiseAbs().maxCoeff());
    if (dev > tol.value() * scale) {
      throw PreconditionError("not_an_isometric_correspondence",
                              "max Gram deviation " + std::to_string(dev), dev);
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(d, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    Index rank = 0;
    if (sv.size() > 0 && sv(0) > 0.0) {
      for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > kExtensionRankFloor * sv(0)) ++rank;
      }
    }
    if (rank > 0) {
      qd = svd.matrixU().leftCols(rank);
      const Eigen::VectorXd inv = sv.head(rank).cwiseInverse();
      qi = polar_factor(im * svd.matrixV().leftCols(rank) * inv.cast<Complex>().asDiagonal());
    }
  }

  const ComplexMatrix cd = orthogonal_complement(qd, ambient_dim);
  ComplexMatrix ci = orthogonal_complement(qi, ambient_dim);
  if (seed != 0 && ci.cols() > 0) ci = ci * random_unitary(ci.cols(), seed);

  ComplexMatrix g = ComplexMatrix::Zero(ambient_dim, ambient_dim);
  if (qd.cols() > 0) g += qi * qd.adjoint();
  if (cd.cols() > 0) g += ci * cd.adjoint();
  if (ambient_dim > 0) {
    Eigen::JacobiSVD<ComplexMatrix> polish(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    g = polish.matrixU() * polish.matrixV().adjoint();
  }
  return g;
}

}  // namespace dilation
