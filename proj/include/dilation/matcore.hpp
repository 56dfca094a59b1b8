// matcore.hpp: dense complex linear algebra shared by every dilation module

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace dilation {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

// Positive threshold used for equality residuals and rank decisions.
class Tolerance {
 public:
  static constexpr double kEquality = 1e-9;
  static constexpr double kRank = 1e-7;

  constexpr Tolerance() = default;
  explicit Tolerance(double value);

  constexpr double value() const noexcept { return value_; }

 private:
  double value_ = kEquality;
};

// Ordered list of named orthogonal blocks. The first block is always "H".
class SpaceDecomposition {
 public:
  struct Block {
    std::string name;
    Index dim = 0;
  };

  explicit SpaceDecomposition(Index h_dim);
  SpaceDecomposition(std::vector<Block> blocks);

  SpaceDecomposition& append(std::string name, Index dim);

  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  Index total() const noexcept;
  Index h_dim() const noexcept { return blocks_.front().dim; }
  bool contains(const std::string& name) const;
  Index offset(const std::string& name) const;
  Index dim(const std::string& name) const;

  // The (row, col) block of an operator acting on this decomposition.
  ComplexMatrix block(const ComplexMatrix& op, const std::string& row,
                      const std::string& col) const;

 private:
  const Block& find(const std::string& name) const;
  std::vector<Block> blocks_;
};

struct PsdVerdict {
  bool pass = false;
  double min_eigenvalue = 0.0;
};

struct EigenOneVerdict {
  bool pass = false;
  double distance = 0.0;
};

// -- basic helpers ---------------------------------------------------------

ComplexMatrix identity(Index n);
double spectral_norm(const ComplexMatrix& m);
bool all_finite(const ComplexMatrix& m);
void require_finite(const ComplexMatrix& m, const char* what);
void require_square(const ComplexMatrix& m, const char* what);
// ‖I - M* M‖ restricted to nothing; full isometry residual.
double isometry_residual(const ComplexMatrix& m);
double commutator_norm(const ComplexMatrix& a, const ComplexMatrix& b);
// Embedding of the leading `h_dim` coordinates into `total` dimensions.
ComplexMatrix leading_embedding(Index total, Index h_dim);
// P_H X |_H for the leading `h_dim` coordinates.
ComplexMatrix compress(const ComplexMatrix& op, Index h_dim);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// -- spectral --------------------------------------------------------------

PsdVerdict psd_check(const ComplexMatrix& m, Tolerance tol = Tolerance{});

// Principal square root of a Hermitian PSD matrix; eigenvalues in [-tol, 0)
// clamp to zero, anything more negative is a precondition error.
ComplexMatrix hermitian_sqrt(const ComplexMatrix& m, Tolerance tol = Tolerance{});

// D_T = (I - T*T)^{1/2}.
ComplexMatrix defect(const ComplexMatrix& t, Tolerance tol = Tolerance{});

// min |λ - 1| over the spectrum of `x`; pass when strictly above gap_tol.
EigenOneVerdict eigenvalue_one_check(const ComplexMatrix& x, Tolerance gap_tol);

// -- subspaces -------------------------------------------------------------

// Orthonormal columns spanning ker(m). Singular values at or below
// tol * σ_max count as zero; σ_max == 0 gives the whole space.
ComplexMatrix numerical_kernel(const ComplexMatrix& m,
                               Tolerance tol = Tolerance{Tolerance::kRank});

// Orthonormal basis of the column span (column-pivoted Householder QR).
ComplexMatrix span_orthonormalize(const ComplexMatrix& vectors,
                                  Tolerance tol = Tolerance{});

// Orthonormal basis of the orthogonal complement of the orthonormal columns
// `q` in C^n. Depends only on the subspace, not on the chosen basis.
ComplexMatrix orthogonal_complement(const ComplexMatrix& q, Index n);

// Orthonormal columns spanning span(vectors) ⊖ span(q), q orthonormal.
ComplexMatrix extend_orthonormal(const ComplexMatrix& q,
                                 const ComplexMatrix& vectors,
                                 Tolerance tol = Tolerance{});

// Distance between the orthogonal projections onto two column spans.
double subspace_distance(const ComplexMatrix& q1, const ComplexMatrix& q2);

// Unitary G with G * domain = image. Requires Gram(domain) == Gram(image).
// The complement is matched by a deterministic pivoted basis; a nonzero
// seed rotates the image-side complement by a seeded random unitary.
ComplexMatrix extend_isometry_to_unitary(const ComplexMatrix& domain_vectors,
                                         const ComplexMatrix& image_vectors,
                                         Index ambient_dim,
                                         std::uint64_t seed = 0,
                                         Tolerance tol = Tolerance{});

// Haar-ish random unitary from a seeded complex Gaussian QR.
ComplexMatrix random_unitary(Index n, std::uint64_t seed);

}  // namespace dilation
