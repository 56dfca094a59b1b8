// ando.hpp: truncated isometric dilations of one contraction (Schäffer) and
// of a commuting pair (Ando), fixed-vector removal, and the continuous-pair
// pipeline built on cogenerators.

#pragma once

#include "dilation/cogen.hpp"
#include "dilation/matcore.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace dilation::ando {

enum class BundleKind { schaffer, ando, reduced, continuous };

const char* to_string(BundleKind kind);
BundleKind bundle_kind_from_string(const std::string& name);

struct GridPoint {
  double s = 0.0;
  double t = 0.0;
};

// Sample grid {0, 0.25, 0.5, 1, 2}^2.
std::vector<GridPoint> default_grid();

// Ambient space, named operators on it, and measured residuals.
//
// Operator names by kind:
//   schaffer:   V (on K), T (on H)
//   ando:       V1, V2 (on K), T1, T2 (on H)
//   reduced:    V1, V2 (on G), T1, T2 (on H)
//   continuous: U1, U2 (cogenerator dilations on G), B1, B2 (their inverse
//               Cayley transforms), A1, A2 (generators on H), T1, T2
//               (cogenerators on H)
struct DilationBundle {
  SpaceDecomposition decomposition{0};
  std::map<std::string, ComplexMatrix> operators;
  int depth = 0;
  BundleKind kind = BundleKind::schaffer;
  std::map<std::string, double> residuals;
  // Grid used by the last minimal_restriction, if any.
  std::vector<GridPoint> grid;

  const ComplexMatrix& op(const std::string& name) const;
  bool has(const std::string& name) const { return operators.count(name) > 0; }
  Index h_dim() const { return decomposition.h_dim(); }
  Index dim() const { return decomposition.total(); }
  ComplexMatrix embedding() const { return leading_embedding(dim(), h_dim()); }

  // continuous only: (V1(s), V2(t)) = (e_s(U1), e_t(U2)).
  std::pair<ComplexMatrix, ComplexMatrix> evaluate(double s, double t) const;
};

// Residuals of the block structure of V1, V2 against H⊕M, L1, L2, plus the
// dimensions of the fixed-vector subspaces found along the way.
struct BlockReport {
  std::map<std::string, double> residuals;
  std::map<std::string, Index> dims;

  // B, C, Y, Z and the L1 identity block all within tol.
  bool pass(double tol = 1e-8) const;
};

DilationBundle schaffer_truncated(const ComplexMatrix& t, int depth,
                                  Tolerance tol = Tolerance{});

// K = H ⊕ (H^4)^N. W_i(x0, x1, ...) = (T_i x0, D_i x0, 0, x1, ...) and
// G ∈ U(H^4) maps (D1T2h, 0, D2h, 0) to (D2T1h, 0, D1h, 0); then
// V1 = G̃ W1, V2 = W2 G̃* with G̃ = I_H ⊕ G ⊕ ... ⊕ G.
DilationBundle ando_truncated(const ComplexMatrix& t1, const ComplexMatrix& t2, int depth,
                              std::uint64_t seed = 0, Tolerance tol = Tolerance{});

// max_{1 <= n <= depth} ‖P_H V^n|_H - T^n‖ for a schaffer bundle, or
// max_{m+n <= depth} ‖P_H V1^m V2^n|_H - T1^m T2^n‖ for two-operator bundles.
double compression_residual(const DilationBundle& bundle, int depth);

// ‖(V*V - I) P‖ with P dropping the trailing `dropped_blocks` defect blocks.
double interior_isometry_residual(const DilationBundle& bundle, const std::string& name,
                                  int dropped_blocks = 1);
double interior_commutation_residual(const DilationBundle& bundle, int dropped_blocks = 2);

BlockReport verify_block_structure(const DilationBundle& bundle,
                                   const SpaceDecomposition& decomposition);

struct ReductionResult {
  DilationBundle bundle;
  BlockReport blocks;
};

ReductionResult remove_fixed_vectors(const DilationBundle& bundle,
                                     Tolerance gap_tol = Tolerance{cogen::kDefaultGap},
                                     Tolerance tol = Tolerance{1e-8});

struct PipelineOptions {
  Tolerance gap_tol{cogen::kDefaultGap};
  std::uint64_t seed = 0;
  std::vector<GridPoint> grid = default_grid();
};

DilationBundle continuous_pair_dilation(const cogen::GeneratorPair& gens, int depth,
                                        const PipelineOptions& options = {});

// ‖T1(s)T2(t) - P_H V1(s)V2(t)|_H‖ on a continuous bundle.
double dilation_compression_residual(const DilationBundle& bundle, double s, double t);

// Restricts every operator on K to span(H ∪ {V1(s)V2(t)H : (s,t) ∈ grid}).
// For ando/reduced bundles the grid entries are integer exponents (m, n).
DilationBundle minimal_restriction(const DilationBundle& bundle,
                                   const std::vector<GridPoint>& grid,
                                   Tolerance tol = Tolerance{});

}  // namespace dilation::ando
