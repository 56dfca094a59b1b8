// regular.hpp: regular unitary dilations of commuting contraction families
// indexed by S = Σ_j S_j: Brehmer positivity, the kernel T̂(g) = T_{g-}* T_{g+},
// and a truncated Naimark construction over a finite lattice box.

#pragma once

#include "dilation/index.hpp"
#include "dilation/matcore.hpp"
#include "dilation/report.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dilation::regular {

// Largest |v| accepted by brehmer_check (2^|v| terms).
inline constexpr std::size_t kMaxBrehmerSubset = 20;

// Commuting contractions T_j, one per generator r_j e_j of S, with the
// semigroup T_s = Π_j T_j^{s(j)/r_j}.
class SemigroupFamily {
 public:
  SemigroupFamily(std::vector<IndexElement> generators, std::vector<ComplexMatrix> operators);

  // Generators e_0, ..., e_{k-1} over Ω = {0, ..., k-1}.
  static SemigroupFamily with_unit_generators(std::vector<ComplexMatrix> operators);

  std::size_t omega_size() const noexcept { return omega_size_; }
  std::size_t size() const noexcept { return operators_.size(); }
  Index dim() const noexcept { return operators_.front().rows(); }
  const IndexElement& generator(std::size_t i) const { return generators_.at(i); }
  const ComplexMatrix& op(std::size_t i) const { return operators_.at(i); }
  const std::vector<IndexElement>& generators() const noexcept { return generators_; }
  const std::vector<ComplexMatrix>& operators() const noexcept { return operators_; }

  // Integer exponents of s against the generators; throws outside the lattice.
  std::vector<long> exponents(const IndexElement& s) const;
  bool in_lattice(const IndexElement& g) const;
  // T_s for s ∈ S on the lattice.
  ComplexMatrix evaluate(const IndexElement& s) const;
  // The family {T_s*}.
  SemigroupFamily adjoint() const;

 private:
  std::size_t omega_size_ = 0;
  std::vector<IndexElement> generators_;
  std::vector<ComplexMatrix> operators_;
  // coordinate -> generator index
  std::map<std::size_t, std::size_t> by_coord_;
};

// T̂(g) = T_{g-}* T_{g+}.
ComplexMatrix t_hat(const SemigroupFamily& family, const IndexElement& g);

// Σ_{u ⊆ v} (-1)^{|u|} T_{s[u]}* T_{s[u]} and its PSD verdict.
ComplexMatrix brehmer_sum(const SemigroupFamily& family, const IndexElement& s,
                          const SubsetMask& v);
PsdVerdict brehmer_check(const SemigroupFamily& family, const IndexElement& s,
                         const SubsetMask& v, Tolerance tol = Tolerance{});

// Conjunction of brehmer_check over every s in box ∩ S and every nonempty
// v ⊆ supp(s). `tested` counts the (s, v) pairs.
struct BrehmerSweep {
  bool pass = true;
  double min_eigenvalue = 0.0;
  std::size_t tested = 0;
};
BrehmerSweep brehmer_box_check(const SemigroupFamily& family,
                               const std::vector<IndexElement>& box,
                               Tolerance tol = Tolerance{});

// max_{i != j} ‖T_j T_i* - T_i* T_j‖ against 1e-9 · scale.
Report doubly_commuting_check(const SemigroupFamily& family);

struct GramResult {
  ComplexMatrix gram;
  PsdVerdict psd;
};

// Block (p, q) = T̂(box[q] - box[p]).
GramResult kernel_gram(const SemigroupFamily& family, const std::vector<IndexElement>& box,
                       Tolerance tol = Tolerance{});

// Frame F with F*F = gram; J_s are the block columns of F and U_a the
// unitary completions of J_s h -> J_{s+a} h.
struct NaimarkBundle {
  std::vector<IndexElement> box;
  std::vector<IndexElement> generators;
  ComplexMatrix gram;
  ComplexMatrix factor;
  std::vector<ComplexMatrix> shifts;
  Index h_dim = 0;
  std::uint64_t seed = 0;
  bool restricted = false;
  std::vector<IndexElement> representable;
  std::map<std::string, double> residuals;

  Index space_dim() const noexcept { return factor.rows(); }
  std::size_t position(const IndexElement& s) const;
  // J_s (space_dim x h_dim)
  ComplexMatrix embedding(const IndexElement& s) const;
  // U_s = Π_a U_a^{c_a} for s = Σ c_a a ∈ S, applied coordinate by coordinate.
  ComplexMatrix shift_power(const IndexElement& s) const;
  // J_0* U_{g-}* U_{g+} J_0.
  ComplexMatrix compression(const IndexElement& g) const;
};

NaimarkBundle naimark_truncated(const SemigroupFamily& family,
                                const std::vector<IndexElement>& box, std::uint64_t seed = 0,
                                Tolerance tol = Tolerance{});

// max over representable g of ‖J_0* U_{g-}* U_{g+} J_0 - T̂(g)‖.
double regular_identity_residual(const NaimarkBundle& bundle, const SemigroupFamily& family);

// max over representable g of the difference between two bundles' compressions.
double gram_determinacy_residual(const NaimarkBundle& a, const NaimarkBundle& b);

// Restriction of the shifts to span{J_s h : s ∈ box ∩ S}.
NaimarkBundle isometric_from_unitary(const NaimarkBundle& bundle);

// U_a J_0 = J_0 T_a for each generator a; needs an isometric family.
Report extension_check(const NaimarkBundle& bundle, const SemigroupFamily& family);

struct CoisometricResult {
  // Dilation of the adjoint family {T_s*}.
  NaimarkBundle adjoint_bundle;
  // U_a = W_a* where W dilates the adjoint family.
  std::vector<ComplexMatrix> unitaries;
  Report report;

  // J_0* U_{g-} U_{g+}* J_0
  ComplexMatrix compression(const IndexElement& g) const;
};

CoisometricResult coisometric_dilation(const SemigroupFamily& family,
                                       const std::vector<IndexElement>& box,
                                       std::uint64_t seed = 0);

}  // namespace dilation::regular
