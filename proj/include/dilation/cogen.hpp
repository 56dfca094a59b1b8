// cogen.hpp: cogenerators of contraction semigroups e^{sA} and the
// functional calculus x -> φ_s(x), e_s(x), e_{s,r}(x)

#pragma once

#include "dilation/matcore.hpp"
#include "dilation/report.hpp"

#include <vector>

namespace dilation::cogen {

// Default minimum distance of the spectrum from 1.
inline constexpr double kDefaultGap = 1e-6;

// Two commuting dissipative generators, A + A* ⪯ 0, so that e^{sA_i} are
// commuting contraction semigroups.
class GeneratorPair {
 public:
  GeneratorPair(ComplexMatrix a1, ComplexMatrix a2);

  const ComplexMatrix& a1() const noexcept { return a1_; }
  const ComplexMatrix& a2() const noexcept { return a2_; }
  Index dim() const noexcept { return a1_.rows(); }

  // e^{s A1}, e^{t A2}
  ComplexMatrix t1(double s) const;
  ComplexMatrix t2(double t) const;

 private:
  ComplexMatrix a1_;
  ComplexMatrix a2_;
};

// A contraction without 1 in its spectrum.
class Cogenerator {
 public:
  enum class Provenance { from_generator, supplied };

  // Checks ‖T‖ <= 1 + 1e-9 and min |λ - 1| > gap.
  explicit Cogenerator(ComplexMatrix t, double gap = kDefaultGap,
                       Provenance provenance = Provenance::supplied);

  const ComplexMatrix& matrix() const noexcept { return t_; }
  Provenance provenance() const noexcept { return provenance_; }
  double spectral_gap() const noexcept { return gap_; }

 private:
  ComplexMatrix t_;
  Provenance provenance_;
  double gap_;
};

// Checks psd(-(A + A*)); throws with the offending eigenvalue of A + A*.
void require_dissipative(const ComplexMatrix& a, const char* what);

// T = (A + I)(A - I)^{-1}.
Cogenerator cogenerator_from_generator(const ComplexMatrix& a);

// A = (T + I)(T - I)^{-1}; the inverse Cayley map.
ComplexMatrix generator_from_cogenerator(const Cogenerator& t);

// φ_s(X) = (X - (1 - s)I)(X - (1 + s)I)^{-1}.
ComplexMatrix phi_s_apply(const ComplexMatrix& x, double s);

// ‖φ_s(e^{sA}) - cogen(A)‖ along a decreasing sequence of s.
Report cogenerator_limit_check(const ComplexMatrix& a, const std::vector<double>& s_values);

// e_{s,r}(T) = exp(s (rT + I)(rT - I)^{-1}).
ComplexMatrix e_sr_apply(const ComplexMatrix& t, double s, double r);

// e_s(T) = exp(s (T + I)(T - I)^{-1}).
ComplexMatrix e_s_apply(const Cogenerator& t, double s);

// Matrix exponential (scaling and squaring with a Padé approximant).
ComplexMatrix expm(const ComplexMatrix& m);

}  // namespace dilation::cogen
