#include "dilation/cogen.hpp"

#include "dilation/error.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <string>

namespace dilation::cogen {

namespace {

constexpr double kContractionSlack = 1e-9;
constexpr double kCommuteRel = 1e-10;
// Errors below this are rounding noise; the decreasing test treats two such
// values as already converged.
constexpr double kConvergedFloor = 1e-14;

ComplexMatrix solve_right(const ComplexMatrix& numerator, const ComplexMatrix& denominator,
                          const char* what) {
  Eigen::JacobiSVD<ComplexMatrix> svd(denominator);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (!(smin > 1e-13 * std::max(1.0, sv(0)))) {
    throw PreconditionError("singular_resolvent",
                            std::string(what) + ": smallest singular value " +
                                std::to_string(smin) + ", condition " +
                                std::to_string(sv(0) / smin),
                            smin);
  }
  // numerator and denominator are functions of the same matrix, so they
  // commute and N D^{-1} = D^{-1} N.
  return denominator.partialPivLu().solve(numerator);
}

}  // namespace

void require_dissipative(const ComplexMatrix& a, const char* what) {
  require_square(a, what);
  require_finite(a, what);
  if (a.rows() == 0) return;
  const ComplexMatrix herm = a + a.adjoint();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (herm + herm.adjoint()),
                                                  Eigen::EigenvaluesOnly);
  const double lmax = es.eigenvalues()(es.eigenvalues().size() - 1);
  const double scale = std::max(1.0, spectral_norm(a));
  if (lmax > Tolerance::kEquality * scale) {
    throw PreconditionError("not_dissipative",
                            std::string(what) + ": A + A* has eigenvalue " +
                                std::to_string(lmax),
                            lmax);
  }
}

ComplexMatrix expm(const ComplexMatrix& m) {
  require_square(m, "expm input");
  if (m.rows() == 0) return m;
  return m.exp();
}

// -- GeneratorPair -------------------------------------------------------------

GeneratorPair::GeneratorPair(ComplexMatrix a1, ComplexMatrix a2)
    : a1_(std::move(a1)), a2_(std::move(a2)) {
  require_dissipative(a1_, "A1");
  require_dissipative(a2_, "A2");
  if (a1_.rows() != a2_.rows()) {
    throw PreconditionError("dimension_mismatch", "A1 and A2 act on different spaces");
  }
  const double comm = commutator_norm(a1_, a2_);
  const double bound = kCommuteRel * (spectral_norm(a1_) * spectral_norm(a2_) + 1.0);
  if (comm > bound) {
    throw PreconditionError("not_commuting", "‖A1A2 - A2A1‖ = " + std::to_string(comm),
                            comm);
  }
}

ComplexMatrix GeneratorPair::t1(double s) const { return expm(s * a1_); }
ComplexMatrix GeneratorPair::t2(double t) const { return expm(t * a2_); }

// -- Cogenerator ---------------------------------------------------------------

Cogenerator::Cogenerator(ComplexMatrix t, double gap, Provenance provenance)
    : t_(std::move(t)), provenance_(provenance), gap_(0.0) {
  require_square(t_, "cogenerator");
  require_finite(t_, "cogenerator");
  const double norm = spectral_norm(t_);
  if (norm > 1.0 + kContractionSlack) {
    throw PreconditionError("not_a_contraction",
                            "cogenerator norm " + std::to_string(norm), norm);
  }
  const auto verdict = eigenvalue_one_check(t_, Tolerance(gap));
  gap_ = verdict.distance;
  if (!verdict.pass) {
    throw PreconditionError("eigenvalue_one",
                            "spectrum within " + std::to_string(verdict.distance) +
                                " of 1",
                            verdict.distance);
  }
}

Cogenerator cogenerator_from_generator(const ComplexMatrix& a) {
  require_dissipative(a, "generator");
  const ComplexMatrix id = identity(a.rows());
  ComplexMatrix t = solve_right(a + id, a - id, "A - I");
  return Cogenerator(std::move(t), kDefaultGap, Cogenerator::Provenance::from_generator);
}

ComplexMatrix generator_from_cogenerator(const Cogenerator& t) {
  const ComplexMatrix& m = t.matrix();
  const ComplexMatrix id = identity(m.rows());
  return solve_right(m + id, m - id, "T - I");
}

ComplexMatrix phi_s_apply(const ComplexMatrix& x, double s) {
  require_square(x, "phi_s input");
  if (!(s > 0.0)) throw PreconditionError("bad_parameter", "φ_s needs s > 0", s);
  const ComplexMatrix id = identity(x.rows());
  return solve_right(x - (1.0 - s) * id, x - (1.0 + s) * id, "X - (1+s)I");
}

Report cogenerator_limit_check(const ComplexMatrix& a, const std::vector<double>& s_values) {
  if (s_values.empty()) {
    throw PreconditionError("bad_parameter", "need at least one s value");
  }
  for (std::size_t i = 0; i < s_values.size(); ++i) {
    if (!(s_values[i] >= 1e-8)) {
      throw PreconditionError("bad_parameter", "s values must be >= 1e-8", s_values[i]);
    }
    if (i > 0 && !(s_values[i] < s_values[i - 1])) {
      throw PreconditionError("bad_parameter", "s values must strictly decrease",
                              s_values[i]);
    }
  }
  const Cogenerator t = cogenerator_from_generator(a);

  Report report;
  report.scenario = "cogenerator_limit";
  std::vector<double> errors;
  for (double s : s_values) {
    errors.push_back(spectral_norm(phi_s_apply(expm(s * a), s) - t.matrix()));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < errors.size(); ++i) {
    const bool converged = errors[i] <= kConvergedFloor && errors[i - 1] <= kConvergedFloor;
    if (!(errors[i] < errors[i - 1]) && !converged) decreasing = false;
  }
  const double norm_a = spectral_norm(a);
  report.add_flag("errors_decreasing", "cogen.phi_limit", decreasing);
  report.add_upper("final_error", "cogen.phi_limit", errors.back(),
                   1e-3 * (1.0 + norm_a * norm_a));
  report.details["s_values"] = s_values;
  report.details["errors"] = errors;
  return report;
}

ComplexMatrix e_sr_apply(const ComplexMatrix& t, double s, double r) {
  require_square(t, "e_sr input");
  require_finite(t, "e_sr input");
  if (!(s >= 0.0)) throw PreconditionError("bad_parameter", "e_{s,r} needs s >= 0", s);
  if (!(r > 0.0 && r < 1.0)) {
    throw PreconditionError("bad_parameter", "e_{s,r} needs r in (0, 1)", r);
  }
  const double norm = spectral_norm(t);
  if (norm > 1.0 + kContractionSlack) {
    throw PreconditionError("not_a_contraction", "‖T‖ = " + std::to_string(norm), norm);
  }
  const ComplexMatrix id = identity(t.rows());
  if (s == 0.0) return id;
  const ComplexMatrix rt = r * t;
  return expm(s * solve_right(rt + id, rt - id, "rT - I"));
}

ComplexMatrix e_s_apply(const Cogenerator& t, double s) {
  if (!(s >= 0.0)) throw PreconditionError("bad_parameter", "e_s needs s >= 0", s);
  const ComplexMatrix id = identity(t.matrix().rows());
  if (s == 0.0) return id;
  return expm(s * generator_from_cogenerator(t));
}

}  // namespace dilation::cogen
