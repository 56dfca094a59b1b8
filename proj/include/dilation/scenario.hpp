// scenario.hpp: random instance generators and the scenario runner behind the CLI

#pragma once

#include "dilation/ando.hpp"
#include "dilation/matcore.hpp"
#include "dilation/report.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace dilation::scenario {

inline constexpr Index kMaxDim = 16;
inline constexpr int kMaxDepth = 16;
inline constexpr int kMaxTrials = 1000;

// Ginibre draw scaled to norm 1 - margin.
ComplexMatrix random_contraction(Index dim, std::uint64_t seed, double margin = 0.05);

// (p(S), q(S)) for a random strict contraction S and random polynomials of
// degree <= 3, each rescaled to norm <= 1 - margin.
std::pair<ComplexMatrix, ComplexMatrix> gen_commuting_pair(Index dim, std::uint64_t seed,
                                                           double margin = 0.05);

// (A⊗I, I⊗B) for random strict contractions A, B.
std::pair<ComplexMatrix, ComplexMatrix> gen_doubly_commuting(Index dim_a, Index dim_b,
                                                             std::uint64_t seed);

// M - (λmax(Re M) + c) I with ‖M‖ <= 2 and c in [0.1, 1).
ComplexMatrix random_dissipative(Index dim, std::uint64_t seed);

// Q diag(λ) Q* and Q diag(μ) Q* with Re λ, Re μ < 0.
std::pair<ComplexMatrix, ComplexMatrix> gen_commuting_dissipative(Index dim,
                                                                  std::uint64_t seed);

// Commuting unitaries Q diag(e^{iθ_k}) Q*.
std::vector<ComplexMatrix> random_unitary_family(std::size_t count, Index dim,
                                                 std::uint64_t seed);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

enum class Kind { schaffer, ando, lemma22, theorem21, brehmer, naimark, coisometric, hunt };

const char* to_string(Kind kind);
Kind kind_from_string(const std::string& name);

struct Scenario {
  Kind kind = Kind::schaffer;
  Index dim = 2;
  int depth = 4;
  // theorem21: depths compared for the compression residual
  std::vector<int> depths;
  std::uint64_t seed = 0;
  int trials = 1;
  double tol = Tolerance::kEquality;
  double gap_tol = cogen::kDefaultGap;
  std::vector<ando::GridPoint> grid = ando::default_grid();
  // theorem21: point used for the depth comparison
  ando::GridPoint probe{0.5, 0.5};
  // theorem21: bound on the sampled compression residual
  double compression_bound = 0.05;
  // "pass" or "fail"
  std::string expected_verdict = "pass";
  // explicit inputs; empty means generated
  std::vector<ComplexMatrix> matrices;
  // "commuting" | "doubly_commuting"
  std::string generator = "commuting";
  // brehmer: 0-based v and the point s as dense "p/q" coordinates
  std::vector<std::size_t> subset;
  std::vector<std::string> point;
  int box_depth = 1;
};

// Keys mirror the Scenario fields; unknown keys are rejected.
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& sc);

// Throws PreconditionError("invalid_scenario") when a bound is violated.
void validate(const Scenario& sc);

struct Outcome {
  Report report;
  int exit_code = 0;
};

// exit 0 when the verdict matches expected_verdict, 1 when it does not,
// 2 on invalid scenario or precondition failure.
Outcome run_scenario(const Scenario& sc);

}  // namespace dilation::scenario
