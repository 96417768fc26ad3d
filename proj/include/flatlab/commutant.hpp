#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flatlab/levelsets.hpp"

namespace flatlab {

struct StarIdentityReport {
  /// max over n of ||R(phi^n x) - phi^n R x|| / (||R|| ||phi||_inf^n ||x||)
  double max_deviation = 0.0;
  std::vector<double> deviations;  // index n-1 holds the deviation at power n
  unsigned powers_checked = 0;
  bool overflow_stop = false;
};

/// Checks R(phi^n x) = phi^n R x for n = 1..n_max. phi^n is built by repeated
/// pointwise multiplication; the loop stops once ||phi||^n exceeds 1e100.
StarIdentityReport star_identity_check(const LinearOperator& r, const LpFunction& phi,
                                       const LpFunction& x, unsigned n_max = 8);

struct GrowthProbe {
  std::vector<double> image_of_powers;   // ||R(phi^n x)||, n = 0..N
  std::vector<double> powers_of_image;   // ||phi^n R x||,  n = 0..N
  double leak_mass = 0.0;                // ||(Rx) chi_{phi > gamma}||
  double bound = 0.0;                    // ||R|| ||x||
  double commutator = 0.0;               // commutator_norm(R, M_phi)
};

/// Numerical version of the growth argument: for x supported in {phi <= 1}
/// the first sequence stays below ||R|| ||x||, while any mass of Rx on
/// {phi > gamma} forces the second to grow like gamma^n. For R commuting with
/// M_phi the two sequences coincide, so the leak must vanish.
GrowthProbe growth_contradiction_probe(const LinearOperator& r, const LpFunction& phi,
                                       const LpFunction& x, double gamma, unsigned n = 16);

struct DisjointnessWitness {
  LpFunction f;
  LpFunction g;
  /// min(|Tf|, |Tg|) per atom
  LpFunction overlap;
  std::string source;  // "half-split-x", "random", "atom-pair", ...
};

struct DisjointnessResult {
  bool preserves = true;
  std::optional<DisjointnessWitness> witness;
  std::size_t pairs_tested = 0;
};

/// Searches for disjoint f, g with Tf, Tg not disjoint. Order: complementary
/// half-space indicators, `trials` seeded random disjoint pairs, then an exact
/// sweep over pairs of atom indicators (columns of T with overlapping
/// supports). A clean sweep makes the "preserves" verdict exact.
DisjointnessResult disjointness_preservation_test(const LinearOperator& t, std::size_t trials,
                                                  std::uint64_t seed = 1, double tol = 0.0);

struct ScenarioCheck {
  std::string name;
  bool pass;
  double value;
  double bound;
};

/// The four simultaneous claims about an operator r on a grid, relative to
/// phi(x, y) = y:
///   commutes_with_multiplier     commutator_norm(r, M_phi) <= 1e-12
///   not_disjointness_preserving  a disjoint pair with overlapping images exists
///   level_sets_invariant         ||P_{(E^a)c} r P_{E^a}|| <= 1e-12 for
///                                `alpha_samples` seeded alphas in (0, 1)
///   vertical_band_not_invariant  violation on {x < 1/2} is at least 0.1
/// Throws GeometryMismatch if r does not live on a grid.
std::vector<ScenarioCheck> counterexample_checks(const LinearOperator& r,
                                                 std::size_t alpha_samples = 20,
                                                 std::size_t trials = 32,
                                                 std::uint64_t seed = 1);

}  // namespace flatlab
