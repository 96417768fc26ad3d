#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "flatlab/operators.hpp"

namespace flatlab {

/// Which inequality selects the atoms of a level band.
enum class LevelKind {
  AtLeast,         // phi >= alpha
  AtMost,          // phi <= alpha
  Between,         // alpha <= phi <= beta
  Above,           // phi > alpha
  Below,           // phi < alpha
  ClosedOpen,      // alpha <= phi < beta
  Open,            // alpha < phi < beta
  OpenClosed,      // alpha < phi <= beta
};

std::string_view to_string(LevelKind k);
bool needs_upper_bound(LevelKind k);

struct LevelBand {
  LevelKind kind;
  double alpha;
  std::optional<double> beta;
  MeasurableSet set;
};

LevelBand level_set(const LpFunction& phi, LevelKind kind, double alpha,
                    std::optional<double> beta = std::nullopt);

struct Flat {
  double value;
  MeasurableSet set;
  double measure;
};

struct FlatReport {
  std::vector<Flat> flats;
  double theta;
  double tau;

  bool has_flat() const noexcept { return !flats.empty(); }
};

/// Sorts the atoms by phi, chains them into clusters whose value spread is at
/// most tau, and reports the clusters of measure >= theta. The reported value
/// is the midpoint of the cluster's range.
FlatReport detect_flats(const LpFunction& phi, double theta, double tau);

/// Diagonal 0/1 operator chi_E.
LinearOperator band_projection(const MeasurableSet& e, Exponent p);

struct InvarianceResult {
  bool invariant;
  /// Estimate of the L_2 norm of P_{E^c} T P_E.
  double violation;
};

/// T leaves E invariant iff P_{E^c} T P_E vanishes.
InvarianceResult leaves_invariant(const LinearOperator& t, const MeasurableSet& e,
                                  double tol = 0.0);

/// Splits the range of phi at measure quantiles into at most m bands
/// E_a^b, cut between consecutive distinct values so the bands are exactly
/// disjoint. Throws SingleBandOnly for constant phi.
std::vector<LevelBand> enumerate_hyperinvariant_bands(const LpFunction& phi, std::size_t m);

}  // namespace flatlab
