#include "flatlab/levelsets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flatlab/errors.hpp"

namespace flatlab {

std::string_view to_string(LevelKind k) {
  switch (k) {
    case LevelKind::AtLeast: return "at-least";
    case LevelKind::AtMost: return "at-most";
    case LevelKind::Between: return "between";
    case LevelKind::Above: return "above";
    case LevelKind::Below: return "below";
    case LevelKind::ClosedOpen: return "closed-open";
    case LevelKind::Open: return "open";
    case LevelKind::OpenClosed: return "open-closed";
  }
  return "unknown";
}

bool needs_upper_bound(LevelKind k) {
  return k == LevelKind::Between || k == LevelKind::ClosedOpen || k == LevelKind::Open ||
         k == LevelKind::OpenClosed;
}

LevelBand level_set(const LpFunction& phi, LevelKind kind, double alpha,
                    std::optional<double> beta) {
  if (needs_upper_bound(kind) && !beta)
    throw InvalidInterval(std::string(to_string(kind)) + " band needs an upper bound");
  if (beta && alpha > *beta)
    throw InvalidInterval("alpha > beta (" + std::to_string(alpha) + " > " +
                          std::to_string(*beta) + ")");
  const double b = beta.value_or(0.0);
  auto in_band = [&](double v) {
    switch (kind) {
      case LevelKind::AtLeast: return v >= alpha;
      case LevelKind::AtMost: return v <= alpha;
      case LevelKind::Between: return alpha <= v && v <= b;
      case LevelKind::Above: return v > alpha;
      case LevelKind::Below: return v < alpha;
      case LevelKind::ClosedOpen: return alpha <= v && v < b;
      case LevelKind::Open: return alpha < v && v < b;
      case LevelKind::OpenClosed: return alpha < v && v <= b;
    }
    return false;
  };
  auto set = MeasurableSet::where(phi.space(), [&](std::size_t i) { return in_band(phi[i]); });
  return {kind, alpha, beta, std::move(set)};
}

namespace {

std::vector<std::size_t> order_by_value(const LpFunction& phi) {
  std::vector<std::size_t> order(phi.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return phi[a] < phi[b]; });
  return order;
}

}  // namespace

FlatReport detect_flats(const LpFunction& phi, double theta, double tau) {
  if (!(theta > 0.0)) throw PreconditionError("flat threshold theta must be > 0");
  if (!(tau >= 0.0)) throw PreconditionError("flat tolerance tau must be >= 0");
  FlatReport report{{}, theta, tau};
  const auto order = order_by_value(phi);
  const auto& space = phi.space();

  std::size_t start = 0;
  while (start < order.size()) {
    const double lo = phi[order[start]];
    std::size_t end = start;
    CompensatedSum mass;
    while (end < order.size() && phi[order[end]] - lo <= tau) {
      mass.add(space.weight(order[end]));
      ++end;
    }
    if (mass.value() >= theta) {
      const double hi = phi[order[end - 1]];
      MeasurableSet::Bits bits(space.size());
      for (std::size_t k = start; k < end; ++k) bits.set(order[k]);
      report.flats.push_back({lo + (hi - lo) / 2.0, MeasurableSet(space, std::move(bits)),
                              mass.value()});
    }
    start = end;
  }
  return report;
}

LinearOperator band_projection(const MeasurableSet& e, Exponent p) {
  Vector d = Vector::Zero(static_cast<Eigen::Index>(e.space().size()));
  for (std::size_t i : e.indices()) d[static_cast<Eigen::Index>(i)] = 1.0;
  return LinearOperator::diagonal(e.space(), d, p);
}

InvarianceResult leaves_invariant(const LinearOperator& t, const MeasurableSet& e, double tol) {
  require_same_space(t.space(), e.space(), "leaves_invariant");
  const auto cols = e.indices();
  const auto rows = e.complement().indices();
  if (cols.empty() || rows.empty()) return {true, 0.0};
  if (t.is_diagonal()) return {true, 0.0};

  // Block P_{E^c} T P_E in unweighted l_2 coordinates.
  const auto& sp = t.space();
  Matrix block(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  bool nonzero = false;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const double scale = 1.0 / std::sqrt(sp.weight(cols[c]));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double v = t(rows[r], cols[c]);
      nonzero = nonzero || v != 0.0;
      block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          std::sqrt(sp.weight(rows[r])) * v * scale;
    }
  }
  if (!nonzero) return {true, 0.0};

  // Power iteration on block^T block from a positive start vector.
  Vector v = Vector::Ones(block.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v[i] += 0.25 * std::sin(7.0 * 0.6180339887498949 * static_cast<double>(i + 1));
  v.normalize();
  double value = 0.0;
  for (int it = 0; it < 200; ++it) {
    const Vector bv = block * v;
    const double next = bv.norm();
    const Vector w = block.transpose() * bv;
    const double wn = w.norm();
    if (wn == 0.0) {
      value = std::max(value, next);
      break;
    }
    v = w / wn;
    if (std::abs(next - value) <= 1e-13 * next) {
      value = next;
      break;
    }
    value = std::max(value, next);
  }
  // A nonzero block whose estimate underflowed still counts as a violation.
  if (value == 0.0) value = block.cwiseAbs().maxCoeff();
  return {value <= tol, value};
}

std::vector<LevelBand> enumerate_hyperinvariant_bands(const LpFunction& phi, std::size_t m) {
  if (m == 0) throw PreconditionError("band count m must be >= 1");
  const auto order = order_by_value(phi);
  const auto& space = phi.space();

  // Distinct values with their cumulative measure.
  std::vector<double> values;
  std::vector<double> cumulative;
  CompensatedSum acc;
  for (std::size_t k = 0; k < order.size(); ++k) {
    acc.add(space.weight(order[k]));
    const double v = phi[order[k]];
    if (values.empty() || v != values.back()) {
      values.push_back(v);
      cumulative.push_back(acc.value());
    } else {
      cumulative.back() = acc.value();
    }
  }
  if (values.size() < 2)
    throw SingleBandOnly("multiplier is constant; its only level band is the whole space");

  // Cut after the distinct value where the cumulative measure first reaches
  // each quantile k/m.
  const double total = space.total_measure();
  std::vector<std::size_t> cuts;  // cut between values[c] and values[c+1]
  for (std::size_t k = 1; k < m; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(m);
    auto it = std::lower_bound(cumulative.begin(), cumulative.end(), target * (1.0 - 1e-12));
    auto c = static_cast<std::size_t>(std::distance(cumulative.begin(), it));
    if (c >= values.size() - 1) c = values.size() - 2;
    if (cuts.empty() || c > cuts.back()) cuts.push_back(c);
  }

  std::vector<LevelBand> bands;
  double lo = values.front();
  for (std::size_t c : cuts) {
    const double gamma = values[c] + (values[c + 1] - values[c]) / 2.0;
    bands.push_back(level_set(phi, LevelKind::Between, lo, gamma));
    lo = gamma;
  }
  bands.push_back(level_set(phi, LevelKind::Between, lo, values.back()));
  return bands;
}

}  // namespace flatlab
