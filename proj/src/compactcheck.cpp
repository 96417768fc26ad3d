#include "flatlab/compactcheck.hpp"

#include <algorithm>
#include <cmath>

#include "flatlab/errors.hpp"

namespace flatlab {

namespace {

struct Chain {
  std::vector<std::size_t> picks;
  std::vector<double> distances;
  double total = 0.0;
};

Chain build_chain(const std::vector<LpFunction>& images, const LpFunction& y, double scale) {
  Chain chain;
  double threshold = scale / 2.0;
  for (std::size_t n = 0; n < images.size(); ++n) {
    const double d = (images[n] - y).norm();
    if (d < threshold || d == 0.0) {
      chain.picks.push_back(n);
      chain.distances.push_back(d);
      chain.total += d;
      threshold /= 2.0;
    }
  }
  return chain;
}

}  // namespace

OrderBoundCertificate order_bound_witness(const LinearOperator& k,
                                          std::span<const LpFunction> e_seq, std::size_t m,
                                          std::size_t min_terms) {
  if (!k.is_positive()) throw PreconditionError("order bound witness needs a positive K");
  const std::size_t count = std::min(m, e_seq.size());
  if (count == 0) throw PreconditionError("empty sequence");

  std::vector<LpFunction> images;
  double scale = 0.0;
  for (std::size_t n = 0; n < count; ++n) {
    images.push_back(k.apply(e_seq[n].abs().with_exponent(k.p())));
    scale = std::max(scale, images.back().norm());
  }
  const auto zero = LpFunction::zero(k.space(), k.p());

  std::vector<LpFunction> candidates{zero};
  for (const auto& img : images) candidates.push_back(img);
  {
    const std::size_t q = std::max<std::size_t>(1, count / 4);
    Vector mean = Vector::Zero(zero.values().size());
    for (std::size_t n = count - q; n < count; ++n) mean += images[n].values();
    candidates.emplace_back(k.space(), mean / static_cast<double>(q), k.p());
  }

  std::size_t best = 0;
  Chain best_chain;
  if (scale == 0.0) {
    for (std::size_t n = 0; n < count; ++n) {
      best_chain.picks.push_back(n);
      best_chain.distances.push_back(0.0);
    }
  } else {
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      Chain chain = build_chain(images, candidates[c], scale);
      const bool longer = chain.picks.size() > best_chain.picks.size();
      const bool tighter =
          chain.picks.size() == best_chain.picks.size() && chain.total < best_chain.total;
      if (c == 0 || longer || tighter) {
        best = c;
        best_chain = std::move(chain);
      }
    }
  }

  if (best_chain.picks.size() < std::min(min_terms, count)) {
    // Report the closest pair so the caller can see how far off we are.
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t j = i + 1; j < count; ++j)
        nearest = std::min(nearest, (images[i] - images[j]).norm());
    throw NoClusterPoint("only " + std::to_string(best_chain.picks.size()) +
                         " terms chain to a common limit; nearest pair distance " +
                         std::to_string(nearest));
  }

  const LpFunction& y = candidates[best];
  Vector dominant = Vector::Zero(y.values().size());
  for (std::size_t n : best_chain.picks) dominant += (images[n].values() - y.values()).cwiseAbs();
  const Vector bound = dominant + y.values().cwiseAbs();

  OrderBoundCertificate cert{best_chain.picks,
                             y,
                             LpFunction(k.space(), dominant, k.p()),
                             best_chain.distances,
                             {},
                             -std::numeric_limits<double>::infinity(),
                             false};
  for (std::size_t n : best_chain.picks) {
    const Vector gap = bound - images[n].values();
    cert.slack.push_back(gap.minCoeff());
    cert.max_excess = std::max(cert.max_excess, (-gap).maxCoeff());
  }
  cert.holds = cert.max_excess <= 1e-12;
  return cert;
}

DecayReport decay_profile(std::vector<double> norms, double factor) {
  DecayReport report;
  report.factor = factor;
  report.norms = std::move(norms);
  if (report.norms.empty()) return report;
  const std::size_t q = std::max<std::size_t>(1, report.norms.size() / 4);
  report.head_max = *std::max_element(report.norms.begin(), report.norms.begin() + q);
  report.tail_max = *std::max_element(report.norms.end() - q, report.norms.end());
  report.decays = report.tail_max < factor * report.head_max;
  return report;
}

DecayReport disjoint_decay(const LinearOperator& a, const LinearOperator& k,
                           std::span<const LpFunction> e_seq, double factor) {
  if (!k.is_positive()) throw PreconditionError("dominating operator K must be positive");
  if (!dominates(k, a)) throw PreconditionError("K does not dominate A");
  if (e_seq.empty()) throw PreconditionError("empty sequence");

  std::vector<LpFunction> images;
  std::vector<MeasurableSet> supports;
  std::vector<double> norms, dom;
  for (const auto& e : e_seq) {
    const LpFunction ep = e.with_exponent(a.p());
    images.push_back(a.apply(ep));
    supports.push_back(support(images.back()));
    norms.push_back(images.back().norm());
    dom.push_back(k.apply(ep.abs()).norm());
  }
  for (std::size_t i = 0; i < supports.size(); ++i)
    for (std::size_t j = i + 1; j < supports.size(); ++j)
      if (supports[i].intersects(supports[j]))
        throw NotDisjointImages("images " + std::to_string(i + 1) + " and " +
                                std::to_string(j + 1) + " share an atom");

  DecayReport report = decay_profile(std::move(norms), factor);
  report.dominating_norms = std::move(dom);
  for (std::size_t n = 0; n < report.norms.size(); ++n)
    if (report.norms[n] > report.dominating_norms[n] * (1.0 + 1e-12) + 1e-300)
      report.domination_consistent = false;
  return report;
}

std::vector<LpFunction> dyadic_disjoint_indicators(const MeasureSpace& space, std::size_t first,
                                                   std::size_t count, std::size_t terms,
                                                   Exponent p, std::size_t group_size) {
  if (terms == 0 || group_size == 0) throw PreconditionError("need at least one term");
  if (first + count > space.size()) throw PreconditionError("atom range exceeds the space");
  const std::size_t groups = (terms + group_size - 1) / group_size;
  // Largest power-of-two head length L with every group fitting.
  auto needed = [&](std::size_t head) {
    std::size_t total = 0, len = head, left = terms;
    for (std::size_t g = 0; g < groups; ++g, len /= 2) {
      if (len == 0) return count + 1;
      const std::size_t here = std::min(group_size, left);
      total += here * len;
      left -= here;
    }
    return total;
  };
  // Small heads run out of length before the last group, so scan them all.
  std::size_t head = 0;
  for (std::size_t h = 1; h <= count; h *= 2)
    if (needed(h) <= count) head = h;
  if (head == 0)
    throw PreconditionError("not enough atoms for " + std::to_string(terms) +
                            " halving disjoint blocks");

  std::vector<LpFunction> out;
  std::size_t cursor = first, len = head;
  for (std::size_t t = 0; t < terms; ++t) {
    if (t > 0 && t % group_size == 0) len /= 2;
    auto block = MeasurableSet::where(
        space, [&](std::size_t i) { return i >= cursor && i < cursor + len; });
    cursor += len;
    LpFunction f = LpFunction::indicator(block, p);
    out.push_back(f * (1.0 / f.norm()));
  }
  return out;
}

LinearOperator block_compression(const LinearOperator& k, std::span<const MeasurableSet> blocks) {
  const auto n = static_cast<Eigen::Index>(k.size());
  Matrix m = Matrix::Zero(n, n);
  for (const auto& b : blocks) {
    require_same_space(k.space(), b.space(), "block_compression");
    const auto idx = b.indices();
    for (std::size_t j : idx)
      for (std::size_t i : idx)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = k(i, j);
  }
  return {k.space(), std::move(m), k.p()};
}

}  // namespace flatlab
