// Acceptance checks: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <string>

#include "flatlab/commutant.hpp"
#include "flatlab/compactcheck.hpp"
#include "flatlab/errors.hpp"
#include "flatlab/multipliers.hpp"
#include "flatlab/witness.hpp"
#include "support.hpp"

using namespace flatlab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Commutant invariance on a 32x32 grid.
Outcome criterion1() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto g = MeasureSpace::product_grid(32, 32);
  const auto r = averaging_counterexample(g, Exponent(2.0));
  const auto phi = make_multiplier(g, "y");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k)
    worst = std::max(worst, leaves_invariant(r, level_set(phi, LevelKind::AtMost, unit(rng)).set).violation);
  const auto vertical = MeasurableSet::where(g, [&](std::size_t i) { return g.center(i).x < 0.5; });
  const double v = leaves_invariant(r, vertical).violation;
  const double secs = seconds_since(t0);
  o.require(worst <= 1e-12, "level-set violation " + fmt(worst));
  o.require(v >= 0.1, "vertical band violation " + fmt(v));
  o.require(secs < 5.0, "runtime " + fmt(secs) + " s");
  if (o.pass)
    o.detail = "max level violation " + fmt(worst) + ", vertical " + fmt(v) + ", " + fmt(secs) + " s";
  return o;
}

// Witness construction, symmetric case.
Outcome criterion2() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto s = MeasureSpace::uniform_interval(4096);
  const auto phi = make_multiplier(s, "identity");
  WitnessConfig cfg;
  cfg.steps = 8;
  double worst_unit = 0.0;
  for (double pv : {1.0, 2.0, 3.0}) {
    const Exponent p(pv);
    const auto tr = run_witness(LinearOperator::identity(s, p), phi, LpFunction::constant(s, 1.0, p), cfg);
    const std::string tag = "p=" + fmt(pv) + ": ";
    o.require(tr.complete() && tr.steps.size() == 8, tag + "stopped early: " + tr.stop_reason);
    o.require(std::abs(tr.delta - 1.0) <= 1e-12, tag + "delta " + fmt(tr.delta));
    o.require(std::abs(tr.c1 - tr.c) <= 1e-12, tag + "c1 != c");
    if (!tr.steps.empty())
      o.require(std::abs(tr.steps[0].gamma - 0.5) <= 1.0 / 4096, tag + "gamma0 " + fmt(tr.steps[0].gamma));
    for (std::size_t i = 0; i < tr.e.size(); ++i) {
      const double en = tr.e[i].norm();
      const double an = tr.images[i].norm();
      worst_unit = std::max({worst_unit, std::abs(en - 1.0), std::abs(an - 1.0)});
      o.require(std::abs(en - 1.0) <= 1e-12, tag + "||e_n|| " + fmt(en));
      // ||Ae_n|| = 1 = delta: compared at the unit tolerance.
      o.require(std::abs(an - 1.0) <= 1e-12 && an >= tr.delta - 1e-12, tag + "||Ae_n|| " + fmt(an));
      for (std::size_t j = i + 1; j < tr.images.size(); ++j)
        o.require(!support(tr.images[i]).intersects(support(tr.images[j])), tag + "images overlap");
    }
  }
  const double secs = seconds_since(t0);
  o.require(secs < 10.0, "runtime " + fmt(secs) + " s");
  if (o.pass) o.detail = "p in {1,2,3}, K=8, max | ||.|| - 1 | " + fmt(worst_unit) + ", " + fmt(secs) + " s";
  return o;
}

// Witness construction, dominated case.
Outcome criterion3() {
  Outcome o;
  const auto s = MeasureSpace::uniform_interval(4096);
  const Exponent p(2.0);
  const auto phi = make_multiplier(s, "identity");
  const auto r = multiplication(make_multiplier(s, "affine(1,1)"), p);
  const auto a = multiplication(make_multiplier(s, "affine(0.5,0.5)"), p);
  o.require(dominates(r, a), "R does not dominate A");
  o.require(commutator_norm(r, multiplication(phi, p)) <= 1e-12, "R does not commute with M_phi");
  WitnessConfig cfg;
  cfg.steps = 8;
  const auto tr = run_witness(a, phi, LpFunction::constant(s, 1.0, p), cfg);
  VerifyOptions opts;
  opts.unit_tol = 1e-12;
  opts.bound_slack = 1e-9;
  opts.identity_tol = 1e-10;
  const auto rep = verify_trace(tr, opts);
  for (const auto& v : rep.verdicts)
    o.require(v.pass, v.name + "[" + std::to_string(v.n) + "] value " + fmt(v.value) + " bound " + fmt(v.bound));

  // Independent recomputation of ||u_k|| = prod c_hat_j ||y||.
  double prod = 1.0;
  for (const auto& st : tr.steps) {
    prod *= st.ratio;
    o.require(std::abs(st.norm_u - prod * tr.norm_y) <= 1e-10 * prod * tr.norm_y,
              "u chain at step " + std::to_string(st.n));
  }
  if (o.pass)
    o.detail = std::to_string(rep.verdicts.size()) + " verdicts pass, delta_hat " + fmt(tr.delta_hat) +
               " (ideal delta " + fmt(tr.delta) + ")";
  return o;
}

// Flat direction: rank-one projection on a plateau.
Outcome criterion4() {
  Outcome o;
  const auto s = MeasureSpace::uniform_interval(1024);
  const Exponent p(2.0);
  const auto phi = make_multiplier(s, "plateau(0.25,0.5)");
  const auto flats = detect_flats(phi, 0.01, 0.0);
  o.require(flats.flats.size() == 1, "expected one flat");
  if (!o.pass) return o;
  const auto proj = rank_one_flat(phi, flats.flats[0].set, p);
  const double comm = commutator_norm(multiplication(phi, p), proj);
  const double idem = (proj * proj - proj).matrix().cwiseAbs().maxCoeff();
  o.require(comm <= 1e-12, "commutator " + fmt(comm));
  o.require(proj.is_positive(), "P not positive");
  o.require(idem <= 1e-12, "||P^2 - P||_max " + fmt(idem));
  if (o.pass) o.detail = "commutator " + fmt(comm) + ", ||P^2 - P||_max " + fmt(idem);
  return o;
}

// Disjointness failure of the counterexample.
Outcome criterion5() {
  Outcome o;
  const auto g = MeasureSpace::product_grid(32, 32);
  const auto res = disjointness_preservation_test(averaging_counterexample(g, Exponent(2.0)), 32, 1);
  o.require(!res.preserves && res.witness.has_value(), "no witness found");
  if (!o.pass) return o;
  const auto& w = *res.witness;
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const bool left = g.center(i).x < 0.5;
    o.require(w.f[i] == (left ? 1.0 : 0.0) && w.g[i] == (left ? 0.0 : 1.0), "witness is not the half split");
    worst = std::max(worst, std::abs(w.overlap[i] - 0.5));
  }
  o.require(worst <= 1e-12, "min(|Rf|,|Rg|) deviates from 1/2 by " + fmt(worst));
  if (o.pass) o.detail = "witness " + w.source + ", max |min(|Rf|,|Rg|) - 1/2| " + fmt(worst);
  return o;
}

std::vector<double> read_oracle(const std::string& path) {
  std::ifstream in(path);
  std::vector<double> norms;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    norms.push_back(std::stod(line.substr(line.rfind(',') + 1)));
  }
  return norms;
}

// Disjoint-image decay under the Gaussian kernel, and the multiplier contrast.
Outcome criterion6() {
  Outcome o;
  const auto s = MeasureSpace::uniform_interval(4096);
  const Exponent p(2.0);
  const auto k = kernel_operator(s, gaussian_kernel(0.02), p);
  const auto e = dyadic_disjoint_indicators(s, 0, 4096, 64, p);

  std::vector<double> kn;
  for (const auto& f : e) kn.push_back(k.apply(f.abs()).norm());
  const auto literal = decay_profile(kn, 0.25);
  o.require(std::all_of(kn.begin(), kn.end(), [](double v) { return v > 0.0; }), "some ||Ke_n|| = 0");
  o.require(literal.decays, "||Ke_n|| tail " + fmt(literal.tail_max) + " vs head " + fmt(literal.head_max));

  const auto oracle = read_oracle(FLATLAB_DATA_DIR "/gaussian_decay_oracle.csv");
  o.require(oracle.size() == kn.size(), "oracle file has " + std::to_string(oracle.size()) + " rows");
  double oracle_gap = 0.0;
  for (std::size_t n = 0; n < std::min(oracle.size(), kn.size()); ++n)
    oracle_gap = std::max(oracle_gap, std::abs(kn[n] - oracle[n]) / oracle[n]);
  o.require(oracle_gap <= 1e-9, "disagrees with the recorded oracle by " + fmt(oracle_gap));

  // Disjoint images: the block compression of K, dominated by K.
  std::vector<MeasurableSet> blocks;
  for (const auto& f : e) blocks.push_back(support(f));
  const auto strict = disjoint_decay(block_compression(k, blocks), k, e, 0.25);
  o.require(strict.decays && strict.domination_consistent, "compressed kernel does not decay");

  // Contrast: M_phi on {phi >= 0.5}.
  const auto phi = make_multiplier(s, "identity");
  const auto upper = level_set(phi, LevelKind::AtLeast, 0.5).set.indices();
  const auto eu = dyadic_disjoint_indicators(s, upper.front(), upper.size(), 64, p);
  const auto m = multiplication(phi, p);
  const auto contrast = disjoint_decay(m, m, eu, 0.25);
  const double low = *std::min_element(contrast.norms.begin(), contrast.norms.end());
  o.require(low >= 0.5, "multiplier image norm " + fmt(low) + " below 0.5");
  o.require(!contrast.decays, "multiplier verdict unexpectedly true");

  if (o.pass)
    o.detail = "tail/head " + fmt(literal.tail_max / literal.head_max) + " < 0.25, oracle gap " +
               fmt(oracle_gap) + "; multiplier min ||Ae_n|| " + fmt(low) + ", verdict false";
  return o;
}

// Property suites.
Outcome criterion7() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240607);
  const Exponent p2(2.0);

  // p-additivity.
  double worst_add = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double pv = 1.0 + 6.0 * std::uniform_real_distribution<double>(0, 1)(rng);
    const auto s = testing::random_weight_space(2 + trial % 60, rng);
    const auto f = testing::random_function(s, Exponent(pv), rng, -3.0, 3.0);
    const auto e = testing::random_set(s, rng);
    const double whole = f.norm_pow();
    const double parts = restrict(f, e).norm_pow() + restrict(f, e.complement()).norm_pow();
    worst_add = std::max(worst_add, std::abs(parts - whole) / whole);
  }
  o.require(worst_add <= 1e-10, "p-additivity " + fmt(worst_add));

  // Entrywise domination versus the functional criterion |Tx| <= S|x|.
  std::size_t mismatches = 0;
  std::uniform_real_distribution<double> shrink(0.0, 1.0);
  std::bernoulli_distribution flip(0.5);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 3 + trial % 8;
    const auto s = testing::random_weight_space(n, rng);
    const LinearOperator big(s, testing::random_matrix(n, rng, 0.0, 1.0), p2);
    Matrix tm = big.matrix();
    for (Eigen::Index i = 0; i < tm.size(); ++i) tm(i) *= shrink(rng) * (flip(rng) ? -1.0 : 1.0);
    if (trial % 3 == 0) tm(trial % tm.size()) = big.matrix()(trial % tm.size()) * 1.5 + 0.1;
    const LinearOperator small(s, tm, p2);
    bool functional = true;
    for (int probe = 0; probe < 50 && functional; ++probe) {
      const auto x = testing::random_function(s, p2, rng);
      functional = (small.apply(x).values().cwiseAbs().array() <=
                    big.apply(x.abs()).values().array() + 1e-12).all();
    }
    for (std::size_t j = 0; j < n && functional; ++j) {
      Vector ej = Vector::Zero(static_cast<Eigen::Index>(n));
      ej[static_cast<Eigen::Index>(j)] = 1.0;
      const LpFunction x(s, ej, p2);
      functional = (small.apply(x).values().cwiseAbs().array() <= big.apply(x).values().array()).all();
    }
    mismatches += functional != dominates(big, small);
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " domination mismatches");

  // Dominated operators inherit invariance of level sets.
  std::size_t inherit_fail = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto s = testing::random_weight_space(10 + trial % 7, rng);
    std::uniform_int_distribution<int> lvl(0, 2);
    Vector pv(static_cast<Eigen::Index>(s.size()));
    for (auto& v : pv) v = 0.2 + 0.3 * lvl(rng);
    const LpFunction phi(s, pv, Exponent::infinity());
    Matrix rm = Matrix::Zero(pv.size(), pv.size());
    for (Eigen::Index i = 0; i < pv.size(); ++i)
      for (Eigen::Index j = 0; j < pv.size(); ++j)
        if (pv[i] == pv[j]) rm(i, j) = shrink(rng);
    const LinearOperator r(s, rm, p2);
    Matrix am = rm;
    for (Eigen::Index i = 0; i < am.size(); ++i) am(i) *= 2.0 * shrink(rng) - 1.0;
    const LinearOperator a(s, am, p2);
    const auto e = level_set(phi, LevelKind::AtMost, shrink(rng)).set;
    if (!(dominates(r, a) && leaves_invariant(r, e).invariant && leaves_invariant(a, e).invariant))
      ++inherit_fail;
  }
  o.require(inherit_fail == 0, std::to_string(inherit_fail) + " inheritance failures");

  // Star identity for commuting multiplication pairs.
  double worst_star = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = testing::random_weight_space(24, rng);
    const auto phi = testing::random_function(s, Exponent::infinity(), rng, 0.0, 2.0);
    const auto psi = testing::random_function(s, p2, rng, -2.0, 2.0);
    const auto x = testing::random_function(s, p2, rng);
    worst_star = std::max(worst_star, star_identity_check(multiplication(psi, p2), phi, x, 8).max_deviation);
  }
  o.require(worst_star <= 1e-10, "star identity " + fmt(worst_star));

  const double secs = seconds_since(t0);
  o.require(secs < 60.0, "runtime " + fmt(secs) + " s");
  if (o.pass)
    o.detail = "p-additivity " + fmt(worst_add) + ", domination 1000/1000, inheritance 500/500, star " +
               fmt(worst_star) + ", " + fmt(secs) + " s";
  return o;
}

// The two directions never fail together on a plateau multiplier.
Outcome criterion8() {
  Outcome o;
  const auto s = MeasureSpace::uniform_interval(1024);
  const Exponent p(2.0);
  const auto phi = make_multiplier(s, "plateau(0.25,0.5)");
  const double theta = 0.1;
  const auto flats = detect_flats(phi, theta, 0.0);
  o.require(flats.has_flat() && flats.flats[0].measure > theta, "analyze reports no flat");
  if (!o.pass) return o;
  const auto x = LpFunction::indicator(flats.flats[0].set, p);
  WitnessConfig cfg;
  cfg.steps = 4;
  bool halted = false;
  std::string reason;
  try {
    witness_step(init_state(LinearOperator::identity(s, p), phi, x, cfg), phi,
                 LinearOperator::identity(s, p), 1.0, cfg);
  } catch (const FlatAtScale& e) {
    halted = true;
    reason = e.what();
  }
  o.require(halted, "step 1 did not raise FlatAtScale");
  const auto tr = run_witness(LinearOperator::identity(s, p), phi, x, cfg);
  o.require(tr.steps.empty() && tr.e.empty(), "run produced steps");
  const auto proj = rank_one_flat(phi, flats.flats[0].set, p);
  const double comm = commutator_norm(proj, multiplication(phi, p));
  o.require(comm <= 1e-12, "flat projection commutator " + fmt(comm));
  if (o.pass)
    o.detail = "flat measure " + fmt(flats.flats[0].measure) + " > theta " + fmt(theta) +
               ", witness halts at step 1 (FlatAtScale), flat commutator " + fmt(comm);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 commutant invariance", criterion1},
      {"2 witness symmetric case", criterion2},
      {"3 witness dominated case", criterion3},
      {"4 flat direction", criterion4},
      {"5 disjointness failure", criterion5},
      {"6 disjoint-image decay", criterion6},
      {"7 property suites", criterion7},
      {"8 flat-at-scale dichotomy", criterion8},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
