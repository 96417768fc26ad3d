#include "flatlab/witness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "flatlab/errors.hpp"

namespace flatlab {

namespace {

double split_constant(double p) { return std::pow(2.0, -1.0 / p); }

std::size_t distinct_values_on(const LpFunction& phi, const MeasurableSet& where) {
  std::set<double> values;
  for (std::size_t i : where.indices()) values.insert(phi[i]);
  return values.size();
}

bool relative_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

SplitResult split_level(const LpFunction& phi, const LpFunction& y, double alpha, double beta) {
  require_same_space(phi.space(), y.space(), "split_level");
  if (y.p().is_infinite()) throw PreconditionError("norm-equalising splits need finite p");
  const auto band = level_set(phi, LevelKind::Between, alpha, beta).set;
  const auto supp = support(y);
  if (!supp.is_subset_of(band))
    throw PreconditionError("y is not supported in the band [alpha, beta]");
  const double total_norm = y.norm();
  if (!(total_norm > 0.0)) throw PreconditionError("cannot split y = 0");

  // Atoms of the band ordered by phi, grouped into distinct values with the
  // cumulative mass sum w_i |y_i|^p.
  auto atoms = band.indices();
  std::stable_sort(atoms.begin(), atoms.end(),
                   [&](std::size_t a, std::size_t b) { return phi[a] < phi[b]; });
  const double p = y.p().value();
  const double scale = y.sup_norm();
  std::vector<double> values;
  std::vector<double> prefix;
  CompensatedSum acc;
  for (std::size_t i : atoms) {
    const double r = std::abs(y[i]) / scale;
    if (r != 0.0) acc.add(y.space().weight(i) * std::pow(r, p));
    if (values.empty() || phi[i] != values.back()) {
      values.push_back(phi[i]);
      prefix.push_back(acc.value());
    } else {
      prefix.back() = acc.value();
    }
  }
  const double total = prefix.back();

  if (distinct_values_on(phi, supp) < 2)
    throw FlatAtScale("multiplier takes a single value on Supp(y) inside [" +
                      std::to_string(alpha) + ", " + std::to_string(beta) + "]");

  // Cut after group g gives lower mass prefix[g]. Valid cuts leave mass on
  // both sides; prefix is non-decreasing, so bisect for the half-mass point
  // and compare the neighbours in norm units.
  const double c = split_constant(p);
  auto lower_ratio = [&](std::size_t g) { return std::pow(prefix[g] / total, 1.0 / p); };
  auto valid = [&](std::size_t g) { return prefix[g] > 0.0 && prefix[g] < total; };

  const auto it = std::lower_bound(prefix.begin(), prefix.end() - 1, total / 2.0);
  const auto mid = static_cast<std::size_t>(std::distance(prefix.begin(), it));
  std::optional<std::size_t> best;
  auto consider = [&](std::size_t g) {
    if (g + 1 >= values.size() || !valid(g)) return;
    if (!best || std::abs(lower_ratio(g) - c) < std::abs(lower_ratio(*best) - c)) best = g;
  };
  // Nearest valid cut below the half-mass point, then at or above it.
  for (std::size_t g = std::min(mid, values.size() - 1); g-- > 0;)
    if (valid(g)) {
      consider(g);
      break;
    }
  for (std::size_t g = mid; g + 1 < values.size(); ++g)
    if (valid(g)) {
      consider(g);
      break;
    }
  if (!best) throw FlatAtScale("no cut leaves mass of y on both sides");

  const std::size_t g = *best;
  const double gamma = values[g] + (values[g + 1] - values[g]) / 2.0;
  const auto lower = level_set(phi, LevelKind::Between, alpha, gamma).set;
  const double ratio = restrict(y, lower).norm() / total_norm;
  return {gamma, ratio, std::abs(ratio - c)};
}

unsigned default_step_count(const LpFunction& phi, const LpFunction& x) {
  const std::size_t d = distinct_values_on(phi, support(x));
  if (d < 2) return 1;
  const int k = static_cast<int>(std::floor(std::log2(static_cast<double>(d)))) - 1;
  return static_cast<unsigned>(std::max(k, 1));
}

WitnessState init_state(const LinearOperator& a, const LpFunction& phi, const LpFunction& x,
                        const WitnessConfig& config) {
  require_same_space(a.space(), phi.space(), "init_state");
  require_same_space(a.space(), x.space(), "init_state");
  if (x.p().is_infinite()) throw PreconditionError("the construction needs finite p");
  if (!(x.p() == a.p())) throw SpaceMismatch("x and A must share the exponent p");
  if ((phi.values().array() < 0.0).any())
    throw PreconditionError("multiplier must be non-negative");
  if (a.is_zero()) throw PreconditionError("operator A must be non-zero");

  LpFunction y = a.apply(x);
  if (!(y.norm() > 0.0)) throw NoNonzeroImage("A x = 0 for the supplied x");

  // A must respect the level structure of phi. Sample cuts between distinct
  // values and test both E^gamma and E_gamma.
  std::vector<double> values(phi.values().data(), phi.values().data() + phi.values().size());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.size() >= 2) {
    const std::size_t gaps = values.size() - 1;
    const std::size_t samples = std::min(config.invariance_samples, gaps);
    for (std::size_t s = 0; s < samples; ++s) {
      const std::size_t g = samples == 1 ? gaps / 2 : s * (gaps - 1) / (samples - 1);
      const double cut = values[g] + (values[g + 1] - values[g]) / 2.0;
      for (LevelKind kind : {LevelKind::AtMost, LevelKind::AtLeast}) {
        const auto band = level_set(phi, kind, cut);
        const auto inv = leaves_invariant(a, band.set, config.invariance_tol);
        if (!inv.invariant)
          throw NotLevelInvariant("A does not leave the " + std::string(to_string(kind)) +
                                  " level set at " + std::to_string(cut) +
                                  " invariant (violation " + std::to_string(inv.violation) + ")");
      }
    }
  }
  return {0, 0.0, phi.sup_norm(), x, std::move(y)};
}

WitnessStep witness_step(const WitnessState& state, const LpFunction& phi,
                         const LinearOperator& a, double a_norm, const WitnessConfig& config) {
  const double p = state.u.p().value();
  const SplitResult split = split_level(phi, state.u, state.alpha, state.beta);
  const auto lower = level_set(phi, LevelKind::Between, state.alpha, split.gamma).set;
  const auto upper = level_set(phi, LevelKind::Between, split.gamma, state.beta).set;

  LpFunction a_lo = restrict(state.a, lower);
  LpFunction a_hi = restrict(state.a, upper);
  const double n_lo = a_lo.norm();
  const double n_hi = a_hi.norm();
  // Smaller piece becomes a_{k+1}; ties go to the lower interval.
  const bool took_lower = n_lo <= n_hi;

  const auto& a_band = took_lower ? lower : upper;
  const auto& b_band = took_lower ? upper : lower;
  LpFunction a_next = took_lower ? std::move(a_lo) : std::move(a_hi);
  LpFunction b_next = took_lower ? std::move(a_hi) : std::move(a_lo);
  LpFunction u_next = restrict(state.u, a_band);
  LpFunction v_next = restrict(state.u, b_band);

  const double norm_u_prev = state.u.norm();
  const double norm_a = a_next.norm();
  const double norm_u = u_next.norm();
  const std::size_t n = state.k + 1;

  if (!(norm_a > 0.0) || norm_a < (norm_u / a_norm) * (1.0 - 1e-9))
    throw StarvedSide("step " + std::to_string(n) + ": ||a_n|| = " + std::to_string(norm_a) +
                      " is below ||u_n|| / ||A|| = " + std::to_string(norm_u / a_norm));

  const double consistency = (a.apply(a_next) - u_next).norm() / norm_u_prev;
  if (consistency > config.invariance_cap)
    throw InvarianceViolation("step " + std::to_string(n) + ": ||A a_n - u_n|| / ||u_{n-1}|| = " +
                              std::to_string(consistency));

  const double ratio = norm_u / norm_u_prev;
  WitnessStep step{n,
                   state.alpha,
                   split.gamma,
                   state.beta,
                   took_lower,
                   std::move(a_next),
                   std::move(b_next),
                   std::move(u_next),
                   std::move(v_next),
                   norm_a,
                   0.0,
                   norm_u,
                   0.0,
                   ratio,
                   std::abs(ratio - split_constant(p)),
                   consistency,
                   b_band,
                   took_lower ? state.alpha : split.gamma,
                   took_lower ? split.gamma : state.beta};
  step.norm_b = step.b.norm();
  step.norm_v = step.v.norm();
  return step;
}

WitnessTrace run_witness(const LinearOperator& a, const LpFunction& phi, const LpFunction& x,
                         const WitnessConfig& config) {
  WitnessState state = init_state(a, phi, x, config);
  WitnessTrace trace;
  trace.p = x.p().value();
  trace.c = split_constant(trace.p);
  trace.a_norm = operator_norm(a);
  trace.norm_x = x.norm();
  trace.norm_y = state.u.norm();
  trace.requested_steps = config.steps ? config.steps : default_step_count(phi, x);

  const double a_norm = trace.a_norm.upper;
  const double p = trace.p;
  const double ratio_xy = trace.norm_y / (a_norm * trace.norm_x);
  trace.c1 = std::pow(1.0 - std::pow(trace.c * ratio_xy, p), 1.0 / p);
  trace.delta = trace.c / trace.c1 * trace.norm_y / trace.norm_x;

  for (unsigned k = 0; k < trace.requested_steps; ++k) {
    try {
      WitnessStep step = witness_step(state, phi, a, a_norm, config);
      state = step.next_state();
      trace.steps.push_back(std::move(step));
    } catch (const FlatAtScale& e) {
      trace.stop_reason = e.what();
      break;
    } catch (const StarvedSide& e) {
      trace.stop_reason = e.what();
      break;
    }
  }

  // Achieved constants: C_n = prod of split ratios, so ||u_n|| = C_n ||y||.
  double cum = 1.0;
  trace.delta_hat = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    const double n = static_cast<double>(s.n);
    cum *= s.ratio;
    const double cpow = std::pow(trace.c, n - 1.0);
    const double arg = cum / cpow * ratio_xy;
    const double c1_hat = std::pow(std::max(0.0, 1.0 - std::pow(arg, p)), 1.0 / p);
    trace.c1_hat.push_back(c1_hat);
    const double d = s.norm_v / (c1_hat * cpow * trace.norm_x);
    trace.delta_hat_n.push_back(d);
    trace.delta_hat = std::min(trace.delta_hat, d);

    LpFunction e = s.b * (1.0 / s.norm_b);
    trace.images.push_back(a.apply(e));
    trace.e.push_back(std::move(e));
  }
  if (trace.steps.empty()) trace.delta_hat = 0.0;
  return trace;
}

bool VerdictReport::all_pass() const { return failures() == 0; }

std::size_t VerdictReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return !v.pass; }));
}

VerdictReport verify_trace(const WitnessTrace& trace, const VerifyOptions& opts) {
  VerdictReport report;
  auto add = [&](std::string name, std::size_t n, bool pass, double value, double bound) {
    report.verdicts.push_back({std::move(name), n, pass, value, bound});
  };

  add("nonempty", 0, !trace.steps.empty(), static_cast<double>(trace.steps.size()), 1.0);
  add("completed", 0, trace.complete(), static_cast<double>(trace.steps.size()),
      static_cast<double>(trace.requested_steps));
  if (trace.steps.empty()) return report;

  const double p = trace.p;
  const double a_norm = trace.a_norm.upper;
  const double lo_slack = 1.0 - opts.bound_slack;
  const double hi_slack = 1.0 + opts.bound_slack;
  add("delta_positive", 0, trace.delta_hat > 0.0, trace.delta_hat, 0.0);

  double cum = 1.0;
  double prev_a_norm = trace.norm_x;
  const LpFunction* prev_a = nullptr;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    const std::size_t n = s.n;
    const double nd = static_cast<double>(n);
    cum *= s.ratio;
    const double e_norm = trace.e[i].norm();
    const double img_norm = trace.images[i].norm();

    add("unit_norm", n, std::abs(e_norm - 1.0) <= opts.unit_tol, e_norm, 1.0);
    add("image_lower_bound", n, img_norm >= trace.delta_hat * lo_slack, img_norm,
        trace.delta_hat);

    const double u_target = cum * trace.norm_y;
    add("u_norm_chain", n, std::abs(s.norm_u - u_target) <= opts.identity_tol * u_target,
        s.norm_u, u_target);

    const double a_lo = u_target / a_norm;
    add("a_norm_lower", n, a_lo <= s.norm_a * hi_slack, s.norm_a, a_lo);
    const double a_hi = std::pow(trace.c, nd) * trace.norm_x;
    add("a_norm_upper", n, s.norm_a <= a_hi * hi_slack, s.norm_a, a_hi);

    add("a_below_b", n, s.norm_a <= s.norm_b * hi_slack, s.norm_a, s.norm_b);
    const double b_hi = trace.c1_hat[i] * std::pow(trace.c, nd - 1.0) * trace.norm_x;
    add("b_norm_upper", n, s.norm_b <= b_hi * hi_slack, s.norm_b, b_hi);

    const double lhs = std::pow(s.norm_a, p) + std::pow(s.norm_b, p);
    const double rhs = std::pow(prev_a_norm, p);
    add("p_additivity", n, std::abs(lhs - rhs) <= opts.identity_tol * rhs, lhs, rhs);

    const double chain = img_norm * s.norm_b;
    add("image_chain", n, relative_close(chain, s.norm_v, opts.identity_tol), chain, s.norm_v);

    add("split_quality", n, s.split_deviation <= opts.split_cap, s.split_deviation,
        opts.split_cap);

    const bool in_band = support(trace.images[i]).is_subset_of(s.b_band) &&
                         support(trace.e[i]).is_subset_of(s.b_band);
    add("image_in_band", n, in_band, in_band ? 1.0 : 0.0, 1.0);

    if (prev_a) {
      const bool nested = support(s.a).is_subset_of(support(*prev_a));
      add("support_nesting", n, nested, nested ? 1.0 : 0.0, 1.0);
    }
    prev_a = &s.a;
    prev_a_norm = s.norm_a;
  }

  // Pairwise disjointness of the e_n and of the images A e_n.
  std::vector<MeasurableSet> e_supp, img_supp;
  for (std::size_t i = 0; i < trace.e.size(); ++i) {
    e_supp.push_back(support(trace.e[i]));
    img_supp.push_back(support(trace.images[i]));
  }
  std::size_t e_clash = 0, img_clash = 0;
  for (std::size_t i = 0; i < e_supp.size(); ++i)
    for (std::size_t j = i + 1; j < e_supp.size(); ++j) {
      e_clash += e_supp[i].intersects(e_supp[j]);
      img_clash += img_supp[i].intersects(img_supp[j]);
    }
  add("e_disjoint", 0, e_clash == 0, static_cast<double>(e_clash), 0.0);
  add("images_disjoint", 0, img_clash == 0, static_cast<double>(img_clash), 0.0);
  return report;
}

}  // namespace flatlab
