#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flatlab/levelsets.hpp"

namespace flatlab {

struct WitnessConfig {
  /// Number of splitting steps K; 0 selects floor(log2(#distinct phi values
  /// on Supp(x))) - 1.
  unsigned steps = 0;
  /// Allowed |c_hat - 2^(-1/p)| per split before the split-quality verdict fails.
  double split_cap = 0.1;
  /// ||A a_{k+1} - u_{k+1}|| must stay below cap * ||u_k||.
  double invariance_cap = 1e-9;
  /// Level bands sampled when checking that A respects the levels of phi.
  std::size_t invariance_samples = 16;
  double invariance_tol = 0.0;
};

struct SplitResult {
  double gamma;      // cut point, strictly between two distinct phi values
  double ratio;      // ||y chi_{[alpha, gamma]}|| / ||y||
  double deviation;  // |ratio - 2^(-1/p)|
};

/// Picks the cut gamma in (alpha, beta) whose lower piece of y has norm
/// closest to 2^(-1/p) ||y||, among midpoints between consecutive distinct
/// phi values in the band. Both pieces are nonzero. Throws FlatAtScale when
/// phi takes fewer than two distinct values on Supp(y).
SplitResult split_level(const LpFunction& phi, const LpFunction& y, double alpha, double beta);

/// State after k steps: a_k, u_k = A a_k, both supported in [alpha_k, beta_k].
struct WitnessState {
  std::size_t k = 0;
  double alpha = 0.0;
  double beta = 0.0;
  LpFunction a;
  LpFunction u;
};

struct WitnessStep {
  std::size_t n;               // index of the produced a_n, b_n, u_n, v_n
  double alpha, gamma, beta;   // the split interval of step n-1
  bool took_lower;             // a_n lives on [alpha, gamma]
  LpFunction a, b, u, v;
  double norm_a, norm_b, norm_u, norm_v;
  double ratio;                // c_hat = ||u_n|| / ||u_{n-1}||
  double split_deviation;      // |c_hat - 2^(-1/p)|
  double consistency;          // ||A a_n - u_n|| / ||u_{n-1}||
  MeasurableSet b_band;        // level band carrying b_n and v_n
  double next_alpha, next_beta;

  WitnessState next_state() const { return {n, next_alpha, next_beta, a, u}; }
};

/// y = Ax, interval (0, ||phi||_inf). Requires phi >= 0, finite p, y != 0
/// and that A leaves the sampled level bands of phi invariant.
WitnessState init_state(const LinearOperator& a, const LpFunction& phi, const LpFunction& x,
                        const WitnessConfig& config = {});

/// One splitting step. a_norm is the upper estimate of ||A|| used in the
/// health check ||a_{k+1}|| >= ||u_{k+1}|| / ||A||.
WitnessStep witness_step(const WitnessState& state, const LpFunction& phi,
                         const LinearOperator& a, double a_norm,
                         const WitnessConfig& config = {});

struct WitnessTrace {
  double p = 2.0;
  double c = 0.0;        // 2^(-1/p)
  double c1 = 0.0;       // [1 - (c||y|| / (||A|| ||x||))^p]^(1/p)
  double delta = 0.0;    // (c / c1) ||y|| / ||x||
  double delta_hat = 0.0;
  OperatorNormEstimate a_norm;
  double norm_x = 0.0;
  double norm_y = 0.0;
  unsigned requested_steps = 0;
  std::string stop_reason;  // empty when all requested steps ran
  std::vector<WitnessStep> steps;
  std::vector<double> c1_hat;     // achieved analogue of c1, per step
  std::vector<double> delta_hat_n;
  std::vector<LpFunction> e;       // e_n = b_n / ||b_n||
  std::vector<LpFunction> images;  // A e_n

  std::size_t effective_steps() const noexcept { return steps.size(); }
  bool complete() const noexcept { return stop_reason.empty(); }
};

/// Runs the construction. FlatAtScale and StarvedSide end the run early with
/// a partial trace; everything else propagates.
WitnessTrace run_witness(const LinearOperator& a, const LpFunction& phi, const LpFunction& x,
                         const WitnessConfig& config = {});

struct Verdict {
  std::string name;
  std::size_t n;  // step index, 0 for trace-wide checks
  bool pass;
  double value;
  double bound;
};

struct VerdictReport {
  std::vector<Verdict> verdicts;
  bool all_pass() const;
  std::size_t failures() const;
};

struct VerifyOptions {
  double unit_tol = 1e-12;
  double bound_slack = 1e-9;
  double identity_tol = 1e-10;
  double split_cap = 0.1;
};

VerdictReport verify_trace(const WitnessTrace& trace, const VerifyOptions& opts = {});

/// floor(log2(#distinct values of phi on Supp(x))) - 1, at least 1.
unsigned default_step_count(const LpFunction& phi, const LpFunction& x);

}  // namespace flatlab
