#pragma once

#include <string>
#include <vector>

#include "qdiv/channel_divergences.hpp"
#include "qdiv/channels.hpp"
#include "qdiv/divergences.hpp"

namespace qdiv {

// Adaptive and parallel discrimination protocols, exponent evaluation, the
// one-shot conversion bound and Stein sweeps. Exponents for GIVEN strategies;
// the sup over strategies is never optimized globally.

struct AdaptiveStrategy {
  DensityMatrix initial;                    // on A_1 (x) R_1, dims {dim_in, r_1}
  std::vector<KrausChannel> preparations;   // Lambda_i : B_{i-1} R_{i-1} -> A_i R_i
  std::vector<int> r_dims;                  // reference dimension per round, size = rounds

  int rounds() const { return static_cast<int>(preparations.size()) + 1; }

  /// Validates the dimension chain against a black box dim_in -> dim_out.
  void validate(int box_dim_in, int box_dim_out) const;
};

struct Rollout {
  DensityMatrix final_state;                // on B_n (x) R_n
  std::vector<DensityMatrix> intermediates; // outputs after each box use
};

Rollout rollout(const AdaptiveStrategy& s, const KrausChannel& box);

/// Strategy whose preparation channels swap fresh factors of nu into the box
/// slot; running it reproduces the parallel application E^(x)m (nu).
/// nu lives on R (x) A^m with dims {ref_dim, dim_in, ..., dim_in}.
AdaptiveStrategy parallel_as_adaptive(const DensityMatrix& nu, int m, int box_dim_in,
                                      int box_dim_out);

struct ExponentReport {
  int uses = 0;
  double epsilon = 0.0;
  double value_bits_per_use = 0.0;
  double primal_dual_gap = 0.0;
  std::string note;
};

ExponentReport adaptive_exponent(const AdaptiveStrategy& s, const KrausChannel& e,
                                 const KrausChannel& f, double eps);

/// (1/m) D_H^eps between E^(x)m(nu) and F^(x)m(nu); the channels act on the
/// trailing m subsystems of nu.
ExponentReport parallel_exponent(const DensityMatrix& nu, const KrausChannel& e,
                                 const KrausChannel& f, int m, double eps,
                                 int dim_cap = 4096);

/// Error term f(alpha_a, alpha_p, m, n, mu) of the one-shot conversion bound.
double conversion_error_term(double alpha_a, double alpha_p, int m, int n, double mu,
                             double C);

struct OneShotReport {
  enum class Status { verified, inconclusive };
  Status status = Status::inconclusive;
  double lhs = 0.0;           // (1/n) D_H^{alpha_a} of the adaptive final states
  double rhs_parallel = 0.0;  // (1/(1-alpha_a)) (1/m) D_H^{alpha_p} at the best found nu
  double error_term = 0.0;
  double C = 0.0;
  std::string reason;
};

/// Checks the one-shot conversion bound for a given adaptive strategy. The
/// parallel side is an optimizer lower bound, so "verified" is sound and
/// "inconclusive" is the honest outcome when the optimizer stalls.
OneShotReport verify_oneshot(const AdaptiveStrategy& s, const KrausChannel& e,
                             const KrausChannel& f, int m, double alpha_a, double alpha_p,
                             double mu, const OptimizerConfig& cfg);

struct ChainStepReport {
  double lhs_lower = 0.0;  // Renyi lower end for D_max^{eps+eps'} of the m-fold outputs
  double rhs_upper = 0.0;  // constructive upper ends + mu
  double slack = 0.0;      // rhs_upper - lhs_lower
};

/// Bracket-certified instance of the smoothed-D_max chain inequality, with the
/// near-optimal smoothing state instantiated by the constructive witness.
ChainStepReport smoothed_chain_step(double eps, double eps_prime, double mu, int m,
                                    const DensityMatrix& rho, const DensityMatrix& sigma,
                                    const KrausChannel& e, const KrausChannel& f);

struct SteinRow {
  double eps = 0.0;
  int n = 0;
  double value = 0.0;      // (1/n) D_H^eps with the best evaluated input
  double target = 0.0;     // analytic target when available (replacer: D(rho0||sigma0))
  double deviation = 0.0;  // |value - target|, NaN when no target
  std::string status;      // "ok" or "cap"
};

/// Parallel-exponent table over (eps, n) cells with product inputs (optimized
/// single-copy input, repeated) and entangled-input refinement where the
/// register cap allows it.
std::vector<SteinRow> stein_sweep(const KrausChannel& e, const KrausChannel& f,
                                  const std::vector<double>& eps_list,
                                  const std::vector<int>& n_list, const OptimizerConfig& cfg,
                                  int dim_cap = 4096);

}  // namespace qdiv
