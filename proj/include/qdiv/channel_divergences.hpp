#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qdiv/channels.hpp"
#include "qdiv/divergences.hpp"

namespace qdiv {

// Stabilized / regularized channel divergences: optimization over entangled
// inputs, exact closed forms where available, chain-rule and additivity
// checkers. Optimizer outputs are always lower bounds.

struct DivergenceSpec {
  enum class Kind { umegaki, petz, geometric, dmax, hypothesis_testing };
  Kind kind = Kind::umegaki;
  double alpha = 2.0;  // petz / geometric
  double eps = 0.1;    // hypothesis_testing

  static DivergenceSpec parse(const std::string& name, double alpha, double eps);
  std::string name() const;
};

/// Dispatch to the state-level divergence value in bits.
double state_divergence(const DivergenceSpec& spec, const DensityMatrix& rho,
                        const DensityMatrix& sigma);

/// Classical divergence of two nonnegative vectors under the same spec.
double classical_divergence_value(const DivergenceSpec& spec, const RVector& u,
                                  const RVector& v);

struct OptimizerConfig {
  int restarts = 16;
  int max_iterations = 500;
  double initial_step = 0.1;   // backtracking start
  double tol = 1e-9;           // convergence tolerance on the objective
  double fd_step = 1e-5;       // central finite-difference step
  Seed seed = 0;
};

enum class EstimateKind { exact_classical, exact_choi_dmax, optimizer_lower_bound };

struct OptimizerReport {
  int restarts = 0;
  long long iterations = 0;
  std::vector<double> best_objective_trace;  // best value after each restart
};

struct ChannelDivergenceEstimate {
  double value = 0.0;
  EstimateKind kind = EstimateKind::optimizer_lower_bound;
  std::optional<CVector> witness_state;  // pure state on A' (x) A
  OptimizerReport report;
};

/// Multi-start projected gradient ascent over pure inputs on A' (x) A with
/// dim A' = dim A. The returned value is a lower bound on the stabilized
/// channel divergence, with the best witness attached.
ChannelDivergenceEstimate stabilized_divergence(const DivergenceSpec& spec,
                                                const KrausChannel& e, const KrausChannel& f,
                                                const OptimizerConfig& cfg);

/// Vertex reduction for classical channels: max over input symbols of the
/// divergence between output columns. Throws NotClassical.
ChannelDivergenceEstimate exact_classical_channel_divergence(const DivergenceSpec& spec,
                                                             const KrausChannel& e,
                                                             const KrausChannel& f);

/// Exact D_max channel divergence via Choi operators.
ChannelDivergenceEstimate dmax_channel_divergence_choi(const KrausChannel& e,
                                                       const KrausChannel& f);

/// Per-copy lower bounds (n, value/n) for n = 1..n_max on the n-fold tensor
/// powers; exact for classical channels.
std::vector<std::pair<int, double>> regularized_estimate(const DivergenceSpec& spec,
                                                         const KrausChannel& e,
                                                         const KrausChannel& f, int n_max,
                                                         const OptimizerConfig& cfg,
                                                         int dim_cap = 4096);

/// Certified upper value of the geometric Renyi channel divergence: exact for
/// classical channels, otherwise the Choi D_max (which dominates it).
double channel_geometric_upper(double alpha, const KrausChannel& e, const KrausChannel& f);

enum class ChainMode { classical, quantum_certified };
enum class ChainStatus { ok, violated, inconclusive };

struct ChainRuleReport {
  ChainStatus status = ChainStatus::ok;
  double slack = 0.0;
  double state_term = 0.0;    // D_alpha-hat(rho || sigma)
  double channel_term = 0.0;  // channel divergence (exact or certified upper)
  double output_term = 0.0;   // D_alpha-hat(E(rho) || F(sigma))
};

ChainRuleReport geometric_chain_rule_check(double alpha, const KrausChannel& e,
                                           const KrausChannel& f, const DensityMatrix& rho,
                                           const DensityMatrix& sigma, ChainMode mode,
                                           const OptimizerConfig& cfg = {});

/// Classical mode: |joint - sum of singles| (must be ~0). Optimizer mode:
/// joint lower bound minus sum of singles (product-witness direction only).
double geometric_additivity_check(double alpha, const KrausChannel& e1, const KrausChannel& f1,
                                  const KrausChannel& e2, const KrausChannel& f2,
                                  ChainMode mode, const OptimizerConfig& cfg = {});

/// (1/gamma) log2(2^{gamma Dhat_{1+gamma}(E||F)} + 2), conservative upper end.
double c_hat_gamma(double gamma, const KrausChannel& e, const KrausChannel& f,
                   const OptimizerConfig& cfg = {});

/// C = 8 min over the alpha grid of (1/(alpha-1)) log2(2^{(alpha-1) Dhat_alpha} + 2);
/// +inf when every grid point is infinite.
double constant_C(const KrausChannel& e, const KrausChannel& f,
                  const std::vector<double>& alpha_grid = {1.25, 1.5, 1.75, 2.0},
                  const OptimizerConfig& cfg = {});

}  // namespace qdiv
