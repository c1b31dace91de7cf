#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "qdiv/operator_core.hpp"
#include "qdiv/types.hpp"

namespace qdiv {

// State-level divergences and distances, smoothing constructions and the
// inequality machinery built on them. Values are in bits; +inf signals a
// failed support condition for support-gated divergences.

enum class Method { exact_spectral, exact_primal_dual, constructive_bound, optimizer };

struct DivergenceResult {
  double value = 0.0;
  Method method = Method::exact_spectral;
  std::optional<std::pair<double, double>> bracket;  // (lower, upper)

  double gap() const { return bracket ? bracket->second - bracket->first : 0.0; }
};

// --- distances ---

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
double sine_distance(const DensityMatrix& rho, const DensityMatrix& sigma);
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Post-measurement state sqrt(F) rho sqrt(F) / Tr[F rho] together with the
/// gentle-measurement bound sqrt(1 - Tr[F rho]) on its sine distance to rho.
std::pair<DensityMatrix, double> gentle_measurement_post_state(const DensityMatrix& rho,
                                                               const Matrix& F);

// --- support handling ---

/// Tolerance-gated containment: ||(1-P_sigma) rho (1-P_sigma)||_1 <= 1e-10 Tr rho.
bool support_contained(const DensityMatrix& rho, const DensityMatrix& sigma);

// --- entropies ---

/// Umegaki relative entropy via the spectral double sum, Lindblad integrand
/// p log p - p log q - p + q so unnormalized inputs are handled.
DivergenceResult umegaki(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Petz-Renyi divergence (1/(alpha-1)) log Tr[rho^alpha sigma^(1-alpha)],
/// pseudo-inverse convention on the kernel of sigma for alpha < 1.
DivergenceResult petz_renyi(double alpha, const DensityMatrix& rho, const DensityMatrix& sigma);

/// Standard f-divergence: spectral double sum of q_j |<e_i,f_j>|^2 f(p_i/q_j)
/// plus the boundary terms f(0) Tr[sigma {rho=0}] + f'(inf) Tr[rho {sigma=0}].
/// Terms whose trace weight is below 1e-14 are dropped (0*inf convention).
DivergenceResult standard_f_divergence(const std::function<double(double)>& f,
                                       double f_at_zero, double f_prime_at_inf,
                                       const DensityMatrix& rho, const DensityMatrix& sigma);

/// rho X pinv(sigma); the relative modular superoperator on matrices.
Matrix relative_modular_apply(const DensityMatrix& rho, const DensityMatrix& sigma,
                              const Matrix& X);

/// D_max = log2 of the largest eigenvalue of pinv(sqrt(sigma)) rho pinv(sqrt(sigma)).
DivergenceResult max_relative(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Geometric Renyi divergence (1/(alpha-1)) log Tr[sigma A^alpha] with
/// A = pinv(sqrt(sigma)) rho pinv(sqrt(sigma)), alpha in [0,1) or (1,2].
DivergenceResult geometric_renyi(double alpha, const DensityMatrix& rho,
                                 const DensityMatrix& sigma);

/// Perturbed variant on rho+eps(rho+sigma) vs sigma+eps(rho+sigma); converges
/// to the direct formula as eps -> 0 on full-support pairs.
double geometric_renyi_regularized(double alpha, const DensityMatrix& rho,
                                   const DensityMatrix& sigma, double eps_reg);

// --- hypothesis testing ---

struct HypothesisTest {
  DivergenceResult result;   // value = -log2(beta_primal); bracket (primal, dual) in bits
  Matrix test_operator;      // primal Neyman-Pearson test F
  double threshold = 0.0;    // dual certificate t
  double beta_primal = 0.0;  // achieved type-II error
  double beta_dual = 0.0;    // dual lower bound on the optimal type-II error
};

/// D_H^eps via the Neyman-Pearson family {rho - t sigma > 0} with boundary
/// randomization (primal) and the concave dual max_t t(1-eps) - Tr[(t rho - sigma)_+].
/// Throws NumericalGap if the primal/dual values differ by more than 1e-6 bits.
HypothesisTest hypothesis_testing(double eps, const DensityMatrix& rho,
                                  const DensityMatrix& sigma);

// --- smoothed max-relative entropy (certified bracket) ---

struct SmoothingWitness {
  DensityMatrix smoothed_state;
  double sine_distance_to_original = 0.0;
  double dmax_to_sigma = 0.0;
};

struct SmoothedMaxBracket {
  DivergenceResult result;  // value = constructive upper bound
  std::optional<SmoothingWitness> witness;
  double lambda_lo = 0.0;   // bisection bracket: Tr(rho-2^l sigma)_+ >= eps^2 at lambda_lo
  double lambda_hi = 0.0;   //                     and <= eps^2 at lambda_hi
  double tr_excess = 0.0;   // Tr(rho - 2^lambda_hi sigma)_+
};

/// Bracket for D_max^eps: constructive smoothing upper bound (bisected lambda,
/// post-measurement witness G rho G^*) and the Renyi lower bound maximized over
/// an alpha grid. The exact smoothed value is never computed.
SmoothedMaxBracket smoothed_max_bracket(double eps, const DensityMatrix& rho,
                                        const DensityMatrix& sigma);

struct SmoothingPoint {
  double tr_excess = 0.0;  // Tr(rho - 2^lambda sigma)_+
  double upper = 0.0;      // lambda - log2(1 - tr_excess)
  SmoothingWitness witness;
};

/// Diagnostic mode: the smoothing construction at a fixed lambda.
SmoothingPoint smoothing_upper_at_lambda(double lambda, const DensityMatrix& rho,
                                         const DensityMatrix& sigma);

/// Renyi lower bound D_alpha + (2/(alpha-1)) log2(1/(1-eps)) maximized over a
/// grid of alpha in (0,1).
double smoothed_max_lower_bound(double eps, const DensityMatrix& rho,
                                const DensityMatrix& sigma);

/// Right-hand side D_H^{1-eps^2} - log2(1-eps^2).
double dh_from_dmax_bound(double eps, const DensityMatrix& rho, const DensityMatrix& sigma);

/// Right-hand side D_alpha + (2/(alpha-1)) log2(1/eps) + log2(1/(1-eps^2)), alpha > 1.
double dmax_from_renyi_bound(double eps, double alpha, const DensityMatrix& rho,
                             const DensityMatrix& sigma);

// --- continuity and AEP ---

/// c_gamma = (1/gamma) log2(2^{gamma D_{1+gamma}} + 2^{-gamma D_{1-gamma}} + 1).
/// Throws InfiniteRenyi when D_{1+gamma} is infinite.
double c_gamma(double gamma, const DensityMatrix& rho, const DensityMatrix& sigma);

struct ContinuitySlack {
  std::optional<double> upper;  // D + delta c^2 - D_{1+delta}, present when delta <= gamma/2
  std::optional<double> lower;  // D_{1-delta} - D + delta c^2, present when delta <= log2(3)/(2c)
};

ContinuitySlack petz_continuity_check(double delta, double gamma, const DensityMatrix& rho,
                                      const DensityMatrix& sigma);

/// Finite-n AEP window for (1/n) D_max^eps(rho^n || sigma^n).
std::pair<double, double> aep_bounds(int n, double eps, double gamma,
                                     const DensityMatrix& rho, const DensityMatrix& sigma);

double binary_entropy(double eps);

/// (D + h(eps)) / (1 - eps); upper-bounds D_H^eps.
double dh_upper_via_umegaki(double eps, const DensityMatrix& rho, const DensityMatrix& sigma);

/// D(sum_i w_i rho_i || sigma) + H(w) - sum_i w_i D(rho_i || sigma); >= 0 in theory.
double almost_concavity_check(const std::vector<double>& weights,
                              const std::vector<DensityMatrix>& rhos,
                              const DensityMatrix& sigma);

}  // namespace qdiv
