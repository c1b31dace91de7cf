#pragma once

#include <string>
#include <vector>

#include "qdiv/channel_divergences.hpp"
#include "qdiv/operator_core.hpp"

namespace qdiv {

// Classical tail sequences, the interleaved b-basis construction rho_p/sigma_q,
// the q-up/q-down sandwich and growth-classification diagnostics for the
// finiteness examples.

enum class SequenceRule { p, q, r };

struct ClassicalSequence {
  SequenceRule rule;
  int truncation = 0;
  bool normalized = false;
  std::vector<double> values;
  int underflow_index = -1;  // 1-based n of the first entry that underflowed to 0
};

/// p_n = 2^-n / n^2, q_n = p_n / n, r_n = p_n 2^(-2^n), n >= 1.
ClassicalSequence make_sequence(SequenceRule rule, int N, bool normalize);

/// log2 of the n-th entry, evaluated analytically (stable where the entry
/// itself underflows).
double sequence_log2_entry(SequenceRule rule, int n);

enum class ClassicalKind { kl, renyi, dmax };

/// Classical divergences of two nonnegative vectors. kl supports the
/// normalized convention sum u log(u/v) and the unnormalized one which adds
/// (v - u)/ln 2.
double classical_divergence(ClassicalKind kind, double alpha, const std::vector<double>& u,
                            const std::vector<double>& v, bool unnormalized_convention = false);

/// Orthonormal interleaved basis: b_{2k} = (a_{2k}+a_{2k+1})/sqrt2,
/// b_{2k+1} = (a_{2k}-a_{2k+1})/sqrt2. Throws OddDimension.
RMatrix basis_b(int dim);

/// rho diagonal in the a-basis with weights dist_a, sigma diagonal in the
/// b-basis with weights dist_b; both truncated to N (even).
std::pair<DensityMatrix, DensityMatrix> rho_sigma_pair(const std::vector<double>& dist_a,
                                                       const std::vector<double>& dist_b,
                                                       int N);

/// Blockwise max/min duplicated across each index pair. Throws OddLength.
std::pair<std::vector<double>, std::vector<double>> q_up_down(const std::vector<double>& q);

enum class TailPair { pq, pr };
enum class Growth { converged, diverging };

struct GrowthDiagnosis {
  DivergenceSpec kind;
  std::vector<int> grid;
  std::vector<double> values;      // divergence at each grid truncation
  Growth classification = Growth::converged;
  double slope_log_n = 0.0;        // last-window slope of value vs log2(N)
  double slope_n = 0.0;            // last-window slope of value vs N
  double tail_delta = 0.0;         // |v(N_ext) - v(N_ext/2)| on the extended grid
  int extended_to = 0;             // truncation the classification evidence reached
  std::string note;
};

/// Evaluates the divergence across the grid of truncations (state level on the
/// rho_p/sigma_q blocks, or channel level via the proof inputs of the
/// generalized-depolarizing construction) and classifies the growth. The
/// classification evidence extends the partial sums analytically beyond the
/// requested grid; underflow-prone entries are handled in the log domain.
GrowthDiagnosis finiteness_diagnostic(TailPair pair, const DivergenceSpec& kind,
                                      const std::vector<int>& grid, bool channel_mode,
                                      double lambda);

/// Blockwise evaluator for the interleaved pairs: takes log2 weights of the
/// a- and b-diagonal distributions; exact for all four supported kinds and
/// stable at any truncation.
double interleaved_divergence(const DivergenceSpec& kind,
                              const std::vector<double>& log2_a,
                              const std::vector<double>& log2_b);

}  // namespace qdiv
