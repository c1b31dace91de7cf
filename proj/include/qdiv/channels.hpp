#pragma once

#include <optional>
#include <vector>

#include "qdiv/operator_core.hpp"
#include "qdiv/types.hpp"

namespace qdiv {

// CPTP maps stored as Kraus families. Channels are immutable after
// construction; Choi matrices are derived on demand.

struct KrausChannel {
  int dim_in = 0;
  int dim_out = 0;
  std::vector<Matrix> kraus;

  // Metadata enabling exact evaluation paths. `stochastic` is set when the
  // channel is a classical embedding (columns = output distributions);
  // `replaced_state` when the channel ignores its input.
  std::optional<RMatrix> stochastic;
  std::optional<Matrix> replaced_state;

  bool is_classical() const { return stochastic.has_value(); }
  bool is_replacer() const { return replaced_state.has_value(); }

  /// Validates completeness sum_i K_i^dag K_i = 1 within tol.
  static KrausChannel make(std::vector<Matrix> ks, double tol = 1e-10);

  /// Equivalent channel with at most dim_in*dim_out Kraus operators,
  /// recovered from the Choi eigendecomposition.
  KrausChannel compressed(double tol = 1e-12) const;
};

/// Applies the channel to `target` subsystem of rho (id (x) Lambda (x) id).
DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& rho, int target = 0);

/// Raw action on a matrix of matching dimension (no subsystem bookkeeping).
Matrix apply_matrix(const KrausChannel& ch, const Matrix& m);

/// Adjoint (Heisenberg) action sum_i K_i^dag F K_i; unital.
Matrix adjoint_apply(const KrausChannel& ch, const Matrix& F);

KrausChannel compose(const KrausChannel& second, const KrausChannel& first);
KrausChannel tensor_channels(const KrausChannel& a, const KrausChannel& b);

KrausChannel identity_channel(int dim);
KrausChannel replacer(const DensityMatrix& output, int dim_in);

/// Lambda^lambda_tau(omega) = (1-lambda) omega + lambda Tr(omega) tau.
KrausChannel generalized_depolarizing(const DensityMatrix& tau, double lambda);

KrausChannel povm_to_cq_channel(const std::vector<Matrix>& povm);
KrausChannel pinching(const std::vector<Matrix>& projectors);

/// Embeds a column-stochastic matrix: diagonal inputs map to diagonal outputs,
/// off-diagonals are dephased away.
KrausChannel classical_channel_embed(const RMatrix& stochastic);

/// Stinespring dilation of a seeded random isometry; env_dim Kraus operators.
KrausChannel random_channel(int dim_in, int dim_out, int env_dim, Seed seed);

/// Unnormalized Choi operator sum_ij |i><j| (x) Lambda(|i><j|).
Matrix choi_matrix(const KrausChannel& ch);

/// Unitary channel permuting subsystems: output subsystem k holds former
/// subsystem perm[k]. `dims` are the input subsystem dimensions.
KrausChannel permutation_channel(const std::vector<int>& perm, const std::vector<int>& dims);

}  // namespace qdiv
