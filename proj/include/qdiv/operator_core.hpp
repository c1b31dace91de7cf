#pragma once

#include <functional>
#include <vector>

#include "qdiv/types.hpp"

namespace qdiv {

// Dense Hermitian linear algebra underlying every spectral formula:
// eigendecompositions, matrix functions, positive parts, tensor/partial-trace
// structure and seeded random generators.

inline constexpr double kHermTol = 1e-12;     // relative Hermitian-symmetry tolerance
inline constexpr double kKernelRel = 1e-12;   // kernel cutoff, relative to the spectral norm
inline constexpr double kEigClipTol = 1e-12;  // absolute clip tolerance for state eigenvalues

struct EigSystem {
  RVector values;  // ascending
  Matrix vectors;  // orthonormal columns
};

/// Throws NonHermitian if max|H - H^dag| exceeds tol relative to max|H|.
void check_hermitian(const Matrix& H, double tol = kHermTol);

EigSystem eig_hermitian(const Matrix& H, double tol = kHermTol);

/// V f(Lambda) V^dag with eigenvalues |lambda| <= kernel_tol mapped to
/// kernel_value instead of f(lambda). kernel_tol < 0 selects the default
/// kKernelRel * max|spectrum|. Throws DomainError if f produces NaN on a
/// retained eigenvalue.
Matrix matrix_function(const Matrix& H, const std::function<double(double)>& f,
                       double kernel_value, double kernel_tol = -1.0);

Matrix positive_part(const Matrix& H);
Matrix negative_part(const Matrix& H);
Matrix support_projector(const Matrix& H);

Matrix tensor(const Matrix& A, const Matrix& B);

struct DensityMatrix {
  Matrix mat;
  std::vector<int> dims;  // subsystem dimensions, product equals mat.rows()
  bool normalized = true;

  int dim() const { return static_cast<int>(mat.rows()); }
  double trace_real() const { return mat.trace().real(); }

  /// Validates Hermiticity, clips round-off-negative eigenvalues (magnitude
  /// below kEigClipTol) to zero and rejects anything more negative. When
  /// `normalized` the trace must be 1 within 1e-12.
  static DensityMatrix make(Matrix m, std::vector<int> dims, bool normalized = true);
  static DensityMatrix make(Matrix m, bool normalized = true);

  /// Trusted constructor used by internal operations whose output is PSD by
  /// construction; skips the spectral clip.
  static DensityMatrix wrap(Matrix m, std::vector<int> dims, bool normalized = true);
};

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Keeps the listed subsystems (0-based, ascending order of the output).
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

/// Reorders subsystems: output factor k is input factor perm[k].
DensityMatrix permute_subsystems(const DensityMatrix& rho, const std::vector<int>& perm);

/// Purification on A (x) R with dim(R) = rank(rho); tracing out R recovers rho.
struct Purification {
  CVector state;
  std::vector<int> dims;  // {dim(A), rank}
};
Purification purify(const DensityMatrix& rho);

Matrix random_hermitian(int dim, Seed seed);
Matrix random_unitary(int dim, Seed seed);

/// Random rank-r state; full-rank outputs carry an eigenvalue floor of 1e-6 so
/// support-sensitive divergences stay finite on property-test fuel.
DensityMatrix random_density(int dim, int rank, Seed seed);

/// Haar-ish random pure state vector (normal entries, normalized).
CVector random_pure(int dim, Seed seed);

}  // namespace qdiv
