#include "qdiv/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace qdiv {

namespace {

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

void check_hermitian(const Matrix& H, double tol) {
  if (H.rows() != H.cols()) throw NonHermitian("matrix is not square");
  const double scale = std::max(1.0, max_abs(H));
  const double dev = max_abs(Matrix(H - H.adjoint()));
  if (dev > tol * scale)
    throw NonHermitian("symmetry deviation " + std::to_string(dev) + " exceeds tolerance");
}

EigSystem eig_hermitian(const Matrix& H, double tol) {
  check_hermitian(H, tol);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (H + H.adjoint()));
  if (solver.info() != Eigen::Success) throw DomainError("eigendecomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix matrix_function(const Matrix& H, const std::function<double(double)>& f,
                       double kernel_value, double kernel_tol) {
  EigSystem es = eig_hermitian(H);
  const double spectral = es.values.size() ? es.values.cwiseAbs().maxCoeff() : 0.0;
  const double cut = kernel_tol >= 0.0 ? kernel_tol : kKernelRel * spectral;
  RVector mapped(es.values.size());
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    const double lam = es.values[i];
    if (std::abs(lam) <= cut) {
      mapped[i] = kernel_value;
    } else {
      const double y = f(lam);
      if (std::isnan(y))
        throw DomainError("scalar function is NaN at eigenvalue " + std::to_string(lam));
      mapped[i] = y;
    }
  }
  return es.vectors * mapped.asDiagonal() * es.vectors.adjoint();
}

Matrix positive_part(const Matrix& H) {
  EigSystem es = eig_hermitian(H);
  const double cut = kKernelRel * (es.values.size() ? es.values.cwiseAbs().maxCoeff() : 0.0);
  RVector mapped = es.values.unaryExpr([cut](double l) { return l > cut ? l : 0.0; });
  return es.vectors * mapped.asDiagonal() * es.vectors.adjoint();
}

Matrix negative_part(const Matrix& H) { return positive_part(Matrix(-H)); }

Matrix support_projector(const Matrix& H) {
  EigSystem es = eig_hermitian(H);
  const double cut = kKernelRel * (es.values.size() ? es.values.cwiseAbs().maxCoeff() : 0.0);
  RVector mapped = es.values.unaryExpr([cut](double l) { return std::abs(l) > cut ? 1.0 : 0.0; });
  return es.vectors * mapped.asDiagonal() * es.vectors.adjoint();
}

Matrix tensor(const Matrix& A, const Matrix& B) {
  Matrix out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

DensityMatrix DensityMatrix::make(Matrix m, std::vector<int> dims, bool normalized) {
  const long total = std::accumulate(dims.begin(), dims.end(), 1L, std::multiplies<long>());
  if (total != m.rows() || m.rows() != m.cols())
    throw DimensionMismatch("subsystem dimensions do not factor the matrix");
  check_hermitian(m);
  EigSystem es = eig_hermitian(m);
  bool clipped = false;
  RVector vals = es.values;
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals[i] < -kEigClipTol)
      throw InvalidState("eigenvalue " + std::to_string(vals[i]) + " below clip tolerance");
    if (vals[i] < 0.0) {
      vals[i] = 0.0;
      clipped = true;
    }
  }
  if (clipped) m = es.vectors * vals.asDiagonal() * es.vectors.adjoint();
  const double tr = m.trace().real();
  if (normalized && std::abs(tr - 1.0) > 1e-12)
    throw InvalidState("trace " + std::to_string(tr) + " of a normalized state");
  DensityMatrix rho;
  rho.mat = std::move(m);
  rho.dims = std::move(dims);
  rho.normalized = normalized;
  return rho;
}

DensityMatrix DensityMatrix::make(Matrix m, bool normalized) {
  std::vector<int> dims{static_cast<int>(m.rows())};
  return make(std::move(m), std::move(dims), normalized);
}

DensityMatrix DensityMatrix::wrap(Matrix m, std::vector<int> dims, bool normalized) {
  DensityMatrix rho;
  rho.mat = std::move(m);
  rho.dims = std::move(dims);
  rho.normalized = normalized;
  return rho;
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  std::vector<int> dims = a.dims;
  dims.insert(dims.end(), b.dims.begin(), b.dims.end());
  return DensityMatrix::wrap(tensor(a.mat, b.mat), std::move(dims),
                             a.normalized && b.normalized);
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
  const int k = static_cast<int>(rho.dims.size());
  std::vector<bool> kept(k, false);
  for (int s : keep) {
    if (s < 0 || s >= k) throw DimensionMismatch("keep index out of range");
    kept[s] = true;
  }
  std::vector<int> out_dims, keep_sorted;
  long dim_keep = 1, dim_tr = 1;
  for (int s = 0; s < k; ++s) {
    if (kept[s]) {
      out_dims.push_back(rho.dims[s]);
      keep_sorted.push_back(s);
      dim_keep *= rho.dims[s];
    } else {
      dim_tr *= rho.dims[s];
    }
  }
  std::vector<long> stride(k, 1);
  for (int s = k - 2; s >= 0; --s) stride[s] = stride[s + 1] * rho.dims[s + 1];

  // Flat index of the full register from a (kept, traced) index pair.
  auto full_index = [&](long ik, long it) {
    long idx = 0;
    long rk = ik, rt = it;
    for (int s = k - 1; s >= 0; --s) {
      const long d = rho.dims[s];
      if (kept[s]) {
        idx += (rk % d) * stride[s];
        rk /= d;
      } else {
        idx += (rt % d) * stride[s];
        rt /= d;
      }
    }
    return idx;
  };

  Matrix out = Matrix::Zero(dim_keep, dim_keep);
  for (long i = 0; i < dim_keep; ++i)
    for (long j = 0; j < dim_keep; ++j) {
      Complex acc = 0.0;
      for (long t = 0; t < dim_tr; ++t) acc += rho.mat(full_index(i, t), full_index(j, t));
      out(i, j) = acc;
    }
  if (out_dims.empty()) out_dims.push_back(1);
  return DensityMatrix::wrap(std::move(out), std::move(out_dims), rho.normalized);
}

DensityMatrix permute_subsystems(const DensityMatrix& rho, const std::vector<int>& perm) {
  const int k = static_cast<int>(rho.dims.size());
  if (static_cast<int>(perm.size()) != k) throw DimensionMismatch("permutation length");
  std::vector<long> stride_in(k, 1), stride_out(k, 1);
  for (int s = k - 2; s >= 0; --s) stride_in[s] = stride_in[s + 1] * rho.dims[s + 1];
  std::vector<int> out_dims(k);
  for (int s = 0; s < k; ++s) out_dims[s] = rho.dims[perm[s]];
  for (int s = k - 2; s >= 0; --s) stride_out[s] = stride_out[s + 1] * out_dims[s + 1];
  const long total = rho.mat.rows();
  std::vector<long> map(total);
  std::vector<long> idx(k);
  for (long i = 0; i < total; ++i) {
    long rest = i;
    for (int s = 0; s < k; ++s) {
      idx[s] = rest / stride_in[s];
      rest %= stride_in[s];
    }
    long j = 0;
    for (int s = 0; s < k; ++s) j += idx[perm[s]] * stride_out[s];
    map[i] = j;
  }
  Matrix out(total, total);
  for (long i = 0; i < total; ++i)
    for (long j = 0; j < total; ++j) out(map[i], map[j]) = rho.mat(i, j);
  return DensityMatrix::wrap(std::move(out), std::move(out_dims), rho.normalized);
}

Purification purify(const DensityMatrix& rho) {
  EigSystem es = eig_hermitian(rho.mat);
  const double cut = kKernelRel * std::max(1.0, es.values.cwiseAbs().maxCoeff());
  std::vector<int> sup;
  for (Eigen::Index i = es.values.size() - 1; i >= 0; --i)
    if (es.values[i] > cut) sup.push_back(static_cast<int>(i));
  const int rank = std::max<int>(1, static_cast<int>(sup.size()));
  const int d = rho.dim();
  CVector psi = CVector::Zero(static_cast<long>(d) * rank);
  for (int r = 0; r < static_cast<int>(sup.size()); ++r) {
    const double w = std::sqrt(es.values[sup[r]]);
    for (int a = 0; a < d; ++a) psi[static_cast<long>(a) * rank + r] = w * es.vectors(a, sup[r]);
  }
  psi.normalize();
  return {std::move(psi), {d, rank}};
}

Matrix random_hermitian(int dim, Seed seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = Complex(gauss(gen), gauss(gen));
  return 0.5 * (g + g.adjoint());
}

Matrix random_unitary(int dim, Seed seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = Complex(gauss(gen), gauss(gen));
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phase convention so the result is unique per seed.
  for (int j = 0; j < dim; ++j) {
    Complex d = r(j, j);
    q.col(j) *= (std::abs(d) > 0) ? d / std::abs(d) : Complex(1.0, 0.0);
  }
  return q;
}

DensityMatrix random_density(int dim, int rank, Seed seed) {
  if (rank < 1 || rank > dim) throw DimensionMismatch("rank out of range");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(dim, rank);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < rank; ++j) g(i, j) = Complex(gauss(gen), gauss(gen));
  Matrix w = g * g.adjoint();
  w /= w.trace().real();
  if (rank == dim) {
    // Eigenvalue floor keeps property suites away from near-singular noise;
    // 1.5e-6 before renormalization leaves at least 1e-6 after it.
    EigSystem es = eig_hermitian(w);
    RVector vals = es.values.unaryExpr([](double l) { return std::max(l, 1.5e-6); });
    w = es.vectors * vals.asDiagonal() * es.vectors.adjoint();
    w /= w.trace().real();
  }
  return DensityMatrix::make(std::move(w), {dim}, true);
}

CVector random_pure(int dim, Seed seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = Complex(gauss(gen), gauss(gen));
  v.normalize();
  return v;
}

}  // namespace qdiv
