#include "qdiv/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace qdiv {

namespace {

double completeness_residual(const std::vector<Matrix>& ks) {
  if (ks.empty()) return kInf;
  const Eigen::Index din = ks.front().cols();
  Matrix acc = Matrix::Zero(din, din);
  for (const Matrix& k : ks) acc += k.adjoint() * k;
  return (acc - Matrix::Identity(din, din)).cwiseAbs().maxCoeff();
}

// (I_P (x) K (x) I_Q) * M, exploiting the block structure instead of forming
// the embedded operator.
Matrix left_embed_mul(const Matrix& K, const Matrix& M, long P, long Q) {
  const long tin = K.cols(), tout = K.rows();
  const long cols = M.cols();
  Matrix out(P * tout * Q, cols);
  Matrix gather(tin, cols), scatter(tout, cols);
  for (long p = 0; p < P; ++p) {
    for (long q = 0; q < Q; ++q) {
      for (long t = 0; t < tin; ++t) gather.row(t) = M.row((p * tin + t) * Q + q);
      scatter.noalias() = K * gather;
      for (long t = 0; t < tout; ++t) out.row((p * tout + t) * Q + q) = scatter.row(t);
    }
  }
  return out;
}

}  // namespace

KrausChannel KrausChannel::make(std::vector<Matrix> ks, double tol) {
  if (ks.empty()) throw InvalidChannel("empty Kraus family");
  const Eigen::Index dout = ks.front().rows(), din = ks.front().cols();
  for (const Matrix& k : ks)
    if (k.rows() != dout || k.cols() != din)
      throw InvalidChannel("inconsistent Kraus shapes");
  const double res = completeness_residual(ks);
  if (res > tol)
    throw InvalidChannel("completeness residual " + std::to_string(res));
  KrausChannel ch;
  ch.dim_in = static_cast<int>(din);
  ch.dim_out = static_cast<int>(dout);
  ch.kraus = std::move(ks);
  return ch;
}

KrausChannel KrausChannel::compressed(double tol) const {
  Matrix j = choi_matrix(*this);
  EigSystem es = eig_hermitian(j);
  const double cut = std::max(tol, tol * es.values.cwiseAbs().maxCoeff());
  std::vector<Matrix> ks;
  for (Eigen::Index r = 0; r < es.values.size(); ++r) {
    if (es.values[r] <= cut) continue;
    Matrix k(dim_out, dim_in);
    const double w = std::sqrt(es.values[r]);
    for (int i = 0; i < dim_in; ++i)
      for (int a = 0; a < dim_out; ++a)
        k(a, i) = w * es.vectors(static_cast<long>(i) * dim_out + a, r);
    ks.push_back(std::move(k));
  }
  KrausChannel out = KrausChannel::make(std::move(ks), 1e-9);
  out.stochastic = stochastic;
  out.replaced_state = replaced_state;
  return out;
}

DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& rho, int target) {
  const int k = static_cast<int>(rho.dims.size());
  if (target < 0 || target >= k) throw DimensionMismatch("target subsystem out of range");
  if (rho.dims[target] != ch.dim_in)
    throw DimensionMismatch("channel input dimension does not match subsystem");
  long P = 1, Q = 1;
  for (int s = 0; s < target; ++s) P *= rho.dims[s];
  for (int s = target + 1; s < k; ++s) Q *= rho.dims[s];
  const long dout = P * ch.dim_out * Q;
  Matrix out = Matrix::Zero(dout, dout);
  for (const Matrix& kr : ch.kraus) {
    Matrix half = left_embed_mul(kr, rho.mat, P, Q);
    out.noalias() += left_embed_mul(kr, half.adjoint(), P, Q).adjoint().eval();
  }
  std::vector<int> dims = rho.dims;
  dims[target] = ch.dim_out;
  return DensityMatrix::wrap(0.5 * (out + out.adjoint()), std::move(dims), rho.normalized);
}

Matrix apply_matrix(const KrausChannel& ch, const Matrix& m) {
  if (m.rows() != ch.dim_in || m.cols() != ch.dim_in)
    throw DimensionMismatch("matrix does not match channel input");
  Matrix out = Matrix::Zero(ch.dim_out, ch.dim_out);
  for (const Matrix& k : ch.kraus) out.noalias() += k * m * k.adjoint();
  return out;
}

Matrix adjoint_apply(const KrausChannel& ch, const Matrix& F) {
  if (F.rows() != ch.dim_out || F.cols() != ch.dim_out)
    throw DimensionMismatch("observable does not match channel output");
  Matrix out = Matrix::Zero(ch.dim_in, ch.dim_in);
  for (const Matrix& k : ch.kraus) out.noalias() += k.adjoint() * F * k;
  return out;
}

KrausChannel compose(const KrausChannel& second, const KrausChannel& first) {
  if (first.dim_out != second.dim_in)
    throw DimensionMismatch("composition dimensions do not chain");
  std::vector<Matrix> ks;
  ks.reserve(first.kraus.size() * second.kraus.size());
  for (const Matrix& k2 : second.kraus)
    for (const Matrix& k1 : first.kraus) ks.push_back(k2 * k1);
  KrausChannel out = KrausChannel::make(std::move(ks));
  if (first.is_classical() && second.is_classical())
    out.stochastic = RMatrix(*second.stochastic * *first.stochastic);
  if (second.is_replacer()) out.replaced_state = second.replaced_state;
  if (static_cast<long>(out.kraus.size()) > static_cast<long>(out.dim_in) * out.dim_out)
    out = out.compressed();
  return out;
}

KrausChannel tensor_channels(const KrausChannel& a, const KrausChannel& b) {
  std::vector<Matrix> ks;
  ks.reserve(a.kraus.size() * b.kraus.size());
  for (const Matrix& ka : a.kraus)
    for (const Matrix& kb : b.kraus) ks.push_back(tensor(ka, kb));
  KrausChannel out = KrausChannel::make(std::move(ks));
  if (a.is_classical() && b.is_classical()) {
    RMatrix s(a.stochastic->rows() * b.stochastic->rows(),
              a.stochastic->cols() * b.stochastic->cols());
    for (Eigen::Index i = 0; i < a.stochastic->rows(); ++i)
      for (Eigen::Index j = 0; j < a.stochastic->cols(); ++j)
        s.block(i * b.stochastic->rows(), j * b.stochastic->cols(), b.stochastic->rows(),
                b.stochastic->cols()) = (*a.stochastic)(i, j) * *b.stochastic;
    out.stochastic = std::move(s);
  }
  if (a.is_replacer() && b.is_replacer())
    out.replaced_state = tensor(*a.replaced_state, *b.replaced_state);
  if (static_cast<long>(out.kraus.size()) > static_cast<long>(out.dim_in) * out.dim_out)
    out = out.compressed();
  return out;
}

KrausChannel identity_channel(int dim) {
  return KrausChannel::make({Matrix::Identity(dim, dim)});
}

KrausChannel replacer(const DensityMatrix& output, int dim_in) {
  EigSystem es = eig_hermitian(output.mat);
  std::vector<Matrix> ks;
  for (Eigen::Index r = 0; r < es.values.size(); ++r) {
    if (es.values[r] <= 0.0) continue;
    const double w = std::sqrt(es.values[r]);
    for (int i = 0; i < dim_in; ++i) {
      Matrix k = Matrix::Zero(output.dim(), dim_in);
      k.col(i) = w * es.vectors.col(r);
      ks.push_back(std::move(k));
    }
  }
  KrausChannel ch = KrausChannel::make(std::move(ks));
  ch.replaced_state = output.mat;
  return ch;
}

KrausChannel generalized_depolarizing(const DensityMatrix& tau, double lambda) {
  if (lambda < 0.0 || lambda > 1.0) throw DomainError("lambda outside [0,1]");
  const int d = tau.dim();
  std::vector<Matrix> ks;
  if (lambda < 1.0)
    ks.push_back(std::sqrt(1.0 - lambda) * Matrix::Identity(d, d));
  if (lambda > 0.0) {
    EigSystem es = eig_hermitian(tau.mat);
    for (Eigen::Index r = 0; r < es.values.size(); ++r) {
      if (es.values[r] <= 0.0) continue;
      const double w = std::sqrt(lambda * es.values[r]);
      for (int i = 0; i < d; ++i) {
        Matrix k = Matrix::Zero(d, d);
        k.col(i) = w * es.vectors.col(r);
        ks.push_back(std::move(k));
      }
    }
  }
  KrausChannel ch = KrausChannel::make(std::move(ks));
  if (lambda == 1.0) ch.replaced_state = tau.mat;
  return ch;
}

KrausChannel povm_to_cq_channel(const std::vector<Matrix>& povm) {
  if (povm.empty()) throw InvalidPOVM("empty POVM");
  const Eigen::Index d = povm.front().rows();
  Matrix acc = Matrix::Zero(d, d);
  for (const Matrix& m : povm) {
    if (m.rows() != d || m.cols() != d) throw InvalidPOVM("inconsistent element shapes");
    EigSystem es = eig_hermitian(m);
    if (es.values.minCoeff() < -1e-10) throw InvalidPOVM("element not positive");
    acc += m;
  }
  if ((acc - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
    throw InvalidPOVM("elements do not sum to identity");
  const int n = static_cast<int>(povm.size());
  std::vector<Matrix> ks;
  for (int i = 0; i < n; ++i) {
    EigSystem es = eig_hermitian(povm[i]);
    for (Eigen::Index r = 0; r < es.values.size(); ++r) {
      if (es.values[r] <= 1e-14) continue;
      Matrix k = Matrix::Zero(n, d);
      k.row(i) = std::sqrt(es.values[r]) * es.vectors.col(r).adjoint();
      ks.push_back(std::move(k));
    }
  }
  return KrausChannel::make(std::move(ks));
}

KrausChannel pinching(const std::vector<Matrix>& projectors) {
  if (projectors.empty()) throw InvalidPOVM("empty projector family");
  const Eigen::Index d = projectors.front().rows();
  Matrix acc = Matrix::Zero(d, d);
  for (const Matrix& p : projectors) {
    if ((p * p - p).cwiseAbs().maxCoeff() > 1e-10) throw InvalidPOVM("element not idempotent");
    acc += p;
  }
  for (size_t i = 0; i < projectors.size(); ++i)
    for (size_t j = i + 1; j < projectors.size(); ++j)
      if ((projectors[i] * projectors[j]).cwiseAbs().maxCoeff() > 1e-10)
        throw InvalidPOVM("projectors not orthogonal");
  if ((acc - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
    throw InvalidPOVM("projectors not complete");
  return KrausChannel::make(std::vector<Matrix>(projectors));
}

KrausChannel classical_channel_embed(const RMatrix& stochastic) {
  const Eigen::Index dout = stochastic.rows(), din = stochastic.cols();
  for (Eigen::Index j = 0; j < din; ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < dout; ++i) {
      if (stochastic(i, j) < -1e-14) throw NotStochastic("negative transition probability");
      col += stochastic(i, j);
    }
    if (std::abs(col - 1.0) > 1e-10) throw NotStochastic("column does not sum to one");
  }
  std::vector<Matrix> ks;
  for (Eigen::Index j = 0; j < din; ++j)
    for (Eigen::Index i = 0; i < dout; ++i) {
      if (stochastic(i, j) <= 0.0) continue;
      Matrix k = Matrix::Zero(dout, din);
      k(i, j) = std::sqrt(stochastic(i, j));
      ks.push_back(std::move(k));
    }
  KrausChannel ch = KrausChannel::make(std::move(ks));
  ch.stochastic = stochastic;
  return ch;
}

KrausChannel random_channel(int dim_in, int dim_out, int env_dim, Seed seed) {
  if (env_dim < 1) throw DimensionMismatch("environment dimension must be positive");
  const long total = static_cast<long>(dim_out) * env_dim;
  if (total < dim_in) throw DimensionMismatch("no isometry into dim_out*env_dim");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(total, dim_in);
  for (long i = 0; i < total; ++i)
    for (int j = 0; j < dim_in; ++j) g(i, j) = Complex(gauss(gen), gauss(gen));
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix v = Matrix(qr.householderQ()).leftCols(dim_in);
  std::vector<Matrix> ks(env_dim, Matrix(dim_out, dim_in));
  for (int e = 0; e < env_dim; ++e)
    for (int a = 0; a < dim_out; ++a)
      for (int i = 0; i < dim_in; ++i)
        ks[e](a, i) = v(static_cast<long>(a) * env_dim + e, i);
  return KrausChannel::make(std::move(ks));
}

Matrix choi_matrix(const KrausChannel& ch) {
  const long d = static_cast<long>(ch.dim_in) * ch.dim_out;
  Matrix j = Matrix::Zero(d, d);
  for (const Matrix& k : ch.kraus) {
    CVector w(d);
    for (int i = 0; i < ch.dim_in; ++i)
      for (int a = 0; a < ch.dim_out; ++a)
        w[static_cast<long>(i) * ch.dim_out + a] = k(a, i);
    j.noalias() += w * w.adjoint();
  }
  return j;
}

KrausChannel permutation_channel(const std::vector<int>& perm, const std::vector<int>& dims) {
  const int k = static_cast<int>(dims.size());
  if (static_cast<int>(perm.size()) != k) throw DimensionMismatch("permutation length");
  const long total = std::accumulate(dims.begin(), dims.end(), 1L, std::multiplies<long>());
  std::vector<long> stride_in(k, 1), stride_out(k, 1);
  for (int s = k - 2; s >= 0; --s) stride_in[s] = stride_in[s + 1] * dims[s + 1];
  std::vector<int> out_dims(k);
  for (int s = 0; s < k; ++s) out_dims[s] = dims[perm[s]];
  for (int s = k - 2; s >= 0; --s) stride_out[s] = stride_out[s + 1] * out_dims[s + 1];
  Matrix u = Matrix::Zero(total, total);
  std::vector<long> idx(k);
  for (long i = 0; i < total; ++i) {
    long rest = i;
    for (int s = 0; s < k; ++s) {
      idx[s] = rest / stride_in[s];
      rest %= stride_in[s];
    }
    long j = 0;
    for (int s = 0; s < k; ++s) j += idx[perm[s]] * stride_out[s];
    u(j, i) = 1.0;
  }
  return KrausChannel::make({std::move(u)});
}

}  // namespace qdiv
