#include "qdiv/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace qdiv {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kSupportRel = 1e-10;  // trace-mass tolerance for support containment
constexpr double kWeightDrop = 1e-14;  // 0*inf convention for boundary terms

struct SpectralPair {
  EigSystem rho, sigma;
  RMatrix overlap;  // |<e_i|f_j>|^2
  double cut_rho = 0.0, cut_sigma = 0.0;
};

SpectralPair decompose(const DensityMatrix& rho, const DensityMatrix& sigma) {
  SpectralPair sp{eig_hermitian(rho.mat), eig_hermitian(sigma.mat), {}, 0.0, 0.0};
  Matrix ov = sp.rho.vectors.adjoint() * sp.sigma.vectors;
  sp.overlap = ov.cwiseAbs2();
  sp.cut_rho = kKernelRel * std::max(0.0, sp.rho.values.cwiseAbs().maxCoeff());
  sp.cut_sigma = kKernelRel * std::max(0.0, sp.sigma.values.cwiseAbs().maxCoeff());
  return sp;
}

// log2(sum_i 2^{terms_i}) without leaving the log domain.
double log2_sum_exp(const std::vector<double>& terms) {
  double m = -kInf;
  for (double t : terms) m = std::max(m, t);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double t : terms) acc += std::exp2(t - m);
  return m + std::log2(acc);
}

Matrix pinv_sqrt(const Matrix& psd) {
  return matrix_function(psd, [](double x) { return x > 0 ? 1.0 / std::sqrt(x) : 0.0; }, 0.0);
}

Matrix sqrt_psd(const Matrix& psd) {
  return matrix_function(psd, [](double x) { return x > 0 ? std::sqrt(x) : 0.0; }, 0.0);
}

// Scaled form of A = pinv(sqrt(sigma)) rho pinv(sqrt(sigma)): eigenvalues as
// log2, plus the sigma-weights of the eigenvectors. Stable for extreme ratios.
struct WhitenedSpectrum {
  std::vector<double> log2_values;   // log2 eigenvalues of A (support of sigma)
  std::vector<double> sigma_weight;  // <w_j| sigma |w_j>
};

WhitenedSpectrum whitened_spectrum(const DensityMatrix& rho, const DensityMatrix& sigma) {
  Matrix b = pinv_sqrt(sigma.mat) * sqrt_psd(rho.mat);
  double scale = b.cwiseAbs().maxCoeff();
  if (!(scale > 0)) scale = 1.0;
  const double log2_scale = std::log2(scale);
  Matrix bs = b / scale;
  EigSystem es = eig_hermitian(Matrix(bs * bs.adjoint()));
  const double cut = kKernelRel * std::max(0.0, es.values.cwiseAbs().maxCoeff());
  WhitenedSpectrum ws;
  for (Eigen::Index j = 0; j < es.values.size(); ++j) {
    if (es.values[j] <= cut) continue;
    ws.log2_values.push_back(2.0 * log2_scale + std::log2(es.values[j]));
    ws.sigma_weight.push_back(
        std::max(0.0, (es.vectors.col(j).adjoint() * sigma.mat * es.vectors.col(j))(0, 0).real()));
  }
  return ws;
}

}  // namespace

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  Matrix sr = sqrt_psd(rho.mat);
  EigSystem es = eig_hermitian(Matrix(sr * sigma.mat * sr));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    acc += std::sqrt(std::max(0.0, es.values[i]));
  return std::min(1.0, acc * acc);
}

double sine_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return std::sqrt(std::max(0.0, 1.0 - fidelity(rho, sigma)));
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  EigSystem es = eig_hermitian(Matrix(rho.mat - sigma.mat));
  return 0.5 * es.values.cwiseAbs().sum();
}

std::pair<DensityMatrix, double> gentle_measurement_post_state(const DensityMatrix& rho,
                                                               const Matrix& F) {
  check_hermitian(F);
  const double acceptance = (F * rho.mat).trace().real();
  if (acceptance <= 1e-14) throw ZeroAcceptance("Tr[F rho] vanishes");
  Matrix sf = sqrt_psd(F);
  Matrix post = sf * rho.mat * sf / acceptance;
  DensityMatrix out = DensityMatrix::make(std::move(post), rho.dims, true);
  const double bound = std::sqrt(std::max(0.0, 1.0 - acceptance));
  return {std::move(out), bound};
}

bool support_contained(const DensityMatrix& rho, const DensityMatrix& sigma) {
  Matrix comp = Matrix::Identity(sigma.dim(), sigma.dim()) - support_projector(sigma.mat);
  EigSystem es = eig_hermitian(Matrix(comp * rho.mat * comp));
  const double mass = es.values.cwiseAbs().sum();
  return mass <= kSupportRel * std::max(rho.trace_real(), 1e-300);
}

DivergenceResult umegaki(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (!support_contained(rho, sigma)) return {kInf, Method::exact_spectral, std::nullopt};
  SpectralPair sp = decompose(rho, sigma);
  double acc_nats = 0.0;
  for (Eigen::Index i = 0; i < sp.rho.values.size(); ++i) {
    const double p = sp.rho.values[i];
    for (Eigen::Index j = 0; j < sp.sigma.values.size(); ++j) {
      const double q = sp.sigma.values[j];
      const double w = sp.overlap(i, j);
      if (w <= 0.0 || q <= sp.cut_sigma) continue;
      if (p <= sp.cut_rho) {
        acc_nats += w * q;  // p -> 0 limit of the Lindblad integrand
      } else {
        acc_nats += w * (p * std::log(p / q) - p + q);
      }
    }
  }
  return {acc_nats / kLn2, Method::exact_spectral, std::nullopt};
}

DivergenceResult petz_renyi(double alpha, const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (alpha == 1.0) throw DomainError("alpha = 1 is the Umegaki limit");
  if (alpha < 0.0) throw DomainError("alpha must be nonnegative");
  if (alpha > 1.0 && !support_contained(rho, sigma))
    return {kInf, Method::exact_spectral, std::nullopt};
  SpectralPair sp = decompose(rho, sigma);
  std::vector<double> terms;
  for (Eigen::Index i = 0; i < sp.rho.values.size(); ++i) {
    const double p = sp.rho.values[i];
    if (p <= sp.cut_rho) continue;
    for (Eigen::Index j = 0; j < sp.sigma.values.size(); ++j) {
      const double q = sp.sigma.values[j];
      const double w = sp.overlap(i, j);
      if (w <= 0.0 || q <= sp.cut_sigma) continue;
      terms.push_back(std::log2(w) + alpha * std::log2(p) + (1.0 - alpha) * std::log2(q));
    }
  }
  const double log2_trace = log2_sum_exp(terms);
  return {log2_trace / (alpha - 1.0), Method::exact_spectral, std::nullopt};
}

DivergenceResult standard_f_divergence(const std::function<double(double)>& f,
                                       double f_at_zero, double f_prime_at_inf,
                                       const DensityMatrix& rho, const DensityMatrix& sigma) {
  SpectralPair sp = decompose(rho, sigma);
  double acc = 0.0;
  double sigma_on_rho_kernel = 0.0, rho_on_sigma_kernel = 0.0;
  for (Eigen::Index i = 0; i < sp.rho.values.size(); ++i) {
    const double p = sp.rho.values[i];
    for (Eigen::Index j = 0; j < sp.sigma.values.size(); ++j) {
      const double q = sp.sigma.values[j];
      const double w = sp.overlap(i, j);
      if (w <= 0.0) continue;
      if (p <= sp.cut_rho && q > sp.cut_sigma) {
        sigma_on_rho_kernel += w * q;
      } else if (p > sp.cut_rho && q <= sp.cut_sigma) {
        rho_on_sigma_kernel += w * p;
      } else if (p > sp.cut_rho && q > sp.cut_sigma) {
        const double y = f(p / q);
        if (std::isnan(y)) throw DomainError("f is NaN at ratio " + std::to_string(p / q));
        acc += w * q * y;
      }
    }
  }
  if (sigma_on_rho_kernel >= kWeightDrop) acc += f_at_zero * sigma_on_rho_kernel;
  if (rho_on_sigma_kernel >= kWeightDrop) acc += f_prime_at_inf * rho_on_sigma_kernel;
  return {acc, Method::exact_spectral, std::nullopt};
}

Matrix relative_modular_apply(const DensityMatrix& rho, const DensityMatrix& sigma,
                              const Matrix& X) {
  Matrix pinv_sigma =
      matrix_function(sigma.mat, [](double x) { return x > 0 ? 1.0 / x : 0.0; }, 0.0);
  return rho.mat * X * pinv_sigma;
}

DivergenceResult max_relative(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (!support_contained(rho, sigma)) return {kInf, Method::exact_spectral, std::nullopt};
  WhitenedSpectrum ws = whitened_spectrum(rho, sigma);
  double best = -kInf;
  for (double l : ws.log2_values) best = std::max(best, l);
  return {best, Method::exact_spectral, std::nullopt};
}

DivergenceResult geometric_renyi(double alpha, const DensityMatrix& rho,
                                 const DensityMatrix& sigma) {
  if (alpha == 1.0 || alpha < 0.0 || alpha > 2.0)
    throw DomainError("alpha must lie in [0,1) or (1,2]");
  if (alpha > 1.0 && !support_contained(rho, sigma))
    return {kInf, Method::exact_spectral, std::nullopt};
  WhitenedSpectrum ws = whitened_spectrum(rho, sigma);
  std::vector<double> terms;
  for (size_t j = 0; j < ws.log2_values.size(); ++j) {
    if (ws.sigma_weight[j] <= 0.0) continue;
    terms.push_back(std::log2(ws.sigma_weight[j]) + alpha * ws.log2_values[j]);
  }
  const double log2_trace = log2_sum_exp(terms);
  return {log2_trace / (alpha - 1.0), Method::exact_spectral, std::nullopt};
}

double geometric_renyi_regularized(double alpha, const DensityMatrix& rho,
                                   const DensityMatrix& sigma, double eps_reg) {
  Matrix mix = rho.mat + sigma.mat;
  DensityMatrix rho_e = DensityMatrix::wrap(rho.mat + eps_reg * mix, rho.dims, false);
  DensityMatrix sigma_e = DensityMatrix::wrap(sigma.mat + eps_reg * mix, sigma.dims, false);
  return geometric_renyi(alpha, rho_e, sigma_e).value;
}

// ---------------------------------------------------------------------------
// Hypothesis testing
// ---------------------------------------------------------------------------

namespace {

struct NpPrimal {
  Matrix test;
  double beta = 0.0;
  double type1_acceptance = 0.0;  // Tr[F rho]
};

// Tr[rho {rho - t sigma > 0}]
double acceptance_above(const Matrix& rho, const Matrix& sigma, double t) {
  EigSystem es = eig_hermitian(Matrix(rho - t * sigma));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    if (es.values[i] > 0.0)
      acc += (es.vectors.col(i).adjoint() * rho * es.vectors.col(i))(0, 0).real();
  }
  return acc;
}

NpPrimal np_primal_at(const Matrix& rho, const Matrix& sigma, double t, double band,
                      double target) {
  EigSystem es = eig_hermitian(Matrix(rho - t * sigma));
  const Eigen::Index d = es.values.size();
  double a_plus = 0.0, a_zero = 0.0, b_plus = 0.0, b_zero = 0.0;
  Matrix p_plus = Matrix::Zero(d, d), p_zero = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double ra = (es.vectors.col(i).adjoint() * rho * es.vectors.col(i))(0, 0).real();
    const double sa = (es.vectors.col(i).adjoint() * sigma * es.vectors.col(i))(0, 0).real();
    Matrix proj = es.vectors.col(i) * es.vectors.col(i).adjoint();
    if (es.values[i] > band) {
      a_plus += ra;
      b_plus += sa;
      p_plus += proj;
    } else if (es.values[i] >= -band) {
      a_zero += ra;
      b_zero += sa;
      p_zero += proj;
    }
  }
  double x = 0.0;
  if (a_zero > 1e-18) x = std::clamp((target - a_plus) / a_zero, 0.0, 1.0);
  NpPrimal out;
  out.test = p_plus + x * p_zero;
  out.beta = std::max(0.0, b_plus + x * b_zero);
  out.type1_acceptance = a_plus + x * a_zero;
  return out;
}

// Concave dual objective g(t) = t(1-eps) - Tr[(t rho - sigma)_+].
double np_dual_value(const Matrix& rho, const Matrix& sigma, double t, double target) {
  EigSystem es = eig_hermitian(Matrix(t * rho - sigma));
  double excess = 0.0;
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    if (es.values[i] > 0.0) excess += es.values[i];
  return t * target - excess;
}

template <typename F>
std::pair<double, double> golden_max(F&& g, double lo, double hi, int iters) {
  const double phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double g1 = g(x1), g2 = g(x2);
  for (int it = 0; it < iters && (b - a) > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
    if (g1 < g2) {
      a = x1;
      x1 = x2;
      g1 = g2;
      x2 = a + phi * (b - a);
      g2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      g2 = g1;
      x1 = b - phi * (b - a);
      g1 = g(x1);
    }
  }
  const double xm = 0.5 * (a + b);
  return {xm, g(xm)};
}

bool numerically_diagonal(const Matrix& m) {
  double off = 0.0, diag = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double a = std::abs(m(i, j));
      if (i == j)
        diag = std::max(diag, a);
      else
        off = std::max(off, a);
    }
  return off <= 1e-14 * std::max(diag, 1e-300);
}

HypothesisTest np_classical(double eps, const DensityMatrix& rho, const DensityMatrix& sigma) {
  const Eigen::Index d = rho.mat.rows();
  std::vector<double> p(d), q(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    p[i] = std::max(0.0, rho.mat(i, i).real());
    q[i] = std::max(0.0, sigma.mat(i, i).real());
  }
  std::vector<int> order(d);
  for (Eigen::Index i = 0; i < d; ++i) order[i] = static_cast<int>(i);
  auto ratio = [&](int i) {
    if (q[i] > 0.0) return p[i] / q[i];
    return p[i] > 0.0 ? kInf : 0.0;
  };
  std::sort(order.begin(), order.end(), [&](int a, int b) { return ratio(a) > ratio(b); });

  const double target = 1.0 - eps;
  double acc_p = 0.0, beta = 0.0;
  RVector test = RVector::Zero(d);
  double marginal_ratio = 0.0;
  for (int i : order) {
    if (acc_p >= target) break;
    marginal_ratio = ratio(i);
    if (p[i] <= 0.0) {
      // zero-rho outcomes cost type-II error for nothing
      continue;
    }
    const double take = std::min(1.0, (target - acc_p) / p[i]);
    acc_p += take * p[i];
    beta += take * q[i];
    test[i] = take;
    if (take < 1.0) break;
  }
  const double t_dual_seed =
      (std::isfinite(marginal_ratio) && marginal_ratio > 0.0) ? 1.0 / marginal_ratio : 0.0;
  auto g = [&](double t) {
    double excess = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) excess += std::max(0.0, t * p[i] - q[i]);
    return t * target - excess;
  };
  double beta_dual = std::max(0.0, g(t_dual_seed));
  // polish around the seed; g is piecewise affine with its max at a kink
  auto polished = golden_max(g, std::max(0.0, t_dual_seed * 0.5),
                             t_dual_seed > 0 ? t_dual_seed * 2.0 : 1.0, 200);
  double t_star = t_dual_seed;
  if (polished.second > beta_dual) {
    beta_dual = polished.second;
    t_star = polished.first;
  }

  HypothesisTest out;
  out.beta_primal = beta;
  out.beta_dual = std::min(beta_dual, beta);
  out.threshold = t_star;
  out.test_operator = Matrix(test.cast<Complex>().asDiagonal());
  const double value = beta > 0.0 ? -std::log2(beta) : kInf;
  const double upper = out.beta_dual > 0.0 ? -std::log2(out.beta_dual) : kInf;
  out.result = {value, Method::exact_primal_dual, std::make_pair(value, upper)};
  return out;
}

}  // namespace

HypothesisTest hypothesis_testing(double eps, const DensityMatrix& rho,
                                  const DensityMatrix& sigma) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1)");
  if (rho.dim() != sigma.dim()) throw DimensionMismatch("state dimensions differ");
  const double target = 1.0 - eps;

  if (numerically_diagonal(rho.mat) && numerically_diagonal(sigma.mat))
    return np_classical(eps, rho, sigma);

  // If enough of rho lives outside supp(sigma), a free test reaches beta = 0.
  Matrix comp = Matrix::Identity(sigma.dim(), sigma.dim()) - support_projector(sigma.mat);
  const double outside_mass = (comp * rho.mat).trace().real();
  if (outside_mass >= target) {
    HypothesisTest out;
    out.test_operator = comp;
    out.beta_primal = 0.0;
    out.beta_dual = 0.0;
    out.threshold = kInf;
    out.result = {kInf, Method::exact_primal_dual, std::make_pair(kInf, kInf)};
    return out;
  }

  // Primal: bisect the Neyman-Pearson threshold.
  double t_lo = 0.0, t_hi = 1.0;
  while (acceptance_above(rho.mat, sigma.mat, t_hi) >= target) {
    t_hi *= 2.0;
    if (t_hi > 1e300) throw NumericalGap("primal threshold diverged");
  }
  for (int it = 0; it < 90 && (t_hi - t_lo) > 1e-15 * std::max(1.0, t_hi); ++it) {
    const double mid = 0.5 * (t_lo + t_hi);
    if (acceptance_above(rho.mat, sigma.mat, mid) >= target)
      t_lo = mid;
    else
      t_hi = mid;
  }
  const double sigma_norm = sigma.mat.cwiseAbs().maxCoeff();
  NpPrimal primal;
  double band = std::max((t_hi - t_lo) * sigma_norm * 4.0,
                         1e-13 * (rho.mat.cwiseAbs().maxCoeff() + t_hi * sigma_norm));
  for (int widen = 0; widen < 6; ++widen) {
    primal = np_primal_at(rho.mat, sigma.mat, t_hi, band, target);
    if (primal.type1_acceptance >= target - 1e-11) break;
    band *= 16.0;
  }

  // Dual: golden-section on the concave certificate.
  auto g = [&](double t) { return np_dual_value(rho.mat, sigma.mat, t, target); };
  double span = 1.0;
  while (g(span) >= g(0.5 * span) && span < 1e300) span *= 2.0;
  auto dual = golden_max(g, 0.0, span, 200);
  const double beta_dual = std::max(0.0, std::min(dual.second, primal.beta));

  HypothesisTest out;
  out.test_operator = primal.test;
  out.beta_primal = primal.beta;
  out.beta_dual = beta_dual;
  out.threshold = dual.first;
  const double value = primal.beta > 0.0 ? -std::log2(primal.beta) : kInf;
  const double upper = beta_dual > 0.0 ? -std::log2(beta_dual) : kInf;
  out.result = {value, Method::exact_primal_dual, std::make_pair(value, upper)};
  const double gap_bits =
      (std::isfinite(value) && std::isfinite(upper)) ? upper - value : 0.0;
  if (gap_bits > 1e-6)
    throw NumericalGap("primal-dual gap " + std::to_string(gap_bits) + " bits");
  return out;
}

// ---------------------------------------------------------------------------
// Smoothed max-relative entropy bracket
// ---------------------------------------------------------------------------

namespace {

double trace_excess(const Matrix& rho, const Matrix& sigma, double lambda) {
  EigSystem es = eig_hermitian(Matrix(rho - std::exp2(lambda) * sigma));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    if (es.values[i] > 0.0) acc += es.values[i];
  return acc;
}

}  // namespace

SmoothingPoint smoothing_upper_at_lambda(double lambda, const DensityMatrix& rho,
                                         const DensityMatrix& sigma) {
  Matrix cap = std::exp2(lambda) * sigma.mat;            // Lambda
  Matrix excess = positive_part(Matrix(rho.mat - cap));  // Sigma
  const double tr_excess = excess.trace().real();
  Matrix g = sqrt_psd(cap) * pinv_sqrt(Matrix(cap + excess));
  Matrix smoothed = g * rho.mat * g.adjoint();
  const double norm = smoothed.trace().real();
  if (norm <= 1e-300) throw ZeroAcceptance("smoothing projected away the whole state");
  smoothed /= norm;
  DensityMatrix tilde = DensityMatrix::make(std::move(smoothed), rho.dims, true);
  SmoothingPoint pt;
  pt.tr_excess = tr_excess;
  pt.upper = lambda - std::log2(1.0 - tr_excess);
  pt.witness.sine_distance_to_original = sine_distance(rho, tilde);
  pt.witness.dmax_to_sigma = max_relative(tilde, sigma).value;
  pt.witness.smoothed_state = std::move(tilde);
  return pt;
}

double smoothed_max_lower_bound(double eps, const DensityMatrix& rho,
                                const DensityMatrix& sigma) {
  double best = -kInf;
  for (double alpha : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
    const double da = petz_renyi(alpha, rho, sigma).value;
    if (!std::isfinite(da)) continue;
    best = std::max(best, da + 2.0 / (alpha - 1.0) * std::log2(1.0 / (1.0 - eps)));
  }
  return best;
}

SmoothedMaxBracket smoothed_max_bracket(double eps, const DensityMatrix& rho,
                                        const DensityMatrix& sigma) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1)");
  const double eps2 = eps * eps;

  // Mass of rho outside supp(sigma) bounds how much smoothing can repair.
  Matrix comp = Matrix::Identity(sigma.dim(), sigma.dim()) - support_projector(sigma.mat);
  const double outside = (comp * rho.mat * comp).trace().real();
  SmoothedMaxBracket out;
  if (outside >= eps2 * (1.0 - 1e-9)) {
    out.result = {kInf, Method::constructive_bound, std::nullopt};
    return out;
  }

  double lambda_hi;
  const double dmax = max_relative(rho, sigma).value;
  if (std::isfinite(dmax)) {
    lambda_hi = dmax;
  } else {
    lambda_hi = 1.0;
    while (trace_excess(rho.mat, sigma.mat, lambda_hi) > eps2) lambda_hi *= 2.0;
  }
  double lambda_lo = lambda_hi - 1.0, step = 1.0;
  while (trace_excess(rho.mat, sigma.mat, lambda_lo) < eps2) {
    step *= 2.0;
    lambda_lo -= step;
    if (lambda_lo < -4096.0) break;  // rho itself is that far below sigma
  }
  for (int it = 0; it < 80 && (lambda_hi - lambda_lo) > 1e-12; ++it) {
    const double mid = 0.5 * (lambda_lo + lambda_hi);
    if (trace_excess(rho.mat, sigma.mat, mid) > eps2)
      lambda_lo = mid;
    else
      lambda_hi = mid;
  }

  SmoothingPoint pt = smoothing_upper_at_lambda(lambda_hi, rho, sigma);
  const double lower = smoothed_max_lower_bound(eps, rho, sigma);
  if (lower > pt.upper + 1e-9)
    throw BracketInverted("lower " + std::to_string(lower) + " above upper " +
                          std::to_string(pt.upper));
  out.result = {pt.upper, Method::constructive_bound, std::make_pair(lower, pt.upper)};
  out.witness = pt.witness;
  out.lambda_lo = lambda_lo;
  out.lambda_hi = lambda_hi;
  out.tr_excess = pt.tr_excess;
  return out;
}

double dh_from_dmax_bound(double eps, const DensityMatrix& rho, const DensityMatrix& sigma) {
  const double e2 = eps * eps;
  return hypothesis_testing(1.0 - e2, rho, sigma).result.value - std::log2(1.0 - e2);
}

double dmax_from_renyi_bound(double eps, double alpha, const DensityMatrix& rho,
                             const DensityMatrix& sigma) {
  if (!(alpha > 1.0)) throw DomainError("alpha must exceed 1");
  const double da = petz_renyi(alpha, rho, sigma).value;
  return da + 2.0 / (alpha - 1.0) * std::log2(1.0 / eps) + std::log2(1.0 / (1.0 - eps * eps));
}

// ---------------------------------------------------------------------------
// Continuity, AEP, concavity
// ---------------------------------------------------------------------------

double c_gamma(double gamma, const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in (0,1]");
  const double d_up = petz_renyi(1.0 + gamma, rho, sigma).value;
  if (!std::isfinite(d_up)) throw InfiniteRenyi("D_{1+gamma} is infinite");
  const double d_dn = petz_renyi(1.0 - gamma, rho, sigma).value;
  return std::log2(std::exp2(gamma * d_up) + std::exp2(-gamma * d_dn) + 1.0) / gamma;
}

ContinuitySlack petz_continuity_check(double delta, double gamma, const DensityMatrix& rho,
                                      const DensityMatrix& sigma) {
  if (!(delta > 0.0)) throw PreconditionViolated("delta must be positive");
  const double c = c_gamma(gamma, rho, sigma);
  const double d = umegaki(rho, sigma).value;
  if (!std::isfinite(d)) throw InfiniteRenyi("relative entropy is infinite");
  ContinuitySlack out;
  if (delta <= gamma / 2.0) {
    const double d_up = petz_renyi(1.0 + delta, rho, sigma).value;
    out.upper = d + delta * c * c - d_up;
  }
  if (delta <= std::log2(3.0) / (2.0 * c)) {
    const double d_dn = petz_renyi(1.0 - delta, rho, sigma).value;
    out.lower = d_dn - d + delta * c * c;
  }
  if (!out.upper && !out.lower)
    throw PreconditionViolated("delta satisfies neither continuity regime");
  return out;
}

std::pair<double, double> aep_bounds(int n, double eps, double gamma, const DensityMatrix& rho,
                                     const DensityMatrix& sigma) {
  if (n < 1 || !(eps > 0.0 && eps <= 1.0)) throw DomainError("n >= 1 and eps in (0,1] required");
  const double d = umegaki(rho, sigma).value;
  const double c = c_gamma(gamma, rho, sigma);
  const double root = std::sqrt(static_cast<double>(n));
  const double lower = d - 4.0 * c / root * std::log2(2.0 / (1.0 - eps));
  const double upper = d + 4.0 * c / root * std::log2(2.0 / eps) +
                       std::log2(1.0 / (1.0 - eps * eps)) / n;
  return {lower, upper};
}

double binary_entropy(double eps) {
  if (eps <= 0.0 || eps >= 1.0) return 0.0;
  return -eps * std::log2(eps) - (1.0 - eps) * std::log2(1.0 - eps);
}

double dh_upper_via_umegaki(double eps, const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1)");
  return (umegaki(rho, sigma).value + binary_entropy(eps)) / (1.0 - eps);
}

double almost_concavity_check(const std::vector<double>& weights,
                              const std::vector<DensityMatrix>& rhos,
                              const DensityMatrix& sigma) {
  if (weights.size() != rhos.size() || rhos.empty())
    throw DimensionMismatch("weights and states must pair up");
  Matrix mix = Matrix::Zero(sigma.dim(), sigma.dim());
  double shannon = 0.0, avg = 0.0, wsum = 0.0;
  for (size_t i = 0; i < rhos.size(); ++i) {
    mix += weights[i] * rhos[i].mat;
    if (weights[i] > 0.0) shannon -= weights[i] * std::log2(weights[i]);
    const double di = umegaki(rhos[i], sigma).value;
    if (!std::isfinite(di)) throw InfiniteRenyi("component relative entropy is infinite");
    avg += weights[i] * di;
    wsum += weights[i];
  }
  if (std::abs(wsum - 1.0) > 1e-10) throw DomainError("weights must sum to one");
  DensityMatrix mixed = DensityMatrix::make(std::move(mix), sigma.dims, true);
  return umegaki(mixed, sigma).value + shannon - avg;
}

}  // namespace qdiv
