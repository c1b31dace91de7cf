#include "qdiv/tail_examples.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qdiv {

namespace {

constexpr double kLn2 = 0.6931471805599453;

double lse2(double a, double b) {
  if (!std::isfinite(a)) return b;
  if (!std::isfinite(b)) return a;
  const double m = std::max(a, b);
  return m + std::log2(std::exp2(a - m) + std::exp2(b - m));
}

// log2(2^u - 2^v) for u >= v; -inf when the difference vanishes.
double log2_sub(double u, double v) {
  if (!std::isfinite(v)) return u;
  const double r = v - u;
  if (r >= 0.0) return -kInf;
  const double d = 1.0 - std::exp2(r);
  return d > 0.0 ? u + std::log2(d) : -kInf;
}

// sign-aware x * y where x = 2^lx and y may be huge; stable when 2^lx itself
// underflows but the product does not.
double scaled_product(double lx, double y) {
  if (y == 0.0 || !std::isfinite(lx)) return 0.0;
  const double s = y > 0 ? 1.0 : -1.0;
  return s * std::exp2(lx + std::log2(std::abs(y)));
}

struct BlockLogs {
  double la0, la1, lb0, lb1;  // log2 weights: a-diagonal and b-diagonal entries

  double spread() const {
    const double hi = std::max(std::max(la0, la1), std::max(lb0, lb1));
    const double lo = std::min(std::min(la0, la1), std::min(lb0, lb1));
    return hi - lo;
  }
};

// Both states of an interleaved pair are block-diagonal over the index pairs:
// rho block = diag(a0, a1), sigma block = b0 |+><+| + b1 |-><-|. Every kind
// below is evaluated in closed form from the logarithms.

// Eigenvalues of A = sigma^{-1/2} rho sigma^{-1/2} via trace and determinant.
struct WhitenedBlock {
  double log2_lmax, log2_lmin;
};

WhitenedBlock whitened_block(const BlockLogs& b) {
  const double lT = lse2(b.la0, b.la1) + lse2(-b.lb0, -b.lb1) - 1.0;
  const double lD = b.la0 + b.la1 - b.lb0 - b.lb1;
  const double x = std::min(1.0, std::exp2(lD + 2.0 - 2.0 * lT));  // 4 det / tr^2
  const double log2_lmax = lT + std::log2(0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - x))));
  return {log2_lmax, lD - log2_lmax};
}

double umegaki_block(const BlockLogs& b) {
  // sum_i a_i (la_i - mean(lb)) + (Tr sigma_b - Tr rho_b)/ln2, exact because
  // the a-basis overlaps with both sigma eigenvectors are 1/2.
  const double mean_lb = 0.5 * (b.lb0 + b.lb1);
  double acc = scaled_product(b.la0, b.la0 - mean_lb) + scaled_product(b.la1, b.la1 - mean_lb);
  acc += (std::exp2(b.lb0) + std::exp2(b.lb1) - std::exp2(b.la0) - std::exp2(b.la1)) / kLn2;
  return acc;
}

double petz_block_log2T(const BlockLogs& b, double alpha) {
  double acc = -kInf;
  for (double la : {b.la0, b.la1})
    for (double lb : {b.lb0, b.lb1})
      acc = lse2(acc, -1.0 + alpha * la + (1.0 - alpha) * lb);
  return acc;
}

double geometric_block_log2S(const BlockLogs& b, double alpha) {
  WhitenedBlock w = whitened_block(b);
  const double lSa = lse2(b.la0, b.la1), lSb = lse2(b.lb0, b.lb1);
  if (w.log2_lmax - w.log2_lmin < 1e-9)  // degenerate: A is a multiple of the identity
    return alpha * w.log2_lmax + lSb;
  const double denom = log2_sub(w.log2_lmax, w.log2_lmin);
  const double plus = alpha * w.log2_lmax + log2_sub(lSa, w.log2_lmin + lSb) - denom;
  const double minus = alpha * w.log2_lmin + log2_sub(w.log2_lmax + lSb, lSa) - denom;
  return lse2(plus, minus);
}

// --- channel-mode blocks: mixture (1-l) sigma + l rho against sigma ---

double mixture_dmax_block_log2(const BlockLogs& b, double lambda) {
  WhitenedBlock w = whitened_block(b);
  return lse2(std::log2(1.0 - lambda), std::log2(lambda) + w.log2_lmax);
}

// 2x2 dense evaluation after shifting all four weights; valid when the block
// spread fits comfortably in double range.
double mixture_umegaki_block_dense(const BlockLogs& b, double lambda) {
  const double s = std::max(std::max(b.la0, b.la1), std::max(b.lb0, b.lb1));
  const double a0 = std::exp2(b.la0 - s), a1 = std::exp2(b.la1 - s);
  const double b0 = std::exp2(b.lb0 - s), b1 = std::exp2(b.lb1 - s);
  Eigen::Matrix2d sigma;
  sigma << 0.5 * (b0 + b1), 0.5 * (b0 - b1), 0.5 * (b0 - b1), 0.5 * (b0 + b1);
  Eigen::Matrix2d rho = Eigen::Vector2d(a0, a1).asDiagonal();
  Eigen::Matrix2d mix = lambda * rho + (1.0 - lambda) * sigma;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> em(mix), es(sigma);
  double acc = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double m = em.eigenvalues()[i];
    if (m > 0.0) acc += m * std::log(m);
    acc -= m;
  }
  for (int j = 0; j < 2; ++j) {
    const double q = es.eigenvalues()[j];
    if (q <= 0.0) continue;
    const double wgt =
        (es.eigenvectors().col(j).transpose() * mix * es.eigenvectors().col(j))(0, 0);
    acc += wgt * (-std::log(q)) + q;
  }
  // contribution scales linearly under the joint shift
  return scaled_product(s, acc / kLn2);
}

double mixture_umegaki_block(const BlockLogs& b, double lambda) {
  if (b.spread() <= 40.0) return mixture_umegaki_block_dense(b, lambda);
  // Extreme blocks: sigma is spectrally negligible inside the mixture, so the
  // mixture eigensystem is lambda * rho to double precision, while log sigma
  // keeps its huge separation.
  const double llam = std::log2(lambda);
  double acc = scaled_product(llam + b.la0, llam + b.la0) +
               scaled_product(llam + b.la1, llam + b.la1);  // Tr[mix log2 mix]
  const double lhalf_sa = llam + lse2(b.la0, b.la1) - 1.0;  // lambda * Sa / 2
  acc -= scaled_product(lhalf_sa, b.lb0) + scaled_product(lhalf_sa, b.lb1);
  // Lindblad terms: Tr sigma - Tr mix = (1-lambda) Tr sigma - ... with the
  // sigma weights underflowing harmlessly.
  const double tr_sigma = std::exp2(b.lb0) + std::exp2(b.lb1);
  const double tr_mix = lambda * (std::exp2(b.la0) + std::exp2(b.la1)) + (1.0 - lambda) * tr_sigma;
  acc /= 1.0;  // already in bits
  acc += (tr_sigma - tr_mix) / kLn2;
  return acc;
}

double mixture_petz_block_log2T(const BlockLogs& b, double alpha, double lambda) {
  if (b.spread() <= 40.0) {
    const double s = std::max(std::max(b.la0, b.la1), std::max(b.lb0, b.lb1));
    const double a0 = std::exp2(b.la0 - s), a1 = std::exp2(b.la1 - s);
    const double b0 = std::exp2(b.lb0 - s), b1 = std::exp2(b.lb1 - s);
    Eigen::Matrix2d sigma;
    sigma << 0.5 * (b0 + b1), 0.5 * (b0 - b1), 0.5 * (b0 - b1), 0.5 * (b0 + b1);
    Eigen::Matrix2d rho = Eigen::Vector2d(a0, a1).asDiagonal();
    Eigen::Matrix2d mix = lambda * rho + (1.0 - lambda) * sigma;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> em(mix), es(sigma);
    double t = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double p = std::max(0.0, em.eigenvalues()[i]);
        const double q = std::max(0.0, es.eigenvalues()[j]);
        if (p <= 0.0 || q <= 0.0) continue;
        const double wgt = std::norm(em.eigenvectors().col(i).dot(es.eigenvectors().col(j)));
        t += wgt * std::pow(p, alpha) * std::pow(q, 1.0 - alpha);
      }
    return s + std::log2(t);  // T scales as 2^{s(alpha + 1 - alpha)}
  }
  return alpha * std::log2(lambda) + petz_block_log2T(b, alpha);
}

}  // namespace

ClassicalSequence make_sequence(SequenceRule rule, int N, bool normalize) {
  if (N < 1) throw DomainError("truncation must be at least 1");
  ClassicalSequence seq;
  seq.rule = rule;
  seq.truncation = N;
  seq.values.resize(N);
  for (int n = 1; n <= N; ++n) {
    const double p = std::exp2(-double(n)) / (double(n) * n);
    double v = p;
    if (rule == SequenceRule::q) v = p / n;
    if (rule == SequenceRule::r) v = p * std::exp2(-std::exp2(double(n)));
    seq.values[n - 1] = v;
    if (v == 0.0 && seq.underflow_index < 0) seq.underflow_index = n;
  }
  if (normalize) {
    double total = 0.0;
    for (double v : seq.values) total += v;
    for (double& v : seq.values) v /= total;
    seq.normalized = true;
  }
  return seq;
}

double sequence_log2_entry(SequenceRule rule, int n) {
  const double lp = -double(n) - 2.0 * std::log2(double(n));
  switch (rule) {
    case SequenceRule::p: return lp;
    case SequenceRule::q: return lp - std::log2(double(n));
    case SequenceRule::r: return lp - std::exp2(double(n));
  }
  throw DomainError("unknown sequence rule");
}

double classical_divergence(ClassicalKind kind, double alpha, const std::vector<double>& u,
                            const std::vector<double>& v, bool unnormalized_convention) {
  if (u.size() != v.size()) throw DimensionMismatch("vector lengths differ");
  switch (kind) {
    case ClassicalKind::kl: {
      double acc = 0.0;
      for (size_t i = 0; i < u.size(); ++i) {
        if (u[i] > 0.0) {
          if (v[i] <= 0.0) return kInf;
          acc += u[i] * std::log2(u[i] / v[i]);
        }
        if (unnormalized_convention) acc += (v[i] - u[i]) / kLn2;
      }
      return acc;
    }
    case ClassicalKind::renyi: {
      double acc = -kInf;
      for (size_t i = 0; i < u.size(); ++i) {
        if (u[i] <= 0.0) continue;
        if (v[i] <= 0.0) {
          if (alpha > 1.0) return kInf;
          continue;
        }
        acc = lse2(acc, alpha * std::log2(u[i]) + (1.0 - alpha) * std::log2(v[i]));
      }
      return acc / (alpha - 1.0);
    }
    case ClassicalKind::dmax: {
      double best = -kInf;
      for (size_t i = 0; i < u.size(); ++i) {
        if (u[i] <= 0.0) continue;
        if (v[i] <= 0.0) return kInf;
        best = std::max(best, std::log2(u[i]) - std::log2(v[i]));
      }
      return best;
    }
  }
  throw DomainError("unknown classical kind");
}

RMatrix basis_b(int dim) {
  if (dim % 2 != 0) throw OddDimension("interleaved basis needs an even dimension");
  RMatrix b = RMatrix::Zero(dim, dim);
  const double r = 1.0 / std::sqrt(2.0);
  for (int k = 0; 2 * k + 1 < dim; ++k) {
    b(2 * k, 2 * k) = r;
    b(2 * k + 1, 2 * k) = r;
    b(2 * k, 2 * k + 1) = r;
    b(2 * k + 1, 2 * k + 1) = -r;
  }
  return b;
}

std::pair<DensityMatrix, DensityMatrix> rho_sigma_pair(const std::vector<double>& dist_a,
                                                       const std::vector<double>& dist_b,
                                                       int N) {
  if (N % 2 != 0) throw OddDimension("truncation must be even");
  if (static_cast<int>(dist_a.size()) < N || static_cast<int>(dist_b.size()) < N)
    throw DimensionMismatch("distributions shorter than the truncation");
  Matrix rho = Matrix::Zero(N, N);
  RMatrix b = basis_b(N);
  RMatrix sigma_r = RMatrix::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    rho(i, i) = dist_a[i];
    sigma_r += dist_b[i] * (b.col(i) * b.col(i).transpose());
  }
  return {DensityMatrix::wrap(std::move(rho), {N}, false),
          DensityMatrix::wrap(sigma_r.cast<Complex>(), {N}, false)};
}

std::pair<std::vector<double>, std::vector<double>> q_up_down(const std::vector<double>& q) {
  if (q.size() % 2 != 0) throw OddLength("blockwise variants need an even length");
  std::vector<double> up(q.size()), down(q.size());
  for (size_t k = 0; 2 * k + 1 < q.size(); ++k) {
    const double hi = std::max(q[2 * k], q[2 * k + 1]);
    const double lo = std::min(q[2 * k], q[2 * k + 1]);
    up[2 * k] = up[2 * k + 1] = hi;
    down[2 * k] = down[2 * k + 1] = lo;
  }
  return {std::move(up), std::move(down)};
}

namespace {

// Streaming accumulator over blocks, supporting checkpoints at arbitrary
// truncations without re-scanning.
struct BlockAccumulator {
  const DivergenceSpec& kind;
  bool channel_mode;
  double lambda;

  double linear = 0.0;   // umegaki
  double log_acc = -kInf;  // petz / geometric trace
  double max_acc = -kInf;  // dmax
  int blocks_consumed = 0;

  void consume(const BlockLogs& b) {
    const bool corner_skip =
        channel_mode && kind.kind == DivergenceSpec::Kind::geometric && blocks_consumed == 0;
    if (!corner_skip) {
      switch (kind.kind) {
        case DivergenceSpec::Kind::umegaki:
          linear += channel_mode ? mixture_umegaki_block(b, lambda) : umegaki_block(b);
          break;
        case DivergenceSpec::Kind::petz:
          log_acc = lse2(log_acc, channel_mode
                                      ? mixture_petz_block_log2T(b, kind.alpha, lambda)
                                      : petz_block_log2T(b, kind.alpha));
          break;
        case DivergenceSpec::Kind::geometric:
          log_acc = lse2(log_acc, geometric_block_log2S(b, kind.alpha));
          break;
        case DivergenceSpec::Kind::dmax:
          max_acc = std::max(max_acc, channel_mode ? mixture_dmax_block_log2(b, lambda)
                                                   : whitened_block(b).log2_lmax);
          break;
        default:
          throw DomainError("diagnostic does not support this divergence kind");
      }
    }
    ++blocks_consumed;
  }

  double value() const {
    switch (kind.kind) {
      case DivergenceSpec::Kind::umegaki:
        return linear;
      case DivergenceSpec::Kind::petz:
        return log_acc / (kind.alpha - 1.0);
      case DivergenceSpec::Kind::geometric: {
        double l = log_acc;
        if (channel_mode) l += std::log2(lambda);  // corner states carry a lambda factor
        return l / (kind.alpha - 1.0);
      }
      case DivergenceSpec::Kind::dmax:
        return max_acc;
      default:
        return 0.0;
    }
  }
};

}  // namespace

double interleaved_divergence(const DivergenceSpec& kind, const std::vector<double>& log2_a,
                              const std::vector<double>& log2_b) {
  if (log2_a.size() != log2_b.size() || log2_a.size() % 2 != 0)
    throw OddLength("interleaved weights must pair up");
  DivergenceSpec k = kind;
  BlockAccumulator acc{k, false, 0.0};
  for (size_t blk = 0; 2 * blk + 1 < log2_a.size(); ++blk)
    acc.consume({log2_a[2 * blk], log2_a[2 * blk + 1], log2_b[2 * blk], log2_b[2 * blk + 1]});
  return acc.value();
}

GrowthDiagnosis finiteness_diagnostic(TailPair pair, const DivergenceSpec& kind,
                                      const std::vector<int>& grid, bool channel_mode,
                                      double lambda) {
  if (grid.empty()) throw DomainError("empty grid");
  for (size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] % 2 != 0) throw OddDimension("grid truncations must be even");
    if (i > 0 && grid[i] <= grid[i - 1]) throw DomainError("grid must increase");
  }
  if (channel_mode && !(lambda > 0.0 && lambda <= 1.0))
    throw DomainError("channel mode needs lambda in (0,1]");
  const SequenceRule second = pair == TailPair::pq ? SequenceRule::q : SequenceRule::r;

  auto block_at = [&](int blk) {
    const int n0 = 2 * blk + 1;
    return BlockLogs{sequence_log2_entry(SequenceRule::p, n0),
                     sequence_log2_entry(SequenceRule::p, n0 + 1),
                     sequence_log2_entry(second, n0), sequence_log2_entry(second, n0 + 1)};
  };

  GrowthDiagnosis diag;
  diag.kind = kind;
  diag.grid = grid;

  BlockAccumulator acc{diag.kind, channel_mode, lambda};
  size_t next_grid = 0;
  for (int blk = 0; next_grid < grid.size(); ++blk) {
    while (next_grid < grid.size() && grid[next_grid] == 2 * blk) {
      diag.values.push_back(acc.value());
      ++next_grid;
    }
    acc.consume(block_at(blk));
  }
  // flush checkpoints that coincide with the final consumed block
  while (next_grid < grid.size()) {
    diag.values.push_back(acc.value());
    ++next_grid;
  }

  // Classification evidence: extend the partial sums on a dyadic grid far
  // beyond the requested truncations (the blockwise forms stay stable in the
  // log domain, so no underflow artifacts appear).
  BlockAccumulator ext{diag.kind, channel_mode, lambda};
  int consumed = 0;
  bool have_prev = false;
  double prev = 0.0, last = 0.0;
  std::vector<double> deltas;
  bool decided = false;
  const int cap = 1 << 22;
  for (int target = std::max(grid.back(), 4); target <= cap && !decided; target *= 2) {
    for (; consumed < target / 2; ++consumed) ext.consume(block_at(consumed));
    prev = last;
    last = ext.value();
    if (!std::isfinite(last) || last > 1e9) {
      diag.classification = Growth::diverging;
      decided = true;
    } else if (have_prev) {
      deltas.push_back(std::abs(last - prev));
      if (deltas.back() <= 1e-6) {
        diag.classification = Growth::converged;
        decided = true;
      } else if (deltas.size() >= 3 && deltas[deltas.size() - 1] >= 1e-3 &&
                 deltas[deltas.size() - 2] >= 1e-3 && deltas[deltas.size() - 3] >= 1e-3 &&
                 last > prev) {
        diag.classification = Growth::diverging;
        decided = true;
      }
    }
    have_prev = true;
    diag.extended_to = 2 * consumed;
    diag.tail_delta = deltas.empty() ? 0.0 : deltas.back();
  }
  if (!decided) {
    diag.classification =
        (deltas.size() >= 2 && deltas.back() < deltas[deltas.size() - 2]) ? Growth::converged
                                                                          : Growth::diverging;
    diag.note += "classification undecided at cap; trend-based; ";
  }

  // Last-window slopes on the requested grid.
  if (grid.size() >= 2) {
    const size_t i1 = grid.size() - 1, i0 = grid.size() >= 3 ? grid.size() - 3 : 0;
    const double dv = diag.values[i1] - diag.values[i0];
    diag.slope_log_n = dv / (std::log2(double(grid[i1])) - std::log2(double(grid[i0])));
    diag.slope_n = dv / (grid[i1] - grid[i0]);
  }

  if (pair == TailPair::pr && kind.kind == DivergenceSpec::Kind::umegaki && !channel_mode) {
    // The two printed conventions for D(p||r) disagree; report both.
    const int N = grid.back();
    std::vector<double> u(N), v(N);
    double plain = 0.0;
    for (int n = 1; n <= N; ++n) {
      const double lp = sequence_log2_entry(SequenceRule::p, n);
      plain += scaled_product(lp, lp - sequence_log2_entry(SequenceRule::r, n));
      u[n - 1] = std::exp2(lp);
      v[n - 1] = std::exp2(sequence_log2_entry(SequenceRule::r, n));
    }
    double lindblad = plain;
    for (int n = 0; n < N; ++n) lindblad += (v[n] - u[n]) / kLn2;
    std::ostringstream os;
    os << "classical D(p||r) at N=" << N << ": plain=" << plain
       << " lindblad=" << lindblad << "; ";
    diag.note += os.str();
  }
  return diag;
}

}  // namespace qdiv
