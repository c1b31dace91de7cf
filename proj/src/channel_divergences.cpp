#include "qdiv/channel_divergences.hpp"

#include <algorithm>
#include <cmath>

namespace qdiv {

namespace {

// Threshold separating genuinely divergent iterates from large finite values.
constexpr double kInfinityBits = 1152921504606846976.0;  // 2^60

std::vector<double> log2_vec(const RVector& v) {
  std::vector<double> out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v[i] > 0 ? std::log2(v[i]) : -kInf;
  return out;
}

double lse2(const std::vector<double>& terms) {
  double m = -kInf;
  for (double t : terms) m = std::max(m, t);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double t : terms) acc += std::exp2(t - m);
  return m + std::log2(acc);
}

}  // namespace

DivergenceSpec DivergenceSpec::parse(const std::string& name, double alpha, double eps) {
  DivergenceSpec s;
  s.alpha = alpha;
  s.eps = eps;
  if (name == "umegaki" || name == "kl" || name == "relative-entropy")
    s.kind = Kind::umegaki;
  else if (name == "petz" || name == "renyi")
    s.kind = Kind::petz;
  else if (name == "geometric")
    s.kind = Kind::geometric;
  else if (name == "dmax" || name == "max")
    s.kind = Kind::dmax;
  else if (name == "dh" || name == "hypothesis" || name == "hypothesis-testing")
    s.kind = Kind::hypothesis_testing;
  else
    throw DomainError("unknown divergence kind '" + name + "'");
  return s;
}

std::string DivergenceSpec::name() const {
  switch (kind) {
    case Kind::umegaki: return "umegaki";
    case Kind::petz: return "petz(" + std::to_string(alpha) + ")";
    case Kind::geometric: return "geometric(" + std::to_string(alpha) + ")";
    case Kind::dmax: return "dmax";
    case Kind::hypothesis_testing: return "dh(" + std::to_string(eps) + ")";
  }
  return "?";
}

double state_divergence(const DivergenceSpec& spec, const DensityMatrix& rho,
                        const DensityMatrix& sigma) {
  switch (spec.kind) {
    case DivergenceSpec::Kind::umegaki: return umegaki(rho, sigma).value;
    case DivergenceSpec::Kind::petz: return petz_renyi(spec.alpha, rho, sigma).value;
    case DivergenceSpec::Kind::geometric: return geometric_renyi(spec.alpha, rho, sigma).value;
    case DivergenceSpec::Kind::dmax: return max_relative(rho, sigma).value;
    case DivergenceSpec::Kind::hypothesis_testing:
      return hypothesis_testing(spec.eps, rho, sigma).result.value;
  }
  throw DomainError("unhandled divergence kind");
}

double classical_divergence_value(const DivergenceSpec& spec, const RVector& u,
                                  const RVector& v) {
  if (u.size() != v.size()) throw DimensionMismatch("vector lengths differ");
  const Eigen::Index n = u.size();
  switch (spec.kind) {
    case DivergenceSpec::Kind::umegaki: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (u[i] <= 0.0) {
          acc += v[i] / std::log(2.0);  // u -> 0 limit of the Lindblad integrand
          continue;
        }
        if (v[i] <= 0.0) return kInf;
        acc += (u[i] * std::log(u[i] / v[i]) - u[i] + v[i]) / std::log(2.0);
      }
      return acc;
    }
    case DivergenceSpec::Kind::petz:
    case DivergenceSpec::Kind::geometric: {
      const double a = spec.alpha;
      std::vector<double> terms;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (u[i] <= 0.0) continue;
        if (v[i] <= 0.0) {
          if (a > 1.0) return kInf;
          continue;
        }
        terms.push_back(a * std::log2(u[i]) + (1.0 - a) * std::log2(v[i]));
      }
      return lse2(terms) / (a - 1.0);
    }
    case DivergenceSpec::Kind::dmax: {
      double best = -kInf;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (u[i] <= 0.0) continue;
        if (v[i] <= 0.0) return kInf;
        best = std::max(best, std::log2(u[i]) - std::log2(v[i]));
      }
      return best;
    }
    case DivergenceSpec::Kind::hypothesis_testing: {
      Matrix du = Matrix::Zero(n, n), dv = Matrix::Zero(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        du(i, i) = u[i];
        dv(i, i) = v[i];
      }
      DensityMatrix ru = DensityMatrix::wrap(std::move(du), {static_cast<int>(n)});
      DensityMatrix rv = DensityMatrix::wrap(std::move(dv), {static_cast<int>(n)});
      return hypothesis_testing(spec.eps, ru, rv).result.value;
    }
  }
  throw DomainError("unhandled divergence kind");
}

// ---------------------------------------------------------------------------
// Stabilized channel divergence via multi-start projected gradient ascent
// ---------------------------------------------------------------------------

namespace {

struct Objective {
  const DivergenceSpec& spec;
  const KrausChannel& e;
  const KrausChannel& f;
  int ref_dim;

  double operator()(const CVector& psi) const {
    DensityMatrix input = DensityMatrix::wrap(psi * psi.adjoint(), {ref_dim, e.dim_in});
    DensityMatrix out_e = apply(e, input, 1);
    DensityMatrix out_f = apply(f, input, 1);
    return state_divergence(spec, out_e, out_f);
  }
};

CVector max_entangled(int d) {
  CVector v = CVector::Zero(static_cast<long>(d) * d);
  for (int i = 0; i < d; ++i) v[static_cast<long>(i) * d + i] = 1.0 / std::sqrt(double(d));
  return v;
}

CVector vertex_state(int d, int x) {
  CVector v = CVector::Zero(static_cast<long>(d) * d);
  v[static_cast<long>(x % d) * d + x] = 1.0;  // |x mod d> (x) |x>
  return v;
}

}  // namespace

ChannelDivergenceEstimate stabilized_divergence(const DivergenceSpec& spec,
                                                const KrausChannel& e, const KrausChannel& f,
                                                const OptimizerConfig& cfg) {
  if (e.dim_in != f.dim_in || e.dim_out != f.dim_out)
    throw DimensionMismatch("channel shapes differ");
  const int d = e.dim_in;
  const long n = static_cast<long>(d) * d;
  Objective obj{spec, e, f, d};

  ChannelDivergenceEstimate best;
  best.kind = EstimateKind::optimizer_lower_bound;
  best.value = -kInf;
  best.report.restarts = cfg.restarts;

  for (int r = 0; r < cfg.restarts; ++r) {
    CVector psi;
    if (r == 0)
      psi = max_entangled(d);
    else if (r <= d)
      psi = vertex_state(d, r - 1);
    else
      psi = random_pure(static_cast<int>(n), derive_seed(cfg.seed, r));
    double val = obj(psi);
    if (val >= kInfinityBits || std::isinf(val)) {
      best.value = kInf;
      best.witness_state = psi;
      best.report.best_objective_trace.push_back(kInf);
      return best;
    }

    double step = cfg.initial_step;
    for (int it = 0; it < cfg.max_iterations; ++it) {
      ++best.report.iterations;
      // central finite differences on the real/imaginary parts
      CVector grad(n);
      for (long k = 0; k < n; ++k) {
        CVector plus = psi, minus = psi;
        plus[k] += cfg.fd_step;
        minus[k] -= cfg.fd_step;
        const double gr = (obj(plus.normalized()) - obj(minus.normalized())) / (2 * cfg.fd_step);
        plus = psi;
        minus = psi;
        plus[k] += Complex(0, cfg.fd_step);
        minus[k] -= Complex(0, cfg.fd_step);
        const double gi = (obj(plus.normalized()) - obj(minus.normalized())) / (2 * cfg.fd_step);
        grad[k] = Complex(gr, gi);
      }
      CVector tangent = grad - psi * Complex(psi.dot(grad).real(), 0.0);
      const double tn = tangent.norm();
      if (tn < 1e-14) break;

      bool accepted = false;
      while (step >= 1e-12) {
        CVector trial = (psi + step * tangent).normalized();
        const double tval = obj(trial);
        if (tval >= kInfinityBits || std::isinf(tval)) {
          best.value = kInf;
          best.witness_state = trial;
          best.report.best_objective_trace.push_back(kInf);
          return best;
        }
        if (tval > val) {
          const double gain = tval - val;
          psi = trial;
          val = tval;
          accepted = true;
          step = std::min(step * 1.5, cfg.initial_step);
          if (gain < cfg.tol) it = cfg.max_iterations;  // converged
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
    }
    if (val > best.value) {
      best.value = val;
      best.witness_state = psi;
    }
    best.report.best_objective_trace.push_back(best.value);
  }
  if (best.value == -kInf) best.value = 0.0;
  return best;
}

ChannelDivergenceEstimate exact_classical_channel_divergence(const DivergenceSpec& spec,
                                                             const KrausChannel& e,
                                                             const KrausChannel& f) {
  if (!e.is_classical() || !f.is_classical())
    throw NotClassical("both channels must come from classical_channel_embed");
  if (e.dim_in != f.dim_in || e.dim_out != f.dim_out)
    throw DimensionMismatch("channel shapes differ");
  ChannelDivergenceEstimate out;
  out.kind = EstimateKind::exact_classical;
  out.value = -kInf;
  int best_x = 0;
  for (int x = 0; x < e.dim_in; ++x) {
    const double v = classical_divergence_value(spec, e.stochastic->col(x), f.stochastic->col(x));
    if (v > out.value) {
      out.value = v;
      best_x = x;
    }
  }
  if (out.value == -kInf) out.value = 0.0;
  out.witness_state = vertex_state(e.dim_in, best_x);
  return out;
}

ChannelDivergenceEstimate dmax_channel_divergence_choi(const KrausChannel& e,
                                                       const KrausChannel& f) {
  if (e.dim_in != f.dim_in || e.dim_out != f.dim_out)
    throw DimensionMismatch("channel shapes differ");
  const int d = e.dim_in * e.dim_out;
  DensityMatrix je = DensityMatrix::wrap(choi_matrix(e), {d}, false);
  DensityMatrix jf = DensityMatrix::wrap(choi_matrix(f), {d}, false);
  ChannelDivergenceEstimate out;
  out.kind = EstimateKind::exact_choi_dmax;
  out.value = max_relative(je, jf).value;
  return out;
}

std::vector<std::pair<int, double>> regularized_estimate(const DivergenceSpec& spec,
                                                         const KrausChannel& e,
                                                         const KrausChannel& f, int n_max,
                                                         const OptimizerConfig& cfg,
                                                         int dim_cap) {
  std::vector<std::pair<int, double>> rows;
  KrausChannel en = e, fn = f;
  for (int n = 1; n <= n_max; ++n) {
    if (n > 1) {
      en = tensor_channels(en, e);
      fn = tensor_channels(fn, f);
    }
    const double total_dim = std::pow(static_cast<double>(e.dim_in), n);
    if (total_dim > dim_cap)
      throw CapExceeded("dim_in^" + std::to_string(n) + " exceeds the register cap");
    double value;
    if (en.is_classical() && fn.is_classical())
      value = exact_classical_channel_divergence(spec, en, fn).value;
    else
      value = stabilized_divergence(spec, en, fn, cfg).value;
    rows.emplace_back(n, value / n);
  }
  return rows;
}

double channel_geometric_upper(double alpha, const KrausChannel& e, const KrausChannel& f) {
  if (e.is_classical() && f.is_classical()) {
    DivergenceSpec spec;
    spec.kind = DivergenceSpec::Kind::geometric;
    spec.alpha = alpha;
    return exact_classical_channel_divergence(spec, e, f).value;
  }
  return dmax_channel_divergence_choi(e, f).value;
}

ChainRuleReport geometric_chain_rule_check(double alpha, const KrausChannel& e,
                                           const KrausChannel& f, const DensityMatrix& rho,
                                           const DensityMatrix& sigma, ChainMode mode,
                                           const OptimizerConfig& cfg) {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw PreconditionViolated("alpha must lie in (1,2]");
  (void)cfg;
  ChainRuleReport rep;
  rep.state_term = geometric_renyi(alpha, rho, sigma).value;
  if (mode == ChainMode::classical) {
    DivergenceSpec spec;
    spec.kind = DivergenceSpec::Kind::geometric;
    spec.alpha = alpha;
    rep.channel_term = exact_classical_channel_divergence(spec, e, f).value;
  } else {
    rep.channel_term = channel_geometric_upper(alpha, e, f);
  }
  rep.output_term = geometric_renyi(alpha, apply(e, rho), apply(f, sigma)).value;
  if (!std::isfinite(rep.channel_term) || !std::isfinite(rep.state_term)) {
    rep.status = ChainStatus::inconclusive;
    rep.slack = kInf;
    return rep;
  }
  rep.slack = rep.state_term + rep.channel_term - rep.output_term;
  rep.status = rep.slack >= -1e-8 ? ChainStatus::ok : ChainStatus::violated;
  return rep;
}

double geometric_additivity_check(double alpha, const KrausChannel& e1, const KrausChannel& f1,
                                  const KrausChannel& e2, const KrausChannel& f2,
                                  ChainMode mode, const OptimizerConfig& cfg) {
  DivergenceSpec spec;
  spec.kind = DivergenceSpec::Kind::geometric;
  spec.alpha = alpha;
  KrausChannel ej = tensor_channels(e1, e2), fj = tensor_channels(f1, f2);
  if (mode == ChainMode::classical) {
    const double joint = exact_classical_channel_divergence(spec, ej, fj).value;
    const double s1 = exact_classical_channel_divergence(spec, e1, f1).value;
    const double s2 = exact_classical_channel_divergence(spec, e2, f2).value;
    return std::abs(joint - s1 - s2);
  }
  ChannelDivergenceEstimate a = stabilized_divergence(spec, e1, f1, cfg);
  ChannelDivergenceEstimate b = stabilized_divergence(spec, e2, f2, cfg);
  // Product-witness direction: evaluate the joint objective at w1 (x) w2,
  // reordered to (A1' A2') (x) (A1 A2).
  double joint = -kInf;
  if (a.witness_state && b.witness_state) {
    const int d1 = e1.dim_in, d2 = e2.dim_in;
    CVector prod = CVector::Zero(static_cast<long>(d1) * d1 * d2 * d2);
    for (int r1 = 0; r1 < d1; ++r1)
      for (int s1i = 0; s1i < d1; ++s1i)
        for (int r2 = 0; r2 < d2; ++r2)
          for (int s2i = 0; s2i < d2; ++s2i) {
            const long src1 = static_cast<long>(r1) * d1 + s1i;
            const long src2 = static_cast<long>(r2) * d2 + s2i;
            const long dst = ((static_cast<long>(r1) * d2 + r2) * d1 + s1i) * d2 + s2i;
            prod[dst] = (*a.witness_state)[src1] * (*b.witness_state)[src2];
          }
    DensityMatrix input =
        DensityMatrix::wrap(prod * prod.adjoint(), {d1 * d2, e1.dim_in * e2.dim_in});
    joint = state_divergence(spec, apply(ej, input, 1), apply(fj, input, 1));
  }
  return joint - a.value - b.value;  // >= -tol expected
}

double c_hat_gamma(double gamma, const KrausChannel& e, const KrausChannel& f,
                   const OptimizerConfig& cfg) {
  (void)cfg;
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in (0,1]");
  const double dhat = channel_geometric_upper(1.0 + gamma, e, f);
  if (!std::isfinite(dhat)) return kInf;
  return std::log2(std::exp2(gamma * dhat) + 2.0) / gamma;
}

double constant_C(const KrausChannel& e, const KrausChannel& f,
                  const std::vector<double>& alpha_grid, const OptimizerConfig& cfg) {
  (void)cfg;
  double best = kInf;
  for (double a : alpha_grid) {
    if (!(a > 1.0 && a <= 2.0)) continue;
    const double dhat = channel_geometric_upper(a, e, f);
    if (!std::isfinite(dhat)) continue;
    best = std::min(best, std::log2(std::exp2((a - 1.0) * dhat) + 2.0) / (a - 1.0));
  }
  return std::isfinite(best) ? 8.0 * best : kInf;
}

}  // namespace qdiv
