#include "qdiv/strategies.hpp"

#include <algorithm>
#include <cmath>

namespace qdiv {

namespace {

DensityMatrix tensor_power(const DensityMatrix& rho, int n) {
  DensityMatrix out = rho;
  for (int i = 1; i < n; ++i) out = tensor(out, rho);
  return out;
}

KrausChannel channel_power(const KrausChannel& ch, int n) {
  KrausChannel out = ch;
  for (int i = 1; i < n; ++i) out = tensor_channels(out, ch);
  return out;
}

}  // namespace

void AdaptiveStrategy::validate(int box_dim_in, int box_dim_out) const {
  if (initial.dims.size() != 2) throw DimensionMismatch("initial state must be A (x) R");
  if (initial.dims[0] != box_dim_in)
    throw DimensionMismatch("initial A-slot does not match the box input");
  if (static_cast<int>(r_dims.size()) != rounds())
    throw DimensionMismatch("one reference dimension per round required");
  if (initial.dims[1] != r_dims[0]) throw DimensionMismatch("initial reference dimension");
  for (size_t i = 0; i < preparations.size(); ++i) {
    const KrausChannel& prep = preparations[i];
    if (prep.dim_in != box_dim_out * r_dims[i])
      throw DimensionMismatch("preparation " + std::to_string(i + 2) + " input dimension");
    if (prep.dim_out != box_dim_in * r_dims[i + 1])
      throw DimensionMismatch("preparation " + std::to_string(i + 2) + " output dimension");
  }
}

Rollout rollout(const AdaptiveStrategy& s, const KrausChannel& box) {
  s.validate(box.dim_in, box.dim_out);
  Rollout out;
  DensityMatrix state = s.initial;  // on A_i (x) R_i
  for (int i = 0; i < s.rounds(); ++i) {
    DensityMatrix after = apply(box, state, 0);  // B_i (x) R_i
    out.intermediates.push_back(after);
    if (i + 1 < s.rounds()) {
      const KrausChannel& prep = s.preparations[i];
      Matrix flat = after.mat;
      DensityMatrix joint = DensityMatrix::wrap(
          std::move(flat), {box.dim_out * s.r_dims[i]}, after.normalized);
      DensityMatrix prepared = apply(prep, joint, 0);
      state = DensityMatrix::wrap(prepared.mat, {box.dim_in, s.r_dims[i + 1]},
                                  prepared.normalized);
    }
  }
  out.final_state = out.intermediates.back();
  out.final_state.dims = {box.dim_out, s.r_dims[s.rounds() - 1]};
  return out;
}

AdaptiveStrategy parallel_as_adaptive(const DensityMatrix& nu, int m, int box_dim_in,
                                      int box_dim_out) {
  if (static_cast<int>(nu.dims.size()) != m + 1)
    throw DimensionMismatch("nu must carry one reference factor plus m box slots");
  for (int i = 1; i <= m; ++i)
    if (nu.dims[i] != box_dim_in) throw DimensionMismatch("box slot dimension");
  const int r0 = nu.dims[0];

  AdaptiveStrategy s;
  // Round-1 register order: [A_1, R0, A_2 .. A_m].
  std::vector<int> init_perm(m + 1);
  init_perm[0] = 1;
  init_perm[1] = 0;
  for (int i = 2; i <= m; ++i) init_perm[i] = i;
  DensityMatrix init = permute_subsystems(nu, init_perm);
  long rest = r0;
  for (int i = 2; i <= m; ++i) rest *= box_dim_in;
  s.initial = DensityMatrix::wrap(init.mat, {box_dim_in, static_cast<int>(rest)},
                                  nu.normalized);
  s.r_dims.assign(m, 0);
  s.r_dims[0] = static_cast<int>(rest);

  // Before box i the register reads [A_i, B_1..B_{i-1}, R0, A_{i+1}..A_m];
  // after it, [B_i, ...]. The preparation pulls A_{i+1} to the front and
  // files B_i behind the earlier outputs.
  for (int i = 1; i < m; ++i) {
    std::vector<int> dims;
    dims.push_back(box_dim_out);                            // B_i
    for (int k = 1; k < i; ++k) dims.push_back(box_dim_out);  // B_1..B_{i-1}
    dims.push_back(r0);
    for (int k = i + 1; k <= m; ++k) dims.push_back(box_dim_in);  // A_{i+1}..A_m
    std::vector<int> perm;
    perm.push_back(i + 1);                              // A_{i+1} to the box slot
    for (int k = 1; k < i; ++k) perm.push_back(k);      // B_1..B_{i-1}
    perm.push_back(0);                                  // B_i
    perm.push_back(i);                                  // R0
    for (int k = i + 2; k <= m; ++k) perm.push_back(k); // A_{i+2}..A_m
    s.preparations.push_back(permutation_channel(perm, dims));
    long r = r0;
    for (int k = 0; k < i; ++k) r *= box_dim_out;
    for (int k = i + 2; k <= m; ++k) r *= box_dim_in;
    s.r_dims[i] = static_cast<int>(r);
  }
  return s;
}

ExponentReport adaptive_exponent(const AdaptiveStrategy& s, const KrausChannel& e,
                                 const KrausChannel& f, double eps) {
  Rollout re = rollout(s, e);
  Rollout rf = rollout(s, f);
  HypothesisTest ht = hypothesis_testing(eps, re.final_state, rf.final_state);
  ExponentReport rep;
  rep.uses = s.rounds();
  rep.epsilon = eps;
  rep.value_bits_per_use = ht.result.value / s.rounds();
  rep.primal_dual_gap = ht.result.gap();
  return rep;
}

ExponentReport parallel_exponent(const DensityMatrix& nu, const KrausChannel& e,
                                 const KrausChannel& f, int m, double eps, int dim_cap) {
  const int k = static_cast<int>(nu.dims.size());
  if (k < m) throw DimensionMismatch("nu has fewer subsystems than box slots");
  if (nu.dim() > dim_cap) throw CapExceeded("input register exceeds the cap");
  DensityMatrix out_e = nu, out_f = nu;
  for (int i = k - m; i < k; ++i) {
    out_e = apply(e, out_e, i);
    out_f = apply(f, out_f, i);
  }
  HypothesisTest ht = hypothesis_testing(eps, out_e, out_f);
  ExponentReport rep;
  rep.uses = m;
  rep.epsilon = eps;
  rep.value_bits_per_use = ht.result.value / m;
  rep.primal_dual_gap = ht.result.gap();
  return rep;
}

double conversion_error_term(double alpha_a, double alpha_p, int m, int n, double mu,
                             double C) {
  if (!(alpha_a > 0.0 && alpha_a < 1.0 && alpha_p > 0.0 && alpha_p < 1.0))
    throw DomainError("alpha_a and alpha_p must lie in (0,1)");
  if (!(mu > 0.0) || C < 0.0) throw DomainError("mu must be positive and C nonnegative");
  const double lead = 1.0 / (1.0 - alpha_a);
  const double per_sqrt_m = C * n / std::sqrt(static_cast<double>(m)) * std::log2(8.0 / alpha_p);
  const double per_m =
      (std::log2(1.0 / alpha_p) - std::log2(1.0 - alpha_p / 4.0) + mu) / m;
  const double per_n = binary_entropy(alpha_a) / n;
  return lead * (per_sqrt_m + per_m + per_n);
}

OneShotReport verify_oneshot(const AdaptiveStrategy& s, const KrausChannel& e,
                             const KrausChannel& f, int m, double alpha_a, double alpha_p,
                             double mu, const OptimizerConfig& cfg) {
  OneShotReport rep;
  rep.C = constant_C(e, f, {1.25, 1.5, 1.75, 2.0}, cfg);
  const int n = s.rounds();
  rep.error_term = std::isfinite(rep.C)
                       ? conversion_error_term(alpha_a, alpha_p, m, n, mu, rep.C)
                       : kInf;
  if (!std::isfinite(rep.C)) {
    rep.status = OneShotReport::Status::inconclusive;
    rep.reason = "channel constant C is infinite";
    return rep;
  }

  Rollout re = rollout(s, e);
  Rollout rf = rollout(s, f);
  rep.lhs = hypothesis_testing(alpha_a, re.final_state, rf.final_state).result.value / n;

  // Parallel side: best found nu gives a valid lower bound on the sup.
  DivergenceSpec dh;
  dh.kind = DivergenceSpec::Kind::hypothesis_testing;
  dh.eps = alpha_p;
  double best_per_use = -kInf;

  // Candidate 1: m-fold product of the best single-copy witness.
  ChannelDivergenceEstimate single = stabilized_divergence(dh, e, f, cfg);
  if (single.witness_state) {
    const int d = e.dim_in;
    DensityMatrix psi = DensityMatrix::wrap(
        *single.witness_state * single.witness_state->adjoint(), {d, d});
    DensityMatrix nu = tensor_power(psi, m);  // ((A' A))^m ordering
    // reorder to A'^m (x) A^m
    std::vector<int> perm;
    for (int i = 0; i < m; ++i) perm.push_back(2 * i);
    for (int i = 0; i < m; ++i) perm.push_back(2 * i + 1);
    nu = permute_subsystems(nu, perm);
    best_per_use = std::max(
        best_per_use, parallel_exponent(nu, e, f, m, alpha_p).value_bits_per_use);
  }

  // Candidate 2: joint optimization over the m-fold channels when affordable.
  const double joint_dim = std::pow(static_cast<double>(e.dim_in), 2 * m);
  if (joint_dim <= 256.0) {
    ChannelDivergenceEstimate joint =
        stabilized_divergence(dh, channel_power(e, m), channel_power(f, m), cfg);
    best_per_use = std::max(best_per_use, joint.value / m);
  }

  rep.rhs_parallel = best_per_use / (1.0 - alpha_a);
  if (rep.lhs <= rep.rhs_parallel + rep.error_term + 1e-8) {
    rep.status = OneShotReport::Status::verified;
  } else {
    rep.status = OneShotReport::Status::inconclusive;
    rep.reason = "optimizer lower bound too weak to certify the inequality";
  }
  return rep;
}

ChainStepReport smoothed_chain_step(double eps, double eps_prime, double mu, int m,
                                    const DensityMatrix& rho, const DensityMatrix& sigma,
                                    const KrausChannel& e, const KrausChannel& f) {
  if (m < 1) throw DomainError("m must be positive");
  SmoothedMaxBracket in_bracket = smoothed_max_bracket(eps / m, rho, sigma);
  if (!in_bracket.witness) throw InfiniteRenyi("input smoothing bracket is empty");
  const DensityMatrix& nu = in_bracket.witness->smoothed_state;

  DensityMatrix e_rho_m = tensor_power(apply(e, rho), m);
  DensityMatrix f_sigma_m = tensor_power(apply(f, sigma), m);
  DensityMatrix e_nu_m = tensor_power(apply(e, nu), m);
  DensityMatrix f_nu_m = tensor_power(apply(f, nu), m);

  ChainStepReport rep;
  rep.lhs_lower = smoothed_max_lower_bound(eps + eps_prime, e_rho_m, f_sigma_m);
  const double middle = smoothed_max_bracket(eps_prime, e_nu_m, f_nu_m).result.value;
  rep.rhs_upper = middle + m * in_bracket.witness->dmax_to_sigma + mu;
  rep.slack = rep.rhs_upper - rep.lhs_lower;
  return rep;
}

std::vector<SteinRow> stein_sweep(const KrausChannel& e, const KrausChannel& f,
                                  const std::vector<double>& eps_list,
                                  const std::vector<int>& n_list, const OptimizerConfig& cfg,
                                  int dim_cap) {
  std::vector<SteinRow> rows;
  const bool replacer_pair = e.is_replacer() && f.is_replacer();
  const bool classical_pair = e.is_classical() && f.is_classical();

  double target = std::numeric_limits<double>::quiet_NaN();
  DivergenceSpec kl;
  kl.kind = DivergenceSpec::Kind::umegaki;
  int vertex = 0;
  if (replacer_pair) {
    DensityMatrix r0 = DensityMatrix::wrap(*e.replaced_state, {e.dim_out});
    DensityMatrix s0 = DensityMatrix::wrap(*f.replaced_state, {f.dim_out});
    target = umegaki(r0, s0).value;
  } else if (classical_pair) {
    ChannelDivergenceEstimate est = exact_classical_channel_divergence(kl, e, f);
    target = est.value;
    for (int x = 0; x < e.dim_in; ++x)
      if (classical_divergence_value(kl, e.stochastic->col(x), f.stochastic->col(x)) >=
          target - 1e-15)
        vertex = x;
  }

  // Single-copy witness for generic quantum pairs.
  DensityMatrix single_input = DensityMatrix::wrap(
      Matrix::Identity(e.dim_in, e.dim_in) / static_cast<double>(e.dim_in), {e.dim_in});
  if (!replacer_pair && !classical_pair) {
    ChannelDivergenceEstimate est = stabilized_divergence(kl, e, f, cfg);
    if (est.witness_state) {
      DensityMatrix psi = DensityMatrix::wrap(
          *est.witness_state * est.witness_state->adjoint(), {e.dim_in, e.dim_in});
      single_input = partial_trace(psi, {1});
    }
  }

  for (double eps : eps_list) {
    for (int n : n_list) {
      SteinRow row;
      row.eps = eps;
      row.n = n;
      row.target = target;
      const double out_dim = std::pow(static_cast<double>(e.dim_out), n);
      if (out_dim > dim_cap) {
        row.status = "cap";
        row.value = std::numeric_limits<double>::quiet_NaN();
        row.deviation = row.value;
        rows.push_back(row);
        continue;
      }
      DensityMatrix out_e = [&] {
        if (replacer_pair)
          return tensor_power(DensityMatrix::wrap(*e.replaced_state, {e.dim_out}), n);
        if (classical_pair) {
          Matrix d = Matrix::Zero(e.dim_out, e.dim_out);
          for (int i = 0; i < e.dim_out; ++i) d(i, i) = (*e.stochastic)(i, vertex);
          return tensor_power(DensityMatrix::wrap(std::move(d), {e.dim_out}), n);
        }
        return tensor_power(apply(e, single_input), n);
      }();
      DensityMatrix out_f = [&] {
        if (replacer_pair)
          return tensor_power(DensityMatrix::wrap(*f.replaced_state, {f.dim_out}), n);
        if (classical_pair) {
          Matrix d = Matrix::Zero(f.dim_out, f.dim_out);
          for (int i = 0; i < f.dim_out; ++i) d(i, i) = (*f.stochastic)(i, vertex);
          return tensor_power(DensityMatrix::wrap(std::move(d), {f.dim_out}), n);
        }
        return tensor_power(apply(f, single_input), n);
      }();
      double value = hypothesis_testing(eps, out_e, out_f).result.value / n;

      // Entangled-input refinement for small registers on genuine quantum pairs.
      if (!replacer_pair && !classical_pair &&
          std::pow(static_cast<double>(e.dim_in), 2 * n) <= 64.0) {
        DivergenceSpec dh;
        dh.kind = DivergenceSpec::Kind::hypothesis_testing;
        dh.eps = eps;
        ChannelDivergenceEstimate joint =
            stabilized_divergence(dh, channel_power(e, n), channel_power(f, n), cfg);
        value = std::max(value, joint.value / n);
      }
      row.value = value;
      row.deviation = std::isnan(target) ? target : std::abs(value - target);
      row.status = "ok";
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace qdiv
