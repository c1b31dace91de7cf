#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qdiv/channel_divergences.hpp"
#include "qdiv/channels.hpp"
#include "qdiv/divergences.hpp"
#include "qdiv/io.hpp"
#include "qdiv/strategies.hpp"
#include "qdiv/suites.hpp"
#include "qdiv/tail_examples.hpp"

namespace {

using nlohmann::json;
using namespace qdiv;

std::map<std::string, std::string> load_config(const std::string& path) {
  std::map<std::string, std::string> kv;
  if (path.empty()) return kv;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

std::string stein_csv(const std::vector<SteinRow>& rows) {
  std::ostringstream os;
  os << "eps,n,value,target,deviation,status\n";
  for (const auto& r : rows)
    os << format_double(r.eps) << "," << r.n << "," << format_double(r.value) << ","
       << format_double(r.target) << "," << format_double(r.deviation) << "," << r.status
       << "\n";
  return os.str();
}

std::string stein_json(const std::vector<SteinRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back({{"eps", r.eps},
                   {"n", r.n},
                   {"value", format_double(r.value)},
                   {"target", format_double(r.target)},
                   {"deviation", format_double(r.deviation)},
                   {"status", r.status}});
  return arr.dump(2) + "\n";
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

AdaptiveStrategy strategy_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open strategy file " + path);
  json j;
  in >> j;
  AdaptiveStrategy s;
  s.initial = state_from_json(j.at("initial"));
  for (const auto& p : j.at("preparations")) s.preparations.push_back(load_channel(p.get<std::string>()));
  s.r_dims = j.at("r_dims").get<std::vector<int>>();
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-dimensional quantum divergence and channel discrimination toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  Seed seed = 0;
  double tol = 1e-9;
  std::string out_path;
  app.add_option("--config", config_path, "key=value defaults (seed, tol, dim_cap)");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--tol", tol, "optimizer convergence tolerance");
  app.add_option("--out", out_path, "output file ('-' for stdout)");

  // divergence
  auto* dv = app.add_subcommand("divergence", "state-level divergence between two states");
  std::string kind = "umegaki", rho_path, sigma_path;
  double alpha = 2.0, eps = 0.1;
  dv->add_option("--kind", kind, "umegaki|petz|geometric|dmax|dh|smoothed-dmax|fidelity");
  dv->add_option("--alpha", alpha);
  dv->add_option("--eps", eps);
  dv->add_option("--rho", rho_path)->required();
  dv->add_option("--sigma", sigma_path)->required();

  // channel-div
  auto* cd = app.add_subcommand("channel-div", "stabilized channel divergence estimate");
  std::string e_spec, f_spec;
  int n_copies = 1, restarts = 16;
  cd->add_option("--kind", kind);
  cd->add_option("--alpha", alpha);
  cd->add_option("--eps", eps);
  cd->add_option("--e", e_spec)->required();
  cd->add_option("--f", f_spec)->required();
  cd->add_option("--n", n_copies, "copies for the regularized table");
  cd->add_option("--restarts", restarts);

  // stein
  auto* st = app.add_subcommand("stein", "parallel Stein sweep over (eps, n)");
  std::string eps_list = "0.05", n_list = "1,2,3,4,5,6,7,8,9,10", format = "csv";
  st->add_option("--e", e_spec)->required();
  st->add_option("--f", f_spec)->required();
  st->add_option("--eps-list", eps_list);
  st->add_option("--n-list", n_list);
  st->add_option("--format", format, "csv|json");

  // oneshot
  auto* os_cmd = app.add_subcommand("oneshot", "one-shot adaptive-to-parallel conversion check");
  std::string strategy_path;
  int m_copies = 2;
  double alpha_a = 0.5, alpha_p = 0.5, mu = 0.01;
  os_cmd->add_option("--e", e_spec)->required();
  os_cmd->add_option("--f", f_spec)->required();
  os_cmd->add_option("--strategy", strategy_path, "strategy JSON; default: fresh maximally mixed");
  os_cmd->add_option("--n", n_copies, "adaptive rounds for the default strategy");
  os_cmd->add_option("--m", m_copies);
  os_cmd->add_option("--alpha-a", alpha_a);
  os_cmd->add_option("--alpha-p", alpha_p);
  os_cmd->add_option("--mu", mu);
  os_cmd->add_option("--restarts", restarts);

  // tails
  auto* tl = app.add_subcommand("tails", "finiteness diagnostics for the tail sequences");
  std::string pair = "pq", grid = "8,16,32,64";
  bool channel_mode = false;
  double lambda = 0.5;
  tl->add_option("--pair", pair, "pq|pr");
  tl->add_option("--kind", kind, "umegaki|petz|geometric|dmax");
  tl->add_option("--alpha", alpha);
  tl->add_option("--grid", grid);
  tl->add_flag("--channel", channel_mode);
  tl->add_option("--lambda", lambda);

  // suite
  auto* su = app.add_subcommand("suite", "run a property suite");
  std::string suite_name;
  int size = 0;
  bool run_all = false;
  su->add_option("--name", suite_name);
  su->add_flag("--all", run_all);
  su->add_option("--size", size, "instance count override (0 = default)");
  std::string suite_format = "json";
  su->add_option("--format", suite_format, "json|csv");

  try {
    app.parse(argc, argv);
    auto cfg_file = load_config(config_path);
    if (cfg_file.count("seed") && !app.count("--seed")) seed = std::stoull(cfg_file["seed"]);
    if (cfg_file.count("tol") && !app.count("--tol")) tol = std::stod(cfg_file["tol"]);
    int dim_cap = cfg_file.count("dim_cap") ? std::stoi(cfg_file["dim_cap"]) : 4096;

    OptimizerConfig ocfg;
    ocfg.seed = seed;
    ocfg.tol = tol;
    ocfg.restarts = restarts;

    if (dv->parsed()) {
      DensityMatrix rho = load_state(rho_path);
      DensityMatrix sigma = load_state(sigma_path);
      json j;
      if (kind == "smoothed-dmax") {
        j = divergence_result_to_json(smoothed_max_bracket(eps, rho, sigma).result);
      } else if (kind == "fidelity") {
        j["value"] = format_double(fidelity(rho, sigma));
        j["method"] = "exact_spectral";
      } else {
        DivergenceSpec spec = DivergenceSpec::parse(kind, alpha, eps);
        if (spec.kind == DivergenceSpec::Kind::hypothesis_testing)
          j = divergence_result_to_json(hypothesis_testing(eps, rho, sigma).result);
        else if (spec.kind == DivergenceSpec::Kind::umegaki)
          j = divergence_result_to_json(umegaki(rho, sigma));
        else if (spec.kind == DivergenceSpec::Kind::petz)
          j = divergence_result_to_json(petz_renyi(alpha, rho, sigma));
        else if (spec.kind == DivergenceSpec::Kind::geometric)
          j = divergence_result_to_json(geometric_renyi(alpha, rho, sigma));
        else
          j = divergence_result_to_json(max_relative(rho, sigma));
      }
      write_text(out_path, j.dump(2) + "\n");
      return 0;
    }

    if (cd->parsed()) {
      KrausChannel e = channel_from_spec_string(e_spec);
      KrausChannel f = channel_from_spec_string(f_spec);
      DivergenceSpec spec = DivergenceSpec::parse(kind, alpha, eps);
      json j;
      if (n_copies <= 1) {
        ChannelDivergenceEstimate est = stabilized_divergence(spec, e, f, ocfg);
        j["value"] = format_double(est.value);
        j["kind"] = est.kind == EstimateKind::exact_classical ? "exact_classical"
                    : est.kind == EstimateKind::exact_choi_dmax ? "exact_choi_dmax"
                                                                : "optimizer_lower_bound";
        j["restarts"] = est.report.restarts;
        j["iterations"] = est.report.iterations;
        json trace = json::array();
        for (double v : est.report.best_objective_trace) trace.push_back(format_double(v));
        j["best_objective_trace"] = std::move(trace);
        if (est.witness_state) {
          json wr = json::array(), wi = json::array();
          for (Eigen::Index i = 0; i < est.witness_state->size(); ++i) {
            wr.push_back((*est.witness_state)[i].real());
            wi.push_back((*est.witness_state)[i].imag());
          }
          j["witness"] = {{"re", std::move(wr)}, {"im", std::move(wi)}};
        }
      } else {
        auto rows = regularized_estimate(spec, e, f, n_copies, ocfg, dim_cap);
        json arr = json::array();
        for (auto [n, v] : rows) arr.push_back({{"n", n}, {"value_per_copy", format_double(v)}});
        j["regularized"] = std::move(arr);
      }
      write_text(out_path, j.dump(2) + "\n");
      return 0;
    }

    if (st->parsed()) {
      KrausChannel e = channel_from_spec_string(e_spec);
      KrausChannel f = channel_from_spec_string(f_spec);
      auto rows = stein_sweep(e, f, parse_double_list(eps_list), parse_int_list(n_list), ocfg,
                              dim_cap);
      write_text(out_path, format == "json" ? stein_json(rows) : stein_csv(rows));
      return 0;
    }

    if (os_cmd->parsed()) {
      KrausChannel e = channel_from_spec_string(e_spec);
      KrausChannel f = channel_from_spec_string(f_spec);
      AdaptiveStrategy s;
      if (!strategy_path.empty()) {
        s = strategy_from_file(strategy_path);
      } else {
        const int d = e.dim_in;
        Matrix id = Matrix::Identity(d * d, d * d) / double(d * d);
        s.initial = DensityMatrix::wrap(std::move(id), {d, d});
        s.r_dims.assign(std::max(1, n_copies), d);
        for (int i = 1; i < std::max(1, n_copies); ++i)
          s.preparations.push_back(random_channel(e.dim_out * d, d * d, 2, derive_seed(seed, i)));
      }
      OneShotReport rep = verify_oneshot(s, e, f, m_copies, alpha_a, alpha_p, mu, ocfg);
      json j{{"status", rep.status == OneShotReport::Status::verified ? "verified" : "inconclusive"},
             {"lhs", format_double(rep.lhs)},
             {"rhs_parallel", format_double(rep.rhs_parallel)},
             {"error_term", format_double(rep.error_term)},
             {"C", format_double(rep.C)},
             {"reason", rep.reason}};
      write_text(out_path, j.dump(2) + "\n");
      return 0;
    }

    if (tl->parsed()) {
      DivergenceSpec spec = DivergenceSpec::parse(kind, alpha, eps);
      TailPair tp = pair == "pq" ? TailPair::pq : TailPair::pr;
      GrowthDiagnosis diag =
          finiteness_diagnostic(tp, spec, parse_int_list(grid), channel_mode, lambda);
      std::ostringstream os;
      os << "N,value,classification\n";
      for (size_t i = 0; i < diag.grid.size(); ++i)
        os << diag.grid[i] << "," << format_double(diag.values[i]) << ","
           << (diag.classification == Growth::converged ? "converged" : "diverging") << "\n";
      write_text(out_path, os.str());
      if (!diag.note.empty()) std::cerr << "# " << diag.note << "\n";
      return 0;
    }

    if (su->parsed()) {
      std::vector<std::string> names;
      if (run_all)
        names = suite_names();
      else if (!suite_name.empty())
        names.push_back(suite_name);
      else
        throw CLI::ValidationError("suite", "--name or --all required");
      bool ok = true;
      std::ostringstream os;
      for (const auto& nm : names) {
        SuiteReport rep = run_suite(nm, seed, size);
        ok = ok && rep.passed();
        os << (suite_format == "csv" ? report_to_csv_string(rep)
                                     : report_to_json_string(rep) + "\n");
        std::cerr << nm << ": " << rep.cases << " cases, " << rep.failures.size()
                  << " failures, " << rep.wall_ms << " ms\n";
      }
      write_text(out_path, os.str());
      return ok ? 0 : 1;
    }
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const CapExceeded& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const UnknownSuite& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 2;
}
