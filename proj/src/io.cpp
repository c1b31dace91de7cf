#include "qdiv/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace qdiv {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json matrix_to_json(const Matrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

Matrix matrix_from_json(const json& j, int rows, int cols) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (static_cast<long>(re.size()) != static_cast<long>(rows) * cols ||
      static_cast<long>(im.size()) != static_cast<long>(rows) * cols)
    throw IoError("matrix payload size mismatch");
  Matrix m(rows, cols);
  long k = 0;
  for (int i = 0; i < rows; ++i)
    for (int jj = 0; jj < cols; ++jj, ++k)
      m(i, jj) = Complex(re[k].get<double>(), im[k].get<double>());
  return m;
}

json state_to_json(const DensityMatrix& rho) {
  json j = matrix_to_json(rho.mat);
  j["dim"] = rho.dim();
  j["subsystem_dims"] = rho.dims;
  j["normalized"] = rho.normalized;
  return j;
}

DensityMatrix state_from_json(const json& j) {
  const int dim = j.at("dim").get<int>();
  std::vector<int> dims = j.value("subsystem_dims", std::vector<int>{dim});
  const bool normalized = j.value("normalized", true);
  return DensityMatrix::make(matrix_from_json(j, dim, dim), std::move(dims), normalized);
}

json channel_to_json(const KrausChannel& ch) {
  json ks = json::array();
  for (const Matrix& k : ch.kraus) ks.push_back(matrix_to_json(k));
  return json{{"dim_in", ch.dim_in}, {"dim_out", ch.dim_out}, {"kraus", std::move(ks)}};
}

KrausChannel channel_from_json(const json& j) {
  const int din = j.at("dim_in").get<int>();
  const int dout = j.at("dim_out").get<int>();
  std::vector<Matrix> ks;
  for (const auto& kj : j.at("kraus")) ks.push_back(matrix_from_json(kj, dout, din));
  return KrausChannel::make(std::move(ks));
}

json divergence_result_to_json(const DivergenceResult& r) {
  json j;
  j["value"] = format_double(r.value);
  switch (r.method) {
    case Method::exact_spectral: j["method"] = "exact_spectral"; break;
    case Method::exact_primal_dual: j["method"] = "exact_primal_dual"; break;
    case Method::constructive_bound: j["method"] = "constructive_bound"; break;
    case Method::optimizer: j["method"] = "optimizer"; break;
  }
  if (r.bracket) {
    j["lower"] = format_double(r.bracket->first);
    j["upper"] = format_double(r.bracket->second);
  }
  return j;
}

DensityMatrix load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open state file " + path);
  json j;
  in >> j;
  return state_from_json(j);
}

KrausChannel load_channel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open channel file " + path);
  json j;
  in >> j;
  return channel_from_json(j);
}

void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
}

KrausChannel channel_from_spec_string(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);

  if (head != "depolarizing" && head != "replacer" && head != "classical" && head != "random") {
    std::ifstream probe(text);
    if (probe) return load_channel(text);
    throw IoError("unknown channel constructor or file '" + text + "'");
  }

  std::map<std::string, std::string> kv;
  std::stringstream ss(args);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw IoError("constructor arguments must be key=value");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  auto get = [&](const std::string& key, const std::string& fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  };

  if (head == "depolarizing") {
    const double lambda = std::stod(get("lambda", "0.5"));
    if (kv.count("tau")) return generalized_depolarizing(load_state(kv["tau"]), lambda);
    const int dim = std::stoi(get("dim", "2"));
    Matrix id = Matrix::Identity(dim, dim) / static_cast<double>(dim);
    return generalized_depolarizing(DensityMatrix::make(std::move(id), {dim}), lambda);
  }
  if (head == "replacer") {
    DensityMatrix out = load_state(kv.at("state"));
    const int din = std::stoi(get("dim_in", std::to_string(out.dim())));
    return replacer(out, din);
  }
  if (head == "classical") {
    std::ifstream in(kv.at("matrix"));
    if (!in) throw IoError("cannot open stochastic matrix file");
    json j;
    in >> j;
    const auto rows = j.at("rows").get<int>();
    const auto cols = j.at("cols").get<int>();
    RMatrix s(rows, cols);
    long k = 0;
    for (int i = 0; i < rows; ++i)
      for (int c = 0; c < cols; ++c, ++k) s(i, c) = j.at("data")[k].get<double>();
    return classical_channel_embed(s);
  }
  // random
  const int din = std::stoi(get("dim_in", "2"));
  const int dout = std::stoi(get("dim_out", "2"));
  const int env = std::stoi(get("env", "2"));
  const Seed seed = std::stoull(get("seed", "0"));
  return random_channel(din, dout, env, seed);
}

}  // namespace qdiv
