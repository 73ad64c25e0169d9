#include "rmt/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace rmt {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Json dist_to_json(const EntryDistribution& dist) {
  Json params = Json::object();
  if (dist.kind == EntryDistribution::Kind::NonCircularGaussian) {
    params["t"] = dist.t;
    params["theta"] = dist.theta;
  }
  return Json{{"kind", dist.kind_name()}, {"params", params}};
}

EntryDistribution dist_from_json(const Json& j) {
  EntryDistribution d;
  d.kind = EntryDistribution::kind_from_name(j.at("kind").get<std::string>());
  if (d.kind == EntryDistribution::Kind::NonCircularGaussian) {
    const auto& p = j.at("params");
    d.t = p.at("t").get<double>();
    d.theta = p.at("theta").get<double>();
  }
  return d;
}

Json spec_to_json(const ModelSpec& spec) {
  Json j;
  j["N"] = spec.N;
  j["n"] = spec.n;
  j["d"] = std::vector<double>(spec.d.data(), spec.d.data() + spec.d.size());
  j["dtilde"] = std::vector<double>(spec.dtilde.data(),
                                    spec.dtilde.data() + spec.dtilde.size());
  std::vector<double> are, aim;
  are.reserve(spec.N * spec.n);
  aim.reserve(spec.N * spec.n);
  for (int i = 0; i < spec.N; ++i)
    for (int k = 0; k < spec.n; ++k) {
      const Complex a = spec.A.size() ? spec.A(i, k) : Complex{};
      are.push_back(a.real());
      aim.push_back(a.imag());
    }
  j["A_re"] = are;
  j["A_im"] = aim;
  j["dist"] = dist_to_json(spec.dist);
  return j;
}

ModelSpec spec_from_json(const Json& j) {
  ModelSpec spec;
  spec.N = j.at("N").get<int>();
  spec.n = j.at("n").get<int>();
  const auto d = j.at("d").get<std::vector<double>>();
  const auto dt = j.at("dtilde").get<std::vector<double>>();
  spec.d = Eigen::Map<const VectorR>(d.data(), d.size());
  spec.dtilde = Eigen::Map<const VectorR>(dt.data(), dt.size());
  const auto are = j.at("A_re").get<std::vector<double>>();
  const auto aim = j.at("A_im").get<std::vector<double>>();
  if (are.size() != static_cast<std::size_t>(spec.N) * spec.n ||
      aim.size() != are.size())
    throw std::invalid_argument("A_re/A_im must hold N*n row-major entries");
  spec.A.resize(spec.N, spec.n);
  for (int i = 0; i < spec.N; ++i)
    for (int k = 0; k < spec.n; ++k) {
      const std::size_t idx = static_cast<std::size_t>(i) * spec.n + k;
      spec.A(i, k) = Complex(are[idx], aim[idx]);
    }
  spec.dist = dist_from_json(j.at("dist"));
  spec.validate();
  return spec;
}

Json solution_to_json(const EquilibriumSolution& sol) {
  return Json{{"rho", sol.rho},
              {"delta", sol.delta},
              {"delta_tilde", sol.delta_tilde},
              {"iterations", sol.iterations},
              {"residual", sol.residual}};
}

Json report_to_json(const FluctuationReport& r) {
  Json j{{"schema_version", 1},
         {"rho", r.rho},
         {"V", r.V},
         {"gamma", r.gamma},
         {"gamma_tilde", r.gamma_tilde},
         {"gamma_under", {r.gamma_under.real(), r.gamma_under.imag()}},
         {"gamma_tilde_under",
          {r.gamma_tilde_under.real(), r.gamma_tilde_under.imag()}},
         {"Delta", r.Delta},
         {"Delta_under", r.Delta_under},
         {"theta", r.theta},
         {"cumulant_term", r.cumulant_term},
         {"F_n", r.F_n},
         {"M_n", r.M_n},
         {"G_n", r.G_n},
         {"bounds_ok", r.bounds_ok}};
  if (r.bias) j["bias"] = *r.bias;
  return j;
}

Json verdict_to_json(const NormalityVerdict& v) {
  return Json{{"schema_version", 1},
              {"ks_statistic", v.ks_statistic},
              {"ks_threshold", v.ks_threshold},
              {"sample_skewness", v.sample_skewness},
              {"sample_excess_kurtosis", v.sample_excess_kurtosis},
              {"variance_ratio", v.variance_ratio},
              {"ks_pass", v.ks_pass},
              {"variance_pass", v.variance_pass},
              {"pass", v.pass}};
}

Json mc_summary_to_json(const MCResult& r) {
  return Json{{"schema_version", 1},
              {"replicates", r.values.size()},
              {"mean", r.mean},
              {"variance", r.variance},
              {"dim_N", r.dim_N},
              {"rho", r.rho},
              {"config_digest", r.config_digest}};
}

std::string report_csv_header() {
  return "rho,V,gamma,gamma_tilde,Delta,Delta_under,theta,bias\n";
}

std::string report_csv_row(const FluctuationReport& r) {
  std::ostringstream os;
  os << format_double(r.rho) << ',' << format_double(r.V) << ','
     << format_double(r.gamma) << ',' << format_double(r.gamma_tilde) << ','
     << format_double(r.Delta) << ',' << format_double(r.Delta_under) << ','
     << format_double(r.theta) << ',';
  if (r.bias) os << format_double(*r.bias);
  os << '\n';
  return os.str();
}

std::string mc_csv(const MCResult& r) {
  std::ostringstream os;
  os << "index,I_n,standardized\n";
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    os << i << ',' << format_double(r.values[i]) << ',';
    if (i < r.standardized_mean.size())
      os << format_double(r.standardized_mean[i]);
    os << '\n';
  }
  return os.str();
}

void write_matrix_binary(const std::string& path, const MatrixC& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      const double re = m(i, j).real(), im = m(i, j).imag();
      os.write(reinterpret_cast<const char*>(&re), sizeof(re));
      os.write(reinterpret_cast<const char*>(&im), sizeof(im));
    }
}

MatrixC read_matrix_binary(const std::string& path, int rows, int cols) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  MatrixC m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      double re = 0, im = 0;
      is.read(reinterpret_cast<char*>(&re), sizeof(re));
      is.read(reinterpret_cast<char*>(&im), sizeof(im));
      m(i, j) = Complex(re, im);
    }
  if (!is) throw std::runtime_error("short read from " + path);
  return m;
}

std::string qq_csv(const std::vector<std::pair<double, double>>& points) {
  std::ostringstream os;
  os << "theoretical_quantile,empirical_quantile\n";
  for (const auto& [x, y] : points)
    os << format_double(x) << ',' << format_double(y) << '\n';
  return os.str();
}

}  // namespace rmt
