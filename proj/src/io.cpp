// Copyright 2026 The nmdistill Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nmdistill/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace nmdistill {

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      entries.push_back({m(i, j).real(), m(i, j).imag()});
    }
  }
  return nlohmann::json{{"dim", m.rows()}, {"entries", entries}};
}

Eigen::MatrixXcd matrix_from_json(const nlohmann::json& j) {
  const Eigen::Index dim = j.at("dim").get<Eigen::Index>();
  const auto& entries = j.at("entries");
  if (static_cast<Eigen::Index>(entries.size()) != dim * dim) {
    throw ContractViolation("matrix_from_json: expected " + std::to_string(dim * dim) +
                            " entries, got " + std::to_string(entries.size()));
  }
  Eigen::MatrixXcd m(dim, dim);
  Eigen::Index flat = 0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j2 = 0; j2 < dim; ++j2, ++flat) {
      const auto& e = entries.at(flat);
      m(i, j2) = std::complex<double>(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return m;
}

nlohmann::json state_pair_to_json(const StatePair& pair) {
  return nlohmann::json{{"rho1", matrix_to_json(pair.rho1)}, {"rho2", matrix_to_json(pair.rho2)}};
}

StatePair state_pair_from_json(const nlohmann::json& j) {
  StatePair pair;
  pair.rho1 = matrix_from_json(j.at("rho1"));
  pair.rho2 = matrix_from_json(j.at("rho2"));
  return pair;
}

nlohmann::json pairs_file_to_json(const EnsembleSpec& spec, const std::vector<StatePair>& pairs) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& p : pairs) list.push_back(state_pair_to_json(p));
  return nlohmann::json{{"kind", to_string(spec.kind)},
                        {"n_pairs", spec.n_pairs},
                        {"seed", spec.seed},
                        {"pairs", list}};
}

std::vector<StatePair> pairs_from_json(const nlohmann::json& j) {
  std::vector<StatePair> pairs;
  if (j.contains("pairs")) {
    for (const auto& p : j.at("pairs")) pairs.push_back(state_pair_from_json(p));
  } else {
    pairs.push_back(state_pair_from_json(j));  // single-pair file
  }
  return pairs;
}

nlohmann::json optimizer_config_to_json(const OptimizerConfig& cfg) {
  return nlohmann::json{{"n_restarts", cfg.n_restarts},
                        {"max_iterations", cfg.max_iterations},
                        {"gradient_step", cfg.gradient_step},
                        {"convergence_tol", cfg.convergence_tol},
                        {"seed", cfg.seed},
                        {"param_init_scale", cfg.param_init_scale},
                        {"mode", cfg.mode == ParamMode::kFullUnitary ? "full" : "isometry"}};
}

OptimizerConfig optimizer_config_from_json(const nlohmann::json& j) {
  OptimizerConfig cfg;
  if (j.contains("n_restarts")) cfg.n_restarts = j.at("n_restarts").get<int>();
  if (j.contains("max_iterations")) cfg.max_iterations = j.at("max_iterations").get<int>();
  if (j.contains("gradient_step")) cfg.gradient_step = j.at("gradient_step").get<double>();
  if (j.contains("convergence_tol")) cfg.convergence_tol = j.at("convergence_tol").get<double>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("param_init_scale")) cfg.param_init_scale = j.at("param_init_scale").get<double>();
  if (j.contains("mode")) {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "full") {
      cfg.mode = ParamMode::kFullUnitary;
    } else if (mode == "isometry") {
      cfg.mode = ParamMode::kIsometryBlock;
    } else {
      throw ContractViolation("optimizer config: unknown mode '" + mode +
                              "' (expected full|isometry)");
    }
  }
  cfg.validate();
  return cfg;
}

nlohmann::json sweep_config_to_json(const SweepConfig& cfg) {
  nlohmann::json j{{"epsilon_grid", cfg.epsilon_grid},
                   {"copy_numbers", cfg.copy_numbers},
                   {"optimizer", optimizer_config_to_json(cfg.optimizer)},
                   {"bound_mode", to_string(cfg.bound_mode)},
                   {"dim_r", cfg.dim_r},
                   {"dim_d", cfg.dim_d}};
  if (cfg.ensemble) {
    j["ensemble"] = nlohmann::json{{"kind", to_string(cfg.ensemble->kind)},
                                   {"n_pairs", cfg.ensemble->n_pairs},
                                   {"seed", cfg.ensemble->seed}};
  }
  if (!cfg.fixed_pairs.empty()) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& p : cfg.fixed_pairs) list.push_back(state_pair_to_json(p));
    j["pairs"] = list;
  }
  return j;
}

SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  SweepConfig cfg;
  if (j.contains("epsilon_grid")) {
    const auto& grid = j.at("epsilon_grid");
    if (grid.is_object()) {
      const double lo = grid.at("lo").get<double>();
      const double hi = grid.at("hi").get<double>();
      const int count = grid.at("count").get<int>();
      if (count < 1) throw ContractViolation("epsilon_grid: count must be >= 1");
      for (int i = 0; i < count; ++i) {
        cfg.epsilon_grid.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
      }
    } else {
      cfg.epsilon_grid = grid.get<std::vector<double>>();
    }
  } else {
    cfg.epsilon_grid = default_epsilon_grid();
  }
  if (j.contains("copy_numbers")) cfg.copy_numbers = j.at("copy_numbers").get<std::vector<int>>();
  if (j.contains("ensemble")) {
    const auto& e = j.at("ensemble");
    EnsembleSpec spec;
    spec.kind = ensemble_kind_from_string(e.at("kind").get<std::string>());
    if (e.contains("n_pairs")) spec.n_pairs = e.at("n_pairs").get<int>();
    if (e.contains("seed")) spec.seed = e.at("seed").get<std::uint64_t>();
    cfg.ensemble = spec;
  }
  if (j.contains("pairs")) {
    for (const auto& p : j.at("pairs")) cfg.fixed_pairs.push_back(state_pair_from_json(p));
  }
  if (j.contains("optimizer")) cfg.optimizer = optimizer_config_from_json(j.at("optimizer"));
  if (j.contains("bound_mode")) {
    cfg.bound_mode = bound_mode_from_string(j.at("bound_mode").get<std::string>());
  }
  if (j.contains("dim_r")) cfg.dim_r = j.at("dim_r").get<int>();
  if (j.contains("dim_d")) cfg.dim_d = j.at("dim_d").get<int>();
  cfg.validate();
  return cfg;
}

nlohmann::json optimization_result_to_json(const OptimizationResult& result) {
  nlohmann::json theta = nlohmann::json::array();
  for (Eigen::Index i = 0; i < result.best_theta.size(); ++i) {
    theta.push_back(result.best_theta(i));
  }
  std::vector<bool> converged(result.converged.begin(), result.converged.end());
  return nlohmann::json{{"best_value", result.best_value},
                        {"best_restart", result.best_restart},
                        {"best_theta", theta},
                        {"restart_values", result.restart_values},
                        {"iterations_used", result.iterations_used},
                        {"converged", converged}};
}

nlohmann::json saturation_report_to_json(const SaturationReport& report) {
  nlohmann::json j{{"feasible", report.feasible},
                   {"margin", report.margin},
                   {"delta_eigenvalues", std::vector<double>(
                        report.split.eigenvalues.data(),
                        report.split.eigenvalues.data() + report.split.eigenvalues.size())}};
  if (report.witness_e0) {
    j["witness_e0"] = matrix_to_json(report.witness_e0->matrix());
  } else {
    j["witness_e0"] = nullptr;
  }
  return j;
}

std::string heatmap_sidecar_json(HeatmapMetric metric, int n_copies, const std::vector<int>& pi,
                                 const std::string& metadata_json) {
  nlohmann::json j{{"metric", to_string(metric)},
                   {"n_copies", n_copies},
                   {"pi", pi},
                   {"row_order", "rows follow pi: first data row is the pair with the lowest "
                                 "sorting score"},
                   {"run", nlohmann::json::parse(metadata_json)}};
  return j.dump(2);
}

nlohmann::json sweep_metadata(const SweepConfig& cfg) {
  const nlohmann::json config_json = sweep_config_to_json(cfg);
  nlohmann::json j{{"config", config_json},
                   {"config_hash", fnv1a(config_json.dump())},
                   {"optimizer_seed", cfg.optimizer.seed}};
  if (cfg.ensemble) j["ensemble_seed"] = cfg.ensemble->seed;
  return j;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("read_csv: cannot open " + path);
  }
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  return nlohmann::json::parse(in);
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  out << j.dump(2) << "\n";
}

}  // namespace nmdistill
