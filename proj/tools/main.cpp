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

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "nmdistill/harness.hpp"
#include "nmdistill/io.hpp"
#include "nmdistill/saturation.hpp"

namespace nmd = nmdistill;

namespace {

struct ClassifyOptions {
  double epsilon = -1.0;
  std::string grid;  // lo:hi:count
  bool json = false;
};

struct OptimizeOptions {
  double epsilon = 0.0;
  int n_copies = 2;
  std::string pair = "builtin:computational";
  int pair_index = 0;
  std::string config_path;
  int dim_r = 2;
  int dim_d = 2;
  std::string output;
};

struct SaturationOptions {
  std::string a_path;
  std::string b_path;
  int out_dim = 2;
  std::string output;
};

struct SweepOptions {
  std::string config_path;
  std::string output_dir = ".";
};

struct SampleOptions {
  std::string kind = "mixed";
  int n_pairs = 20;
  std::uint64_t seed = 0;
  std::string output;
};

std::vector<double> parse_grid_spec(const std::string& spec) {
  const auto first = spec.find(':');
  const auto second = spec.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos) {
    throw nmd::ContractViolation("grid spec must be lo:hi:count, got '" + spec + "'");
  }
  const double lo = std::stod(spec.substr(0, first));
  const double hi = std::stod(spec.substr(first + 1, second - first - 1));
  const int count = std::stoi(spec.substr(second + 1));
  if (count < 1) throw nmd::ContractViolation("grid spec: count must be >= 1");
  std::vector<double> grid;
  for (int i = 0; i < count; ++i) {
    grid.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
  }
  return grid;
}

void emit(const nlohmann::json& j, const std::string& output) {
  if (output.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    nmd::write_json_file(output, j);
  }
}

nmd::StatePair load_pair(const std::string& spec, int index) {
  if (spec == "builtin:computational") {
    nmd::StatePair pair;
    pair.rho1 = Eigen::Matrix2cd::Zero();
    pair.rho1(1, 1) = 1.0;
    pair.rho2 = Eigen::Matrix2cd::Zero();
    pair.rho2(0, 0) = 1.0;
    return pair;
  }
  const auto pairs = nmd::pairs_from_json(nmd::read_json_file(spec));
  if (index < 0 || index >= static_cast<int>(pairs.size())) {
    throw nmd::ContractViolation("pair index " + std::to_string(index) +
                                 " outside the file's " + std::to_string(pairs.size()) +
                                 " pairs");
  }
  return pairs[static_cast<std::size_t>(index)];
}

nlohmann::json classify_point(double epsilon) {
  nlohmann::json row{{"epsilon", epsilon}};
  const auto [lam1, lam2] = nmd::model_channels(epsilon);
  try {
    const nmd::IntermediateMap map = nmd::intermediate_map(lam1, lam2);
    row["regime"] = nmd::to_string(nmd::classify_regime(epsilon));
    row["transfer_eigenvalues"] = {map.transfer_eigenvalues(0), map.transfer_eigenvalues(1),
                                   map.transfer_eigenvalues(2)};
    row["is_positive"] = map.is_positive;
    row["is_cp"] = map.is_cp;
    row["min_choi_eigenvalue"] = map.min_choi_eigenvalue;
  } catch (const nmd::NonInvertibleError& e) {
    row["regime"] = "SINGULAR";
    row["vanishing_axis"] = std::string(1, "xyz"[e.vanishing_axis()]);
  }
  return row;
}

int run_classify(const ClassifyOptions& opt) {
  std::vector<double> points;
  if (!opt.grid.empty()) {
    points = parse_grid_spec(opt.grid);
  } else if (opt.epsilon >= 0.0) {
    points.push_back(opt.epsilon);
  } else {
    throw nmd::ContractViolation("classify: give --epsilon or --grid");
  }

  nlohmann::json table = nlohmann::json::array();
  for (double e : points) table.push_back(classify_point(e));

  if (opt.json) {
    std::cout << table.dump(2) << "\n";
  } else {
    std::cout << "epsilon      regime      positive  cp\n";
    for (const auto& row : table) {
      std::printf("%-12.6g %-11s %-9s %s\n", row.at("epsilon").get<double>(),
                  row.at("regime").get<std::string>().c_str(),
                  row.contains("is_positive")
                      ? (row.at("is_positive").get<bool>() ? "yes" : "no")
                      : "-",
                  row.contains("is_cp") ? (row.at("is_cp").get<bool>() ? "yes" : "no") : "-");
    }
  }
  return 0;
}

int run_optimize(const OptimizeOptions& opt) {
  nmd::OptimizerConfig cfg;
  if (!opt.config_path.empty()) {
    cfg = nmd::optimizer_config_from_json(nmd::read_json_file(opt.config_path));
  }
  const nmd::StatePair pair = load_pair(opt.pair, opt.pair_index);
  const auto [lam1, lam2] = nmd::model_channels(opt.epsilon);
  const nmd::HermitianOperator rho1(pair.rho1);
  const nmd::HermitianOperator rho2(pair.rho2);
  const nmd::ProblemInstance inst =
      nmd::make_instance(lam1, lam2, rho1, rho2, opt.n_copies, opt.dim_r, opt.dim_d);

  const nmd::OptimizationResult result = nmd::optimize(inst, cfg);

  nlohmann::json j = nmd::optimization_result_to_json(result);
  j["epsilon"] = opt.epsilon;
  j["n_copies"] = opt.n_copies;
  j["delta_d"] = nmd::undistilled_delta_d(lam1, lam2, rho1, rho2);
  j["beta"] = inst.beta;
  j["beta_sharp"] = inst.beta_sharp;
  emit(j, opt.output);
  return 0;
}

int run_check_saturation(const SaturationOptions& opt) {
  const nmd::HermitianOperator a(nmd::matrix_from_json(nmd::read_json_file(opt.a_path)));
  const nmd::HermitianOperator b(nmd::matrix_from_json(nmd::read_json_file(opt.b_path)));
  const nmd::SaturationReport report = nmd::saturation_feasible(a, b);
  nlohmann::json j = nmd::saturation_report_to_json(report);
  if (report.feasible) {
    const auto map = nmd::construct_saturating_map(a, b, report, opt.out_dim);
    j["witness_map_effect0"] = nmd::matrix_to_json(map.effect0());
    j["witness_map_out_dim"] = map.out_dim();
  }
  emit(j, opt.output);
  return 0;
}

int run_sweep_cmd(const SweepOptions& opt) {
  const nmd::SweepConfig cfg =
      nmd::sweep_config_from_json(nmd::read_json_file(opt.config_path));
  std::filesystem::create_directories(opt.output_dir);
  const auto path = [&opt](const std::string& name) {
    return (std::filesystem::path(opt.output_dir) / name).string();
  };

  const nmd::SweepResult result = nmd::run_sweep(cfg);
  nmd::export_records_csv(result.records, path("records.csv"));

  // Global row ordering from the n = 2 strong-regime scores; identity when
  // the sweep has no such data.
  int n_pairs = 0;
  for (const auto& r : result.records) n_pairs = std::max(n_pairs, r.pair_index + 1);
  std::vector<int> pi(n_pairs);
  std::string pi_source = "identity (no n = 2 strong-regime records)";
  try {
    pi = nmd::sort_pairs(nmd::sorting_score(result.records));
    pi_source = "ascending n = 2 strong-regime mean tightness";
  } catch (const std::exception&) {
    for (int k = 0; k < n_pairs; ++k) pi[k] = k;
  }

  nlohmann::json metadata = nmd::sweep_metadata(cfg);
  metadata["pi"] = pi;
  metadata["pi_source"] = pi_source;
  nlohmann::json error_list = nlohmann::json::array();
  for (const auto& e : result.errors) {
    error_list.push_back({{"pair_index", e.pair_index},
                          {"epsilon", e.epsilon},
                          {"n_copies", e.n_copies},
                          {"message", e.message}});
  }
  metadata["errors"] = error_list;
  metadata["n_records"] = result.records.size();

  for (int n : cfg.copy_numbers) {
    for (nmd::HeatmapMetric metric :
         {nmd::HeatmapMetric::kTightness, nmd::HeatmapMetric::kGain,
          nmd::HeatmapMetric::kOptimizedValue}) {
      const std::string name =
          "heatmap_" + nmd::to_string(metric) + "_n" + std::to_string(n) + ".csv";
      nmd::export_heatmap(result.records, metric, n, pi, path(name), metadata.dump());
    }
  }
  nmd::write_json_file(path("metadata.json"), metadata);

  std::cout << "wrote " << result.records.size() << " records, "
            << result.errors.size() << " errors to " << opt.output_dir << "\n";
  return 0;
}

int run_sample(const SampleOptions& opt) {
  nmd::EnsembleSpec spec;
  spec.kind = nmd::ensemble_kind_from_string(opt.kind);
  spec.n_pairs = opt.n_pairs;
  spec.seed = opt.seed;
  const auto pairs = nmd::sample_ensemble(spec);
  emit(nmd::pairs_file_to_json(spec, pairs), opt.output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-copy distillation of non-Markovianity: regime classification, "
               "coarse-graining optimization, saturation analysis and ensemble sweeps"};
  app.require_subcommand(1);

  ClassifyOptions classify_opt;
  auto* classify = app.add_subcommand("classify", "Classify the dynamical regime over epsilon");
  classify->add_option("--epsilon", classify_opt.epsilon, "single noise parameter");
  classify->add_option("--grid", classify_opt.grid, "grid spec lo:hi:count");
  classify->add_flag("--json", classify_opt.json, "emit JSON instead of a table");

  OptimizeOptions optimize_opt;
  auto* optimize = app.add_subcommand("optimize", "Maximize the distilled change over the dilation unitary");
  optimize->add_option("--epsilon", optimize_opt.epsilon, "noise parameter")->required();
  optimize->add_option("--n", optimize_opt.n_copies, "number of copies")->required();
  optimize->add_option("--pair", optimize_opt.pair, "pairs file or builtin:computational");
  optimize->add_option("--pair-index", optimize_opt.pair_index, "pair index within the file");
  optimize->add_option("--config", optimize_opt.config_path, "optimizer config JSON file");
  optimize->add_option("--r", optimize_opt.dim_r, "auxiliary dimension");
  optimize->add_option("--d", optimize_opt.dim_d, "output dimension");
  optimize->add_option("--output", optimize_opt.output, "write the result JSON here");

  SaturationOptions saturation_opt;
  auto* saturation = app.add_subcommand("check-saturation", "Saturation feasibility of a traceless Hermitian pair");
  saturation->add_option("--a", saturation_opt.a_path, "operator file A")->required();
  saturation->add_option("--b", saturation_opt.b_path, "operator file B")->required();
  saturation->add_option("--d", saturation_opt.out_dim, "output dimension of the witness map");
  saturation->add_option("--output", saturation_opt.output, "write the report JSON here");

  SweepOptions sweep_opt;
  auto* sweep = app.add_subcommand("sweep", "Ensemble sweep with CSV/JSON exports");
  sweep->add_option("--config", sweep_opt.config_path, "sweep config JSON file")->required();
  sweep->add_option("--output-dir", sweep_opt.output_dir, "directory for the exports");

  SampleOptions sample_opt;
  auto* sample = app.add_subcommand("sample", "Sample a state-pair ensemble");
  sample->add_option("--kind", sample_opt.kind, "mixed|pure|ortho");
  sample->add_option("--n-pairs", sample_opt.n_pairs, "number of pairs");
  sample->add_option("--seed", sample_opt.seed, "ensemble seed");
  sample->add_option("--output", sample_opt.output, "write the pairs file here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*classify) return run_classify(classify_opt);
    if (*optimize) return run_optimize(optimize_opt);
    if (*saturation) return run_check_saturation(saturation_opt);
    if (*sweep) return run_sweep_cmd(sweep_opt);
    if (*sample) return run_sample(sample_opt);
  } catch (const nmd::ContractViolation& e) {
    std::cerr << nlohmann::json{{"error", {{"type", "ContractViolation"}, {"message", e.what()}}}}.dump()
              << "\n";
    return 1;
  } catch (const nmd::NonInvertibleError& e) {
    std::cerr << nlohmann::json{{"error", {{"type", "NonInvertible"}, {"message", e.what()}}}}.dump()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", {{"type", "Error"}, {"message", e.what()}}}}.dump()
              << "\n";
    return 1;
  }
  return 0;
}
