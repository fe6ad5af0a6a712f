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

#include "nmdistill/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "nmdistill/io.hpp"
#include "nmdistill/rng.hpp"

namespace nmdistill {

namespace {

constexpr double kOrthTol = 1e-10;
constexpr double kWeakBoundary = 0.25;
constexpr double kSingularTol = 1e-12;

Eigen::Vector2cd gaussian_vector(Rng& rng) {
  Eigen::Vector2cd v;
  for (int i = 0; i < 2; ++i) {
    const double re = rng.gaussian();
    const double im = rng.gaussian();
    v(i) = std::complex<double>(re, im);
  }
  return v;
}

Eigen::Matrix2cd ginibre(Rng& rng) {
  Eigen::Matrix2cd g;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      g(i, j) = std::complex<double>(rng.gaussian(), rng.gaussian());
    }
  }
  return g;
}

Eigen::Matrix2cd mixed_state(Rng& rng) {
  const Eigen::Matrix2cd g = ginibre(rng);
  Eigen::Matrix2cd rho = g * g.adjoint();
  rho /= rho.trace().real();
  return rho;
}

Eigen::Matrix2cd pure_state(Rng& rng) {
  Eigen::Vector2cd psi = gaussian_vector(rng);
  psi.normalize();
  return psi * psi.adjoint();
}

// Haar 2x2 unitary: Gram-Schmidt of a Ginibre matrix with the diagonal
// phases fixed to the R factor.
Eigen::Matrix2cd haar_unitary(Rng& rng) {
  const Eigen::Matrix2cd g = ginibre(rng);
  Eigen::Vector2cd q0 = g.col(0);
  const double r00 = q0.norm();
  q0 /= r00;
  Eigen::Vector2cd q1 = g.col(1) - q0.dot(g.col(1)) * q0;
  const std::complex<double> r11 = q1.norm();
  q1 /= r11;
  Eigen::Matrix2cd u;
  u.col(0) = q0;
  u.col(1) = q1;
  return u;
}

StatePair sample_pair(EnsembleKind kind, std::uint64_t pair_seed) {
  Rng rng(pair_seed);
  StatePair pair;
  switch (kind) {
    case EnsembleKind::kMixed:
      pair.rho1 = mixed_state(rng);
      pair.rho2 = mixed_state(rng);
      break;
    case EnsembleKind::kRandomPure:
      pair.rho1 = pure_state(rng);
      pair.rho2 = pure_state(rng);
      break;
    case EnsembleKind::kOrthogonalPure: {
      const Eigen::Matrix2cd u = haar_unitary(rng);
      pair.rho1 = u.col(0) * u.col(0).adjoint();
      pair.rho2 = u.col(1) * u.col(1).adjoint();
      break;
    }
  }
  return pair;
}

bool is_singular_epsilon(double epsilon) {
  return std::abs(epsilon - 0.25) <= kSingularTol || std::abs(epsilon - 0.5) <= kSingularTol;
}

}  // namespace

std::string to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::kMixed: return "mixed";
    case EnsembleKind::kRandomPure: return "pure";
    case EnsembleKind::kOrthogonalPure: return "ortho";
  }
  return "unknown";
}

EnsembleKind ensemble_kind_from_string(const std::string& s) {
  if (s == "mixed") return EnsembleKind::kMixed;
  if (s == "pure") return EnsembleKind::kRandomPure;
  if (s == "ortho") return EnsembleKind::kOrthogonalPure;
  throw ContractViolation("unknown ensemble kind '" + s + "' (expected mixed|pure|ortho)");
}

std::string to_string(BoundMode mode) {
  return mode == BoundMode::kGeneral ? "general" : "sharp";
}

BoundMode bound_mode_from_string(const std::string& s) {
  if (s == "general") return BoundMode::kGeneral;
  if (s == "sharp") return BoundMode::kSharp;
  throw ContractViolation("unknown bound mode '" + s + "' (expected general|sharp)");
}

std::vector<StatePair> sample_ensemble(const EnsembleSpec& spec) {
  if (spec.n_pairs < 1) {
    throw ContractViolation("sample_ensemble: n_pairs must be >= 1");
  }
  std::vector<StatePair> pairs;
  pairs.reserve(spec.n_pairs);
  for (int k = 0; k < spec.n_pairs; ++k) {
    StatePair pair = sample_pair(spec.kind, mix_seed(spec.seed, static_cast<std::uint64_t>(k)));
    if (!is_density_matrix(pair.rho1) || !is_density_matrix(pair.rho2)) {
      throw std::logic_error("sample_ensemble: sampled state fails the density-matrix contract");
    }
    if (spec.kind == EnsembleKind::kOrthogonalPure &&
        std::abs((pair.rho1 * pair.rho2).trace()) > kOrthTol) {
      throw std::logic_error("sample_ensemble: orthogonal pair fails the overlap contract");
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

void SweepConfig::validate() const {
  if (epsilon_grid.empty()) {
    throw ContractViolation("SweepConfig: epsilon grid is empty");
  }
  for (std::size_t i = 0; i < epsilon_grid.size(); ++i) {
    const double e = epsilon_grid[i];
    if (!(e > 0.0 && e < 0.5)) {
      throw ContractViolation("SweepConfig: epsilon grid values must lie in (0, 0.5)");
    }
    if (i > 0 && epsilon_grid[i - 1] >= e) {
      throw ContractViolation("SweepConfig: epsilon grid must be strictly ascending");
    }
  }
  for (int n : copy_numbers) {
    if (n < 1 || n > 3) {
      throw ContractViolation("SweepConfig: copy numbers must be a subset of {1, 2, 3}");
    }
  }
  if (ensemble && !fixed_pairs.empty()) {
    throw ContractViolation("SweepConfig: give either an ensemble or fixed pairs, not both");
  }
  if (!ensemble && fixed_pairs.empty()) {
    throw ContractViolation("SweepConfig: no ensemble and no fixed pairs");
  }
  optimizer.validate();
}

std::vector<double> default_epsilon_grid() {
  std::vector<double> grid;
  const int count = 25;
  const double lo = 0.02, hi = 0.48;
  for (int i = 0; i < count; ++i) {
    const double e = lo + (hi - lo) * i / (count - 1);
    if (!is_singular_epsilon(e)) grid.push_back(e);
  }
  return grid;
}

namespace {

SweepResult run_sweep_impl(const SweepConfig& config, bool parallel) {
  config.validate();
  const std::vector<StatePair> pairs =
      config.ensemble ? sample_ensemble(*config.ensemble) : config.fixed_pairs;

  const int n_pairs = static_cast<int>(pairs.size());
  const int n_eps = static_cast<int>(config.epsilon_grid.size());
  const int n_copies_count = static_cast<int>(config.copy_numbers.size());
  const long n_cells = static_cast<long>(n_pairs) * n_eps * n_copies_count;

  std::vector<std::optional<SweepRecord>> slots(n_cells);
  std::vector<std::optional<SweepError>> error_slots(n_cells);

#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (long cell = 0; cell < n_cells; ++cell) {
    const int k = static_cast<int>(cell / (n_eps * n_copies_count));
    const int eps_index = static_cast<int>((cell / n_copies_count) % n_eps);
    const int n = config.copy_numbers[cell % n_copies_count];
    const double epsilon = config.epsilon_grid[eps_index];
    try {
      const auto [lam1, lam2] = model_channels(epsilon);
      const HermitianOperator rho1(pairs[k].rho1);
      const HermitianOperator rho2(pairs[k].rho2);
      const ProblemInstance inst =
          make_instance(lam1, lam2, rho1, rho2, n, config.dim_r, config.dim_d);

      OptimizerConfig cell_cfg = config.optimizer;
      cell_cfg.seed = mix_seed(mix_seed(mix_seed(config.optimizer.seed,
                                                 static_cast<std::uint64_t>(k)),
                                        static_cast<std::uint64_t>(eps_index)),
                               static_cast<std::uint64_t>(n));
      const OptimizationResult opt = optimize(inst, cell_cfg);

      const double delta_d = undistilled_delta_d(lam1, lam2, rho1, rho2);
      const DistillationRecord core = make_distillation_record(
          delta_d, opt.best_value, GeneralBound{inst.beta, inst.beta_sharp}, epsilon, n,
          config.bound_mode == BoundMode::kSharp);

      std::string regime;
      if (is_singular_epsilon(epsilon)) {
        regime = "SINGULAR";
      } else {
        try {
          regime = to_string(classify_regime(epsilon));
        } catch (const NonInvertibleError&) {
          regime = "SINGULAR";
        }
      }

      SweepRecord record;
      record.pair_index = k;
      record.epsilon = epsilon;
      record.n_copies = n;
      record.delta_d = core.delta_d;
      record.delta_d_prime = core.delta_d_prime;
      record.beta = core.beta;
      record.beta_sharp = core.beta_sharp;
      record.tightness = core.tightness;
      record.gain = core.delta_d_prime - core.delta_d;
      record.regime = regime;
      record.best_restart = opt.best_restart;
      record.n_converged = static_cast<int>(
          std::count(opt.converged.begin(), opt.converged.end(), char{1}));
      record.total_iterations =
          std::accumulate(opt.iterations_used.begin(), opt.iterations_used.end(), 0L);
      slots[cell] = std::move(record);
    } catch (const std::exception& e) {
      error_slots[cell] = SweepError{k, epsilon, n, e.what()};
    }
  }

  SweepResult result;
  for (long cell = 0; cell < n_cells; ++cell) {
    if (slots[cell]) result.records.push_back(std::move(*slots[cell]));
    if (error_slots[cell]) result.errors.push_back(std::move(*error_slots[cell]));
  }
  return result;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config) { return run_sweep_impl(config, true); }

SweepResult run_sweep_serial(const SweepConfig& config) { return run_sweep_impl(config, false); }

std::vector<double> sorting_score(const std::vector<SweepRecord>& records) {
  int n_pairs = 0;
  for (const auto& r : records) n_pairs = std::max(n_pairs, r.pair_index + 1);
  if (n_pairs == 0) {
    throw ContractViolation("sorting_score: no records");
  }
  std::vector<double> sum(n_pairs, 0.0);
  std::vector<int> count(n_pairs, 0);
  for (const auto& r : records) {
    if (r.n_copies == 2 && r.epsilon > kWeakBoundary) {
      sum[r.pair_index] += r.tightness;
      count[r.pair_index] += 1;
    }
  }
  std::vector<double> score(n_pairs);
  for (int k = 0; k < n_pairs; ++k) {
    if (count[k] == 0) {
      throw ContractViolation("sorting_score: pair " + std::to_string(k) +
                              " has no strong-regime records at n = 2");
    }
    score[k] = sum[k] / count[k];
  }
  return score;
}

std::vector<int> sort_pairs(const std::vector<double>& scores) {
  std::vector<int> pi(scores.size());
  std::iota(pi.begin(), pi.end(), 0);
  std::stable_sort(pi.begin(), pi.end(),
                   [&scores](int a, int b) { return scores[a] < scores[b]; });
  return pi;
}

std::pair<int, int> extract_extremes(const std::vector<SweepRecord>& records, int n_copies) {
  std::map<int, double> inner_max;
  for (const auto& r : records) {
    if (r.n_copies != n_copies || !(r.epsilon > 0.0 && r.epsilon < kWeakBoundary)) continue;
    auto [it, inserted] = inner_max.try_emplace(r.pair_index, r.delta_d_prime);
    if (!inserted) it->second = std::max(it->second, r.delta_d_prime);
  }
  if (inner_max.empty()) {
    throw ContractViolation("extract_extremes: no weak-regime records at n = " +
                            std::to_string(n_copies));
  }
  int best = -1, worst = -1;
  double best_value = -std::numeric_limits<double>::infinity();
  double worst_value = std::numeric_limits<double>::infinity();
  for (const auto& [k, v] : inner_max) {  // ascending pair index: ties keep lowest
    if (v > best_value) {
      best_value = v;
      best = k;
    }
    if (v < worst_value) {
      worst_value = v;
      worst = k;
    }
  }
  return {best, worst};
}

std::string to_string(HeatmapMetric metric) {
  switch (metric) {
    case HeatmapMetric::kTightness: return "tightness";
    case HeatmapMetric::kGain: return "gain";
    case HeatmapMetric::kOptimizedValue: return "optimized_value";
  }
  return "unknown";
}

void export_heatmap(const std::vector<SweepRecord>& records, HeatmapMetric metric, int n_copies,
                    const std::vector<int>& pi, const std::string& path,
                    const std::string& metadata_json) {
  std::set<double> eps_set;
  std::map<std::pair<int, double>, double> cells;
  int n_pairs = 0;
  for (const auto& r : records) {
    if (r.n_copies != n_copies) continue;
    n_pairs = std::max(n_pairs, r.pair_index + 1);
    eps_set.insert(r.epsilon);
    double value = 0.0;
    switch (metric) {
      case HeatmapMetric::kTightness: value = r.tightness; break;
      case HeatmapMetric::kGain: value = r.gain; break;
      case HeatmapMetric::kOptimizedValue: value = r.delta_d_prime; break;
    }
    cells[{r.pair_index, r.epsilon}] = value;
  }
  if (static_cast<int>(pi.size()) != n_pairs) {
    throw ContractViolation("export_heatmap: permutation length does not match pair count");
  }

  std::string missing;
  for (int k = 0; k < n_pairs; ++k) {
    for (double e : eps_set) {
      if (cells.find({k, e}) == cells.end()) {
        missing += " (pair " + std::to_string(k) + ", eps " + format_double(e) + ")";
      }
    }
  }
  if (!missing.empty()) {
    throw ContractViolation("export_heatmap: missing cells:" + missing);
  }

  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("export_heatmap: cannot open " + path);
  }
  out << "pair_index";
  for (double e : eps_set) out << "," << format_double(e);
  out << "\n";
  for (int row = 0; row < n_pairs; ++row) {
    const int k = pi[row];
    out << k;
    for (double e : eps_set) out << "," << format_double(cells[{k, e}]);
    out << "\n";
  }
  out.close();

  std::ofstream meta(path + ".meta.json");
  if (!meta) {
    throw std::runtime_error("export_heatmap: cannot open " + path + ".meta.json");
  }
  meta << heatmap_sidecar_json(metric, n_copies, pi, metadata_json);
  meta << "\n";
}

void export_records_csv(const std::vector<SweepRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("export_records_csv: cannot open " + path);
  }
  out << "pair_index,epsilon,n_copies,delta_d,delta_d_prime,beta,beta_sharp,tightness,gain,"
         "regime,best_restart,n_converged,total_iterations\n";
  for (const auto& r : records) {
    out << r.pair_index << "," << format_double(r.epsilon) << "," << r.n_copies << ","
        << format_double(r.delta_d) << "," << format_double(r.delta_d_prime) << ","
        << format_double(r.beta) << "," << format_double(r.beta_sharp) << ","
        << format_double(r.tightness) << "," << format_double(r.gain) << "," << r.regime << ","
        << r.best_restart << "," << r.n_converged << "," << r.total_iterations << "\n";
  }
}

}  // namespace nmdistill
