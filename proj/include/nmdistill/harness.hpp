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

#ifndef NMDISTILL_HARNESS_HPP
#define NMDISTILL_HARNESS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nmdistill/optimizer.hpp"

namespace nmdistill {

enum class EnsembleKind { kMixed, kRandomPure, kOrthogonalPure };

std::string to_string(EnsembleKind kind);
EnsembleKind ensemble_kind_from_string(const std::string& s);

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::kMixed;
  int n_pairs = 20;
  std::uint64_t seed = 0;
};

struct StatePair {
  Eigen::Matrix2cd rho1;
  Eigen::Matrix2cd rho2;
};

/// Samples n_pairs state pairs. Mixed states are normalized G G^+ with
/// complex standard-Gaussian G (Hilbert-Schmidt measure); pure states are
/// normalized complex Gaussian vectors (Haar); orthogonal pairs are the two
/// columns of a Haar unitary. Pair k depends only on (seed, k), so enlarging
/// an ensemble never changes existing pairs.
std::vector<StatePair> sample_ensemble(const EnsembleSpec& spec);

/// Which bound normalizes the tightness ratio:
///   kGeneral  beta       = min{1, ||A - B||_1} (the effective general bound)
///   kSharp    beta_sharp = min{1, ||A - B||_1 / 2}
enum class BoundMode { kGeneral, kSharp };

std::string to_string(BoundMode mode);
BoundMode bound_mode_from_string(const std::string& s);

struct SweepConfig {
  std::vector<double> epsilon_grid;  // ascending, inside (0, 0.5)
  std::vector<int> copy_numbers;     // subset of {1, 2, 3}
  std::optional<EnsembleSpec> ensemble;
  std::vector<StatePair> fixed_pairs;  // used when no ensemble is given
  OptimizerConfig optimizer;
  BoundMode bound_mode = BoundMode::kGeneral;
  int dim_r = 2;
  int dim_d = 2;

  void validate() const;
};

/// 25 uniform points on [0.02, 0.48] with the singular points of the model
/// (0.25, 0.5) removed.
std::vector<double> default_epsilon_grid();

struct SweepRecord {
  int pair_index;
  double epsilon;
  int n_copies;
  double delta_d;
  double delta_d_prime;  // optimized
  double beta;
  double beta_sharp;
  double tightness;
  double gain;         // delta_d_prime - delta_d
  std::string regime;  // MARKOVIAN / WEAK / ESSENTIAL / SINGULAR
  int best_restart;
  int n_converged;
  long total_iterations;
};

struct SweepError {
  int pair_index;
  double epsilon;
  int n_copies;
  std::string message;
};

struct SweepResult {
  std::vector<SweepRecord> records;
  std::vector<SweepError> errors;
};

/// One record per (pair, epsilon, n) cell. Cells are independent tasks; the
/// per-cell optimizer seed is derived as mix(mix(mix(seed, pair), eps index),
/// n), so results are reproducible cell by cell. Per-cell failures are
/// collected into the error list, never aborting the sweep. Grid points where
/// the first channel is singular carry regime = SINGULAR with full
/// distillation data.
SweepResult run_sweep(const SweepConfig& config);
SweepResult run_sweep_serial(const SweepConfig& config);

/// Per-pair mean tightness of the n = 2 records over the strong-regime grid
/// subset (epsilon > 0.25). Errors when the records contain no such points.
std::vector<double> sorting_score(const std::vector<SweepRecord>& records);

/// Stable ascending permutation: pi[j] is the pair index with the j-th
/// smallest score (ties keep the original order).
std::vector<int> sort_pairs(const std::vector<double>& scores);

/// (best, worst) pair indices at copy number n: per pair take the maximum
/// optimized value over the weak-regime grid (0 < eps < 0.25); best maximizes
/// that inner maximum, worst minimizes it. Ties resolve to the lowest index.
std::pair<int, int> extract_extremes(const std::vector<SweepRecord>& records, int n_copies);

enum class HeatmapMetric { kTightness, kGain, kOptimizedValue };

std::string to_string(HeatmapMetric metric);

/// CSV matrix for one copy number: rows are pairs in pi order (first data row
/// = lowest sorting score), columns the epsilon grid, values at 17
/// significant digits. A companion sidecar at <path>.meta.json records the
/// permutation, the metric and the run metadata passed in. Errors when the
/// records are not rectangular over (pair, epsilon), listing missing cells.
void export_heatmap(const std::vector<SweepRecord>& records, HeatmapMetric metric, int n_copies,
                    const std::vector<int>& pi, const std::string& path,
                    const std::string& metadata_json);

/// Flat CSV of all sweep records.
void export_records_csv(const std::vector<SweepRecord>& records, const std::string& path);

}  // namespace nmdistill

#endif  // NMDISTILL_HARNESS_HPP
