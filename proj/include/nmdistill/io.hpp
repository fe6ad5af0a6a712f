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

#ifndef NMDISTILL_IO_HPP
#define NMDISTILL_IO_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nmdistill/harness.hpp"
#include "nmdistill/saturation.hpp"

namespace nmdistill {

/// Decimal form with 17 significant digits; parses back to the identical
/// double.
std::string format_double(double v);

/// FNV-1a 64-bit; used for stable config hashes in export metadata.
std::uint64_t fnv1a(std::string_view data);

/// Operator file schema: {"dim": n, "entries": [[re, im], ...]} with entries
/// row-major.
nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd matrix_from_json(const nlohmann::json& j);

nlohmann::json state_pair_to_json(const StatePair& pair);
StatePair state_pair_from_json(const nlohmann::json& j);

nlohmann::json pairs_file_to_json(const EnsembleSpec& spec, const std::vector<StatePair>& pairs);
std::vector<StatePair> pairs_from_json(const nlohmann::json& j);

nlohmann::json optimizer_config_to_json(const OptimizerConfig& cfg);
OptimizerConfig optimizer_config_from_json(const nlohmann::json& j);

nlohmann::json sweep_config_to_json(const SweepConfig& cfg);
SweepConfig sweep_config_from_json(const nlohmann::json& j);

nlohmann::json optimization_result_to_json(const OptimizationResult& result);

nlohmann::json saturation_report_to_json(const SaturationReport& report);

std::string heatmap_sidecar_json(HeatmapMetric metric, int n_copies, const std::vector<int>& pi,
                                 const std::string& metadata_json);

/// Run metadata common to all files a sweep emits: the config itself, its
/// hash, and the seeds. Deterministic (no timestamps).
nlohmann::json sweep_metadata(const SweepConfig& cfg);

/// Parses a CSV written by export_heatmap or export_records_csv back into
/// cells; numeric fields parse to bit-identical doubles.
std::vector<std::vector<std::string>> read_csv(const std::string& path);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace nmdistill

#endif  // NMDISTILL_IO_HPP
