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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "nmdistill/harness.hpp"
#include "nmdistill/io.hpp"
#include "test_support.hpp"

using namespace nmdistill;

namespace {

StatePair computational_pair() {
  StatePair pair;
  pair.rho1 = Eigen::Matrix2cd::Zero();
  pair.rho1(1, 1) = 1.0;
  pair.rho2 = Eigen::Matrix2cd::Zero();
  pair.rho2(0, 0) = 1.0;
  return pair;
}

OptimizerConfig tiny_optimizer() {
  OptimizerConfig cfg;
  cfg.n_restarts = 2;
  cfg.max_iterations = 60;
  return cfg;
}

SweepRecord synthetic_record(int pair, double eps, int n, double tightness,
                             double delta_d_prime = 0.0) {
  SweepRecord r{};
  r.pair_index = pair;
  r.epsilon = eps;
  r.n_copies = n;
  r.tightness = tightness;
  r.delta_d_prime = delta_d_prime;
  r.regime = eps < 0.25 ? "WEAK" : "ESSENTIAL";
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("nmdistill_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("sample_ensemble contracts per kind") {
  SUBCASE("orthogonal pure pairs have unit trace distance") {
    const auto pairs = sample_ensemble({EnsembleKind::kOrthogonalPure, 25, 7});
    for (const auto& p : pairs) {
      const double distance = 0.5 * trace_norm(HermitianOperator(p.rho2 - p.rho1));
      CHECK(distance == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(std::abs((p.rho1 * p.rho2).trace()) < 1e-10);
    }
  }
  SUBCASE("random pure states have unit purity") {
    const auto pairs = sample_ensemble({EnsembleKind::kRandomPure, 25, 7});
    for (const auto& p : pairs) {
      CHECK((p.rho1 * p.rho1).trace().real() == doctest::Approx(1.0).epsilon(1e-10));
      CHECK((p.rho2 * p.rho2).trace().real() == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
  SUBCASE("mixed states are genuinely mixed on average") {
    const auto pairs = sample_ensemble({EnsembleKind::kMixed, 100, 7});
    double purity = 0.0;
    for (const auto& p : pairs) {
      purity += (p.rho1 * p.rho1).trace().real() + (p.rho2 * p.rho2).trace().real();
    }
    purity /= 200.0;
    CHECK(purity < 0.99);
    CHECK(purity > 0.5);
  }
  SUBCASE("deterministic and prefix-stable") {
    const auto small = sample_ensemble({EnsembleKind::kMixed, 5, 99});
    const auto large = sample_ensemble({EnsembleKind::kMixed, 10, 99});
    for (int k = 0; k < 5; ++k) {
      CHECK((small[k].rho1 - large[k].rho1).cwiseAbs().maxCoeff() == 0.0);
      CHECK((small[k].rho2 - large[k].rho2).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("run_sweep composition and flags") {
  SUBCASE("single-cell sweep matches the direct computation") {
    SweepConfig cfg;
    cfg.epsilon_grid = {0.3};
    cfg.copy_numbers = {1};
    cfg.fixed_pairs = {computational_pair()};
    cfg.optimizer = tiny_optimizer();
    const SweepResult result = run_sweep(cfg);
    REQUIRE(result.records.size() == 1);
    CHECK(result.errors.empty());
    const SweepRecord& r = result.records[0];
    CHECK(r.delta_d == doctest::Approx(0.12).epsilon(1e-12));
    CHECK(r.regime == "ESSENTIAL");
    CHECK(r.beta == doctest::Approx(0.24).epsilon(1e-12));
    CHECK(r.gain == doctest::Approx(r.delta_d_prime - r.delta_d).epsilon(1e-12));
  }
  SUBCASE("anchor values on a two-point grid") {
    SweepConfig cfg;
    cfg.epsilon_grid = {0.1, 0.3};
    cfg.copy_numbers = {2};
    cfg.fixed_pairs = {computational_pair()};
    cfg.optimizer = tiny_optimizer();
    cfg.optimizer.n_restarts = 4;
    cfg.optimizer.max_iterations = 300;
    const SweepResult result = run_sweep(cfg);
    REQUIRE(result.records.size() == 2);
    CHECK(result.records[0].epsilon == doctest::Approx(0.1));
    CHECK(result.records[0].delta_d_prime <= 1e-4);
    CHECK(result.records[1].delta_d_prime == doctest::Approx(0.12).epsilon(1e-2));
  }
  SUBCASE("empty copy numbers yield no records") {
    SweepConfig cfg;
    cfg.epsilon_grid = {0.3};
    cfg.copy_numbers = {};
    cfg.fixed_pairs = {computational_pair()};
    cfg.optimizer = tiny_optimizer();
    CHECK(run_sweep(cfg).records.empty());
  }
  SUBCASE("singular grid point is flagged but fully computed") {
    SweepConfig cfg;
    cfg.epsilon_grid = {0.25};
    cfg.copy_numbers = {1};
    cfg.fixed_pairs = {computational_pair()};
    cfg.optimizer = tiny_optimizer();
    const SweepResult result = run_sweep(cfg);
    REQUIRE(result.records.size() == 1);
    CHECK(result.errors.empty());
    CHECK(result.records[0].regime == "SINGULAR");
    // the two model steps coincide at eps = 0.25, so every distillation
    // quantity is exactly zero there
    CHECK(result.records[0].beta == doctest::Approx(0.0));
    CHECK(result.records[0].delta_d == doctest::Approx(0.0));
  }
  SUBCASE("per-pair results do not depend on the other pairs") {
    Rng rng(401);
    const StatePair a = computational_pair();
    StatePair b;
    b.rho1 = test::random_density(rng, 2);
    b.rho2 = test::random_density(rng, 2);
    StatePair c;
    c.rho1 = test::random_density(rng, 2);
    c.rho2 = test::random_density(rng, 2);

    SweepConfig cfg;
    cfg.epsilon_grid = {0.3};
    cfg.copy_numbers = {1};
    cfg.optimizer = tiny_optimizer();
    cfg.fixed_pairs = {a, b};
    const SweepResult ab = run_sweep(cfg);
    cfg.fixed_pairs = {a, c};
    const SweepResult ac = run_sweep(cfg);
    REQUIRE(ab.records.size() == 2);
    REQUIRE(ac.records.size() == 2);
    CHECK(ab.records[0].delta_d_prime == ac.records[0].delta_d_prime);
    CHECK(ab.records[0].tightness == ac.records[0].tightness);
  }
  SUBCASE("config validation") {
    SweepConfig cfg;
    cfg.epsilon_grid = {0.3, 0.1};  // not ascending
    cfg.copy_numbers = {1};
    cfg.fixed_pairs = {computational_pair()};
    CHECK_THROWS_AS(cfg.validate(), ContractViolation);
    cfg.epsilon_grid = {0.1, 0.3};
    cfg.copy_numbers = {4};
    CHECK_THROWS_AS(cfg.validate(), ContractViolation);
    cfg.copy_numbers = {1};
    cfg.fixed_pairs.clear();
    CHECK_THROWS_AS(cfg.validate(), ContractViolation);
  }
}

TEST_CASE("sorting_score arithmetic") {
  SUBCASE("constant tightness per pair") {
    std::vector<SweepRecord> records{synthetic_record(0, 0.3, 2, 0.7),
                                     synthetic_record(0, 0.4, 2, 0.7),
                                     synthetic_record(1, 0.3, 2, 0.2),
                                     synthetic_record(1, 0.4, 2, 0.2)};
    const auto s = sorting_score(records);
    CHECK(s[0] == doctest::Approx(0.7));
    CHECK(s[1] == doctest::Approx(0.2));
  }
  SUBCASE("two strong-regime points average") {
    std::vector<SweepRecord> records{synthetic_record(0, 0.3, 2, 0.2),
                                     synthetic_record(0, 0.4, 2, 0.6)};
    CHECK(sorting_score(records)[0] == doctest::Approx(0.4));
  }
  SUBCASE("weak-regime and other-n records are ignored") {
    std::vector<SweepRecord> records{synthetic_record(0, 0.3, 2, 0.5),
                                     synthetic_record(0, 0.1, 2, 99.0),
                                     synthetic_record(0, 0.3, 3, 77.0)};
    CHECK(sorting_score(records)[0] == doctest::Approx(0.5));
  }
  SUBCASE("errors without strong-regime points") {
    std::vector<SweepRecord> records{synthetic_record(0, 0.1, 2, 0.5)};
    CHECK_THROWS_AS(sorting_score(records), ContractViolation);
  }
}

TEST_CASE("sort_pairs permutation") {
  CHECK(sort_pairs({0.3, 0.1, 0.2}) == std::vector<int>{1, 2, 0});
  CHECK(sort_pairs({0.5, 0.5, 0.5}) == std::vector<int>{0, 1, 2});  // stable ties
  CHECK(sort_pairs({0.1, 0.2, 0.3}) == std::vector<int>{0, 1, 2});
}

TEST_CASE("extract_extremes") {
  SUBCASE("single pair") {
    std::vector<SweepRecord> records{synthetic_record(0, 0.1, 2, 0.0, 0.05)};
    CHECK(extract_extremes(records, 2) == std::pair<int, int>{0, 0});
  }
  SUBCASE("best and worst by inner maximum") {
    std::vector<SweepRecord> records{synthetic_record(0, 0.1, 2, 0.0, 0.01),
                                     synthetic_record(1, 0.1, 2, 0.0, 0.2)};
    CHECK(extract_extremes(records, 2) == std::pair<int, int>{1, 0});
  }
  SUBCASE("strong-regime records never influence the result") {
    std::vector<SweepRecord> records{synthetic_record(0, 0.1, 2, 0.0, 0.01),
                                     synthetic_record(1, 0.1, 2, 0.0, 0.2)};
    auto mutated = records;
    mutated.push_back(synthetic_record(0, 0.3, 2, 0.0, 99.0));
    CHECK(extract_extremes(mutated, 2) == extract_extremes(records, 2));
  }
  SUBCASE("errors without weak-regime points") {
    std::vector<SweepRecord> records{synthetic_record(0, 0.3, 2, 0.0, 0.01)};
    CHECK_THROWS_AS(extract_extremes(records, 2), ContractViolation);
  }
}

TEST_CASE("heatmap export round trip and ordering contract") {
  TempDir dir;
  SweepConfig cfg;
  cfg.epsilon_grid = {0.1, 0.3, 0.4};
  cfg.copy_numbers = {2};
  cfg.ensemble = EnsembleSpec{EnsembleKind::kOrthogonalPure, 3, 5};
  cfg.optimizer = tiny_optimizer();
  const SweepResult result = run_sweep(cfg);
  REQUIRE(result.records.size() == 9);

  const auto scores = sorting_score(result.records);
  const auto pi = sort_pairs(scores);
  const std::string metadata = sweep_metadata(cfg).dump();

  for (HeatmapMetric metric :
       {HeatmapMetric::kTightness, HeatmapMetric::kGain, HeatmapMetric::kOptimizedValue}) {
    export_heatmap(result.records, metric, 2, pi,
                   dir.file("map_" + to_string(metric) + ".csv"), metadata);
  }

  // identical row labels across metrics
  std::vector<std::vector<std::string>> first_col;
  for (HeatmapMetric metric :
       {HeatmapMetric::kTightness, HeatmapMetric::kGain, HeatmapMetric::kOptimizedValue}) {
    const auto rows = read_csv(dir.file("map_" + to_string(metric) + ".csv"));
    REQUIRE(rows.size() == 4);  // header + 3 pairs
    std::vector<std::string> labels;
    for (std::size_t i = 1; i < rows.size(); ++i) labels.push_back(rows[i][0]);
    first_col.push_back(labels);
  }
  CHECK(first_col[0] == first_col[1]);
  CHECK(first_col[0] == first_col[2]);

  // values parse back bit-exactly
  const auto rows = read_csv(dir.file("map_optimized_value.csv"));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const int pair = std::stoi(rows[i][0]);
    CHECK(pair == pi[i - 1]);
    for (std::size_t j = 1; j < rows[i].size(); ++j) {
      const double eps = std::stod(rows[0][j]);
      const double value = std::stod(rows[i][j]);
      bool found = false;
      for (const auto& r : result.records) {
        if (r.pair_index == pair && r.epsilon == eps && r.n_copies == 2) {
          CHECK(r.delta_d_prime == value);  // bit-exact
          found = true;
        }
      }
      CHECK(found);
    }
  }

  // sidecar carries the permutation
  const auto sidecar = read_json_file(dir.file("map_gain.csv.meta.json"));
  CHECK(sidecar.at("pi").get<std::vector<int>>() == pi);
  CHECK(sidecar.at("n_copies").get<int>() == 2);

  // missing cells are an error
  auto truncated = result.records;
  truncated.pop_back();
  CHECK_THROWS_AS(export_heatmap(truncated, HeatmapMetric::kGain, 2, pi,
                                 dir.file("bad.csv"), metadata),
                  ContractViolation);
}

TEST_CASE("single-cell heatmap") {
  TempDir dir;
  std::vector<SweepRecord> records{synthetic_record(0, 0.3, 2, 0.5, 0.1)};
  export_heatmap(records, HeatmapMetric::kTightness, 2, {0}, dir.file("one.csv"), "{}");
  const auto rows = read_csv(dir.file("one.csv"));
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[1].size() == 2);
  CHECK(std::stod(rows[1][1]) == 0.5);
}

TEST_CASE("records CSV round trip") {
  TempDir dir;
  SweepConfig cfg;
  cfg.epsilon_grid = {0.1, 0.3};
  cfg.copy_numbers = {1};
  cfg.fixed_pairs = {computational_pair()};
  cfg.optimizer = tiny_optimizer();
  const SweepResult result = run_sweep(cfg);
  export_records_csv(result.records, dir.file("records.csv"));
  const auto rows = read_csv(dir.file("records.csv"));
  REQUIRE(rows.size() == result.records.size() + 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const SweepRecord& r = result.records[i - 1];
    CHECK(std::stod(rows[i][1]) == r.epsilon);
    CHECK(std::stod(rows[i][3]) == r.delta_d);
    CHECK(std::stod(rows[i][4]) == r.delta_d_prime);
    CHECK(rows[i][9] == r.regime);
  }
}

TEST_CASE("byte-identical repeated exports") {
  TempDir dir;
  SweepConfig cfg;
  cfg.epsilon_grid = {0.1, 0.3};
  cfg.copy_numbers = {2};
  cfg.ensemble = EnsembleSpec{EnsembleKind::kMixed, 2, 11};
  cfg.optimizer = tiny_optimizer();

  for (int run = 0; run < 2; ++run) {
    const SweepResult result = run_sweep(cfg);
    export_records_csv(result.records, dir.file("records_" + std::to_string(run) + ".csv"));
    const auto scores = sorting_score(result.records);
    export_heatmap(result.records, HeatmapMetric::kTightness, 2, sort_pairs(scores),
                   dir.file("map_" + std::to_string(run) + ".csv"),
                   sweep_metadata(cfg).dump());
  }
  CHECK(slurp(dir.file("records_0.csv")) == slurp(dir.file("records_1.csv")));
  CHECK(slurp(dir.file("map_0.csv")) == slurp(dir.file("map_1.csv")));
  CHECK(slurp(dir.file("map_0.csv.meta.json")) == slurp(dir.file("map_1.csv.meta.json")));
}

TEST_CASE("io conversions round trip") {
  SUBCASE("matrices") {
    Rng rng(501);
    const Eigen::MatrixXcd m = test::random_complex(rng, 3);
    const Eigen::MatrixXcd back = matrix_from_json(matrix_to_json(m));
    CHECK((m - back).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("format_double is exact") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 2.5e17, -0.12, 0.0}) {
      CHECK(std::stod(format_double(v)) == v);
    }
  }
  SUBCASE("optimizer config") {
    OptimizerConfig cfg;
    cfg.n_restarts = 7;
    cfg.seed = 1234567890123ull;
    cfg.mode = ParamMode::kFullUnitary;
    const OptimizerConfig back = optimizer_config_from_json(optimizer_config_to_json(cfg));
    CHECK(back.n_restarts == 7);
    CHECK(back.seed == cfg.seed);
    CHECK(back.mode == ParamMode::kFullUnitary);
  }
  SUBCASE("sweep config with ensemble") {
    SweepConfig cfg;
    cfg.epsilon_grid = {0.1, 0.2};
    cfg.copy_numbers = {1, 2};
    cfg.ensemble = EnsembleSpec{EnsembleKind::kOrthogonalPure, 4, 17};
    cfg.bound_mode = BoundMode::kSharp;
    const SweepConfig back = sweep_config_from_json(sweep_config_to_json(cfg));
    CHECK(back.epsilon_grid == cfg.epsilon_grid);
    CHECK(back.ensemble->kind == EnsembleKind::kOrthogonalPure);
    CHECK(back.ensemble->seed == 17);
    CHECK(back.bound_mode == BoundMode::kSharp);
  }
  SUBCASE("grid specification object") {
    const auto j = nlohmann::json::parse(
        R"({"epsilon_grid": {"lo": 0.1, "hi": 0.2, "count": 3},
            "copy_numbers": [1],
            "ensemble": {"kind": "mixed", "n_pairs": 1, "seed": 0}})");
    const SweepConfig cfg = sweep_config_from_json(j);
    REQUIRE(cfg.epsilon_grid.size() == 3);
    CHECK(cfg.epsilon_grid[1] == doctest::Approx(0.15));
  }
  SUBCASE("pairs file") {
    const auto pairs = sample_ensemble({EnsembleKind::kMixed, 3, 23});
    const auto j = pairs_file_to_json({EnsembleKind::kMixed, 3, 23}, pairs);
    const auto back = pairs_from_json(j);
    REQUIRE(back.size() == 3);
    CHECK((back[1].rho1 - pairs[1].rho1).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("default epsilon grid avoids the singular points") {
  const auto grid = default_epsilon_grid();
  CHECK(grid.size() == 24);  // one of 25 uniform points lands on 0.25
  for (double e : grid) {
    CHECK(e > 0.0);
    CHECK(e < 0.5);
    CHECK(std::abs(e - 0.25) > 1e-12);
  }
}
