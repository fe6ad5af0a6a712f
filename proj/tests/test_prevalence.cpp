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

// Desk-scale check of the qualitative ensemble claim: over orthogonal pure
// pairs in the weakly non-Markovian window, three-copy distillation turns a
// majority of cells strictly positive. A reduced optimizer budget is enough
// because the threshold asks only for activation, not for the optimum.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nmdistill/harness.hpp"

using namespace nmdistill;

TEST_CASE("weak-regime activation prevails across an orthogonal ensemble at n = 3") {
  SweepConfig cfg;
  cfg.epsilon_grid = {0.1, 0.2};
  cfg.copy_numbers = {3};
  cfg.ensemble = EnsembleSpec{EnsembleKind::kOrthogonalPure, 20, 90210};
  cfg.optimizer.n_restarts = 2;
  cfg.optimizer.max_iterations = 120;

  const SweepResult result = run_sweep(cfg);
  CHECK(result.errors.empty());
  REQUIRE(result.records.size() == 40);

  int weak_cells = 0;
  int activated = 0;
  for (const auto& r : result.records) {
    REQUIRE(r.regime == "WEAK");
    ++weak_cells;
    CHECK(r.delta_d <= 1e-12);  // no backflow without processing
    if (r.delta_d_prime > 1e-6) ++activated;
  }
  MESSAGE("activated ", activated, " of ", weak_cells, " weak-regime cells");
  CHECK(activated * 2 > weak_cells);
}
