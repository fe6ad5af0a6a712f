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

// Times the OpenMP kernels against their serial reference on representative
// workloads, checking on the way that the two paths agree bit for bit.

#include <chrono>
#include <cstdio>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nmdistill/harness.hpp"
#include "nmdistill/optimizer.hpp"
#include "nmdistill/rng.hpp"

using namespace nmdistill;

namespace {

double time_once(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-34s serial %8.3fs   openmp %8.3fs   speedup %.2fx\n", name, serial, parallel,
              serial / parallel);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp threads: %d\n\n", omp_get_max_threads());
#else
  std::printf("built without openmp: both columns run serial code\n\n");
#endif

  {
    const ProblemInstance inst = make_model_instance(0.1, 3);
    Rng rng(1);
    Eigen::VectorXd theta(inst.param_count());
    for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = rng.gaussian();

    Eigen::VectorXd g_serial, g_parallel;
    const double serial =
        time_once([&] { g_serial = finite_difference_gradient_serial(theta, inst); });
    const double parallel =
        time_once([&] { g_parallel = finite_difference_gradient(theta, inst); });
    if ((g_serial - g_parallel).cwiseAbs().maxCoeff() != 0.0) {
      std::printf("gradient mismatch between serial and openmp paths\n");
      return 1;
    }
    report("finite-difference gradient (n=3)", serial, parallel);
  }

  {
    const ProblemInstance inst = make_model_instance(0.3, 2);
    OptimizerConfig cfg;
    cfg.n_restarts = 8;
    cfg.max_iterations = 150;

    OptimizationResult r_serial, r_parallel;
    const double serial = time_once([&] { r_serial = optimize_serial(inst, cfg); });
    const double parallel = time_once([&] { r_parallel = optimize(inst, cfg); });
    if (r_serial.best_value != r_parallel.best_value) {
      std::printf("optimizer mismatch between serial and openmp paths\n");
      return 1;
    }
    report("multi-start optimize (n=2)", serial, parallel);
  }

  {
    SweepConfig cfg;
    cfg.epsilon_grid = {0.1, 0.2, 0.3, 0.4};
    cfg.copy_numbers = {1, 2};
    cfg.ensemble = EnsembleSpec{EnsembleKind::kOrthogonalPure, 4, 3};
    cfg.optimizer.n_restarts = 2;
    cfg.optimizer.max_iterations = 60;

    SweepResult r_serial, r_parallel;
    const double serial = time_once([&] { r_serial = run_sweep_serial(cfg); });
    const double parallel = time_once([&] { r_parallel = run_sweep(cfg); });
    bool match = r_serial.records.size() == r_parallel.records.size();
    for (std::size_t i = 0; match && i < r_serial.records.size(); ++i) {
      match = r_serial.records[i].delta_d_prime == r_parallel.records[i].delta_d_prime;
    }
    if (!match) {
      std::printf("sweep mismatch between serial and openmp paths\n");
      return 1;
    }
    report("ensemble sweep (32 cells)", serial, parallel);
  }

  return 0;
}
