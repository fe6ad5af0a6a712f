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

#ifndef NMDISTILL_OPTIMIZER_HPP
#define NMDISTILL_OPTIMIZER_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "nmdistill/distill.hpp"

namespace nmdistill {

/// Search space for the dilation unitary.
///   kFullUnitary    all (m r d)^2 generator coordinates
///   kIsometryBlock  only coordinates whose generator entries touch the
///                   embedded input block (plus the diagonal phases). The
///                   induced map depends on U only through the isometry
///                   V = U (I (x) |0><0|), and geodesics of the isometry
///                   manifold are generated by exactly these coordinates, so
///                   the reachable set of maps is unchanged while the
///                   parameter count drops from (m r d)^2 to about
///                   2 m^2 r d. Values agree with kFullUnitary within 1e-6
///                   on the analytical anchor instances (enforced in tests).
enum class ParamMode { kFullUnitary, kIsometryBlock };

struct OptimizerConfig {
  int n_restarts = 16;
  int max_iterations = 500;
  double gradient_step = 1e-5;
  double convergence_tol = 1e-8;
  std::uint64_t seed = 0;
  double param_init_scale = 1.0;
  ParamMode mode = ParamMode::kIsometryBlock;

  void validate() const;  // throws ContractViolation
};

/// One optimization instance: the channel pair, the state pair, the copy
/// number and dilation dimensions, with the loop-invariant difference
/// operators and bounds precomputed (the coarse-graining is the only
/// theta-dependent step of an objective evaluation).
struct ProblemInstance {
  PauliChannel lam1;
  PauliChannel lam2;
  Eigen::Matrix2cd rho1;
  Eigen::Matrix2cd rho2;
  int n_copies;
  int dim_r;
  int dim_d;
  Eigen::MatrixXcd op_a;  // lam2-evolved n-copy difference
  Eigen::MatrixXcd op_b;  // lam1-evolved n-copy difference
  double beta;
  double beta_sharp;

  int dim_m() const { return 1 << n_copies; }
  int dilation_dim() const { return dim_m() * dim_r * dim_d; }
  int param_count() const { return dilation_dim() * dilation_dim(); }
};

ProblemInstance make_instance(const PauliChannel& lam1, const PauliChannel& lam2,
                              const HermitianOperator& rho1, const HermitianOperator& rho2,
                              int n_copies, int dim_r = 2, int dim_d = 2);

/// The computational-basis state pair instance for the two-step model.
ProblemInstance make_model_instance(double epsilon, int n_copies, int dim_r = 2, int dim_d = 2);

/// Distilled distinguishability change of the coarse-graining defined by
/// theta, for the given instance. Deterministic; every evaluation is checked
/// against the instance's sharp bound (violation beyond 1e-9 indicates a
/// defect and throws).
double objective(const Eigen::VectorXd& theta, const ProblemInstance& inst);

/// Central finite differences of the objective over all parameters.
Eigen::VectorXd finite_difference_gradient(const Eigen::VectorXd& theta,
                                           const ProblemInstance& inst, double step = 1e-5);
Eigen::VectorXd finite_difference_gradient_serial(const Eigen::VectorXd& theta,
                                                  const ProblemInstance& inst,
                                                  double step = 1e-5);

struct OptimizationResult {
  Eigen::VectorXd best_theta;  // always full (m r d)^2 length
  double best_value;
  int best_restart;
  std::vector<double> restart_values;
  std::vector<int> iterations_used;
  std::vector<char> converged;  // per restart: gradient-norm certificate met
};

/// Multi-start gradient ascent with backtracking line search over the
/// dilation-unitary parameters. Restart 0 starts from the deterministic
/// copy-extraction seed (see swap_seed_theta); the remaining restarts start
/// from param_init_scale-scaled Gaussian coordinates. Deterministic given
/// the config seed; restarts are independent. Non-convergence is reported in
/// the result, never raised.
OptimizationResult optimize(const ProblemInstance& inst, const OptimizerConfig& cfg);
OptimizationResult optimize_serial(const ProblemInstance& inst, const OptimizerConfig& cfg);

/// Generator parameters of the permutation unitary that routes the first
/// system qubit into the output factor (and |0> into its place). The induced
/// map keeps the first copy and discards the rest; for n_copies = 1 it is the
/// identity map, so the objective at this seed equals the undistilled change.
Eigen::VectorXd swap_seed_theta(int n_copies, int dim_r, int dim_d);

/// Active coordinate indices of the kIsometryBlock search space.
std::vector<int> isometry_block_coordinates(int dim_m, int dim_r, int dim_d);

}  // namespace nmdistill

#endif  // NMDISTILL_OPTIMIZER_HPP
