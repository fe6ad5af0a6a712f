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

#include "nmdistill/optimizer.hpp"

#include <cmath>
#include <exception>
#include <string>

#include "nmdistill/rng.hpp"

namespace nmdistill {

namespace {

constexpr double kBoundSlack = 1e-9;
constexpr double kInitialStep = 0.1;
constexpr double kMaxStep = 1.0;
constexpr double kMinStep = 1e-13;
constexpr int kMaxStalledIterations = 3;

double checked_objective(const Eigen::VectorXd& theta, const ProblemInstance& inst) {
  const int total = inst.dilation_dim();
  const Eigen::MatrixXcd u = unitary_from_generator(theta, total);
  const Eigen::MatrixXcd w = isometry_from_unitary(u, inst.dim_m(), inst.dim_r, inst.dim_d);
  const double norm_a =
      trace_norm(HermitianOperator(apply_dilation(w, inst.op_a, inst.dim_d)));
  const double norm_b =
      trace_norm(HermitianOperator(apply_dilation(w, inst.op_b, inst.dim_d)));
  const double value = 0.5 * (norm_a - norm_b);
  if (value > inst.beta_sharp + kBoundSlack) {
    throw std::logic_error("objective value " + std::to_string(value) +
                           " exceeds the sharp bound " + std::to_string(inst.beta_sharp));
  }
  return value;
}

std::vector<int> active_coordinates(const ProblemInstance& inst, ParamMode mode) {
  if (mode == ParamMode::kIsometryBlock) {
    return isometry_block_coordinates(inst.dim_m(), inst.dim_r, inst.dim_d);
  }
  std::vector<int> all(inst.param_count());
  for (int i = 0; i < inst.param_count(); ++i) all[i] = i;
  return all;
}

// Central differences restricted to the given coordinates. Serial; restarts
// running in parallel each call their own instance of this.
Eigen::VectorXd masked_gradient(const Eigen::VectorXd& theta, const ProblemInstance& inst,
                                double step, const std::vector<int>& active) {
  Eigen::VectorXd grad(static_cast<Eigen::Index>(active.size()));
  Eigen::VectorXd probe = theta;
  for (std::size_t i = 0; i < active.size(); ++i) {
    const int c = active[i];
    const double saved = probe(c);
    probe(c) = saved + step;
    const double up = checked_objective(probe, inst);
    probe(c) = saved - step;
    const double down = checked_objective(probe, inst);
    probe(c) = saved;
    grad(static_cast<Eigen::Index>(i)) = (up - down) / (2.0 * step);
  }
  return grad;
}

struct RestartOutcome {
  Eigen::VectorXd theta;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

RestartOutcome run_restart(const ProblemInstance& inst, const OptimizerConfig& cfg,
                           int restart_index, const std::vector<int>& active) {
  Eigen::VectorXd theta;
  if (restart_index == 0) {
    theta = swap_seed_theta(inst.n_copies, inst.dim_r, inst.dim_d);
  } else {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(restart_index)));
    theta = Eigen::VectorXd::Zero(inst.param_count());
    for (int c : active) {
      theta(c) = cfg.param_init_scale * rng.gaussian();
    }
  }

  double value = checked_objective(theta, inst);
  double base_step = kInitialStep;
  const double grad_norm_tol = 10.0 * cfg.convergence_tol;
  int stalled = 0;
  int iter = 0;
  bool converged = false;

  for (; iter < cfg.max_iterations; ++iter) {
    const Eigen::VectorXd grad = masked_gradient(theta, inst, cfg.gradient_step, active);
    const double grad_norm = grad.norm();
    if (grad_norm <= grad_norm_tol) {
      converged = true;
      break;
    }

    // Backtracking line search along the normalized ascent direction. Only
    // improving steps are accepted, which is what keeps the method sound at
    // trace-norm kinks (no subgradient machinery).
    double step = base_step;
    bool accepted = false;
    Eigen::VectorXd candidate = theta;
    double candidate_value = value;
    while (step > kMinStep) {
      for (std::size_t i = 0; i < active.size(); ++i) {
        candidate(active[i]) = theta(active[i]) + step * grad(static_cast<Eigen::Index>(i)) / grad_norm;
      }
      candidate_value = checked_objective(candidate, inst);
      if (candidate_value > value) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      break;  // stationary along the gradient direction
    }

    const double improvement = candidate_value - value;
    theta = candidate;
    value = candidate_value;
    base_step = std::min(step * 2.0, kMaxStep);
    if (improvement < cfg.convergence_tol) {
      if (++stalled >= kMaxStalledIterations) break;
    } else {
      stalled = 0;
    }
  }

  return RestartOutcome{std::move(theta), value, iter, converged};
}

OptimizationResult optimize_impl(const ProblemInstance& inst, const OptimizerConfig& cfg,
                                 bool parallel) {
  cfg.validate();
  const std::vector<int> active = active_coordinates(inst, cfg.mode);

  std::vector<RestartOutcome> outcomes(cfg.n_restarts);
  std::vector<std::exception_ptr> failures(cfg.n_restarts);

#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (int r = 0; r < cfg.n_restarts; ++r) {
    try {
      outcomes[r] = run_restart(inst, cfg, r, active);
    } catch (...) {
      failures[r] = std::current_exception();
    }
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  // Deterministic reduction: max by value, ties broken by lowest index.
  int best = 0;
  for (int r = 1; r < cfg.n_restarts; ++r) {
    if (outcomes[r].value > outcomes[best].value) best = r;
  }

  OptimizationResult result;
  result.best_theta = outcomes[best].theta;
  result.best_value = outcomes[best].value;
  result.best_restart = best;
  result.restart_values.reserve(cfg.n_restarts);
  result.iterations_used.reserve(cfg.n_restarts);
  result.converged.reserve(cfg.n_restarts);
  for (const auto& outcome : outcomes) {
    result.restart_values.push_back(outcome.value);
    result.iterations_used.push_back(outcome.iterations);
    result.converged.push_back(outcome.converged ? 1 : 0);
  }
  return result;
}

Eigen::VectorXd gradient_impl(const Eigen::VectorXd& theta, const ProblemInstance& inst,
                              double step, bool parallel) {
  if (theta.size() != inst.param_count()) {
    throw ContractViolation("finite_difference_gradient: parameter length mismatch");
  }
  const Eigen::Index n = theta.size();
  Eigen::VectorXd grad(n);
  std::vector<std::exception_ptr> failures;
  failures.resize(static_cast<std::size_t>(n));

#pragma omp parallel for schedule(static) if (parallel)
  for (Eigen::Index c = 0; c < n; ++c) {
    try {
      Eigen::VectorXd probe = theta;
      probe(c) = theta(c) + step;
      const double up = checked_objective(probe, inst);
      probe(c) = theta(c) - step;
      const double down = checked_objective(probe, inst);
      grad(c) = (up - down) / (2.0 * step);
    } catch (...) {
      failures[static_cast<std::size_t>(c)] = std::current_exception();
    }
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  return grad;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (n_restarts < 1) throw ContractViolation("OptimizerConfig: n_restarts must be >= 1");
  if (max_iterations < 1) throw ContractViolation("OptimizerConfig: max_iterations must be >= 1");
  if (gradient_step < 1e-8 || gradient_step > 1e-2) {
    throw ContractViolation("OptimizerConfig: gradient_step must lie in [1e-8, 1e-2]");
  }
  if (convergence_tol <= 0.0) throw ContractViolation("OptimizerConfig: convergence_tol must be positive");
  if (param_init_scale <= 0.0) throw ContractViolation("OptimizerConfig: param_init_scale must be positive");
}

ProblemInstance make_instance(const PauliChannel& lam1, const PauliChannel& lam2,
                              const HermitianOperator& rho1, const HermitianOperator& rho2,
                              int n_copies, int dim_r, int dim_d) {
  if (dim_d < 2 || dim_r < 1 || dim_r > dim_d) {
    throw ContractViolation("make_instance: dilation dimensions must satisfy 1 <= r <= d, d >= 2");
  }
  const GeneralBound bound = general_bound(lam1, lam2, rho1, rho2, n_copies);
  ProblemInstance inst{lam1,
                       lam2,
                       rho1.matrix(),
                       rho2.matrix(),
                       n_copies,
                       dim_r,
                       dim_d,
                       difference_operator(lam2, rho1, rho2, n_copies).matrix(),
                       difference_operator(lam1, rho1, rho2, n_copies).matrix(),
                       bound.beta,
                       bound.beta_sharp};
  return inst;
}

ProblemInstance make_model_instance(double epsilon, int n_copies, int dim_r, int dim_d) {
  const auto [lam1, lam2] = model_channels(epsilon);
  Eigen::Matrix2cd ket1 = Eigen::Matrix2cd::Zero();
  ket1(1, 1) = 1.0;  // |1><1|
  Eigen::Matrix2cd ket0 = Eigen::Matrix2cd::Zero();
  ket0(0, 0) = 1.0;  // |0><0|
  return make_instance(lam1, lam2, HermitianOperator(ket1), HermitianOperator(ket0), n_copies,
                       dim_r, dim_d);
}

double objective(const Eigen::VectorXd& theta, const ProblemInstance& inst) {
  if (theta.size() != inst.param_count()) {
    throw ContractViolation("objective: expected " + std::to_string(inst.param_count()) +
                            " parameters, got " + std::to_string(theta.size()));
  }
  return checked_objective(theta, inst);
}

Eigen::VectorXd finite_difference_gradient(const Eigen::VectorXd& theta,
                                           const ProblemInstance& inst, double step) {
  return gradient_impl(theta, inst, step, true);
}

Eigen::VectorXd finite_difference_gradient_serial(const Eigen::VectorXd& theta,
                                                  const ProblemInstance& inst, double step) {
  return gradient_impl(theta, inst, step, false);
}

OptimizationResult optimize(const ProblemInstance& inst, const OptimizerConfig& cfg) {
  return optimize_impl(inst, cfg, true);
}

OptimizationResult optimize_serial(const ProblemInstance& inst, const OptimizerConfig& cfg) {
  return optimize_impl(inst, cfg, false);
}

Eigen::VectorXd swap_seed_theta(int n_copies, int dim_r, int dim_d) {
  if (n_copies < 1 || dim_r < 1 || dim_d < 2) {
    throw ContractViolation("swap_seed_theta: requires n_copies >= 1, r >= 1, d >= 2");
  }
  const int m = 1 << n_copies;
  const int total = m * dim_r * dim_d;
  const double half_pi = 1.5707963267948966192313216916398;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(total, total);
  // One transposition per tail bitstring of the remaining copies: route the
  // first system qubit into the output factor. exp(i pi P) with P the
  // projector onto the antisymmetric combinations realizes the permutation.
  const int tails = 1 << (n_copies - 1);
  for (int tail = 0; tail < tails; ++tail) {
    const int from = (tails + tail) * dim_r * dim_d;  // first qubit 1, ancillas |0>
    const int to = tail * dim_r * dim_d + 1;          // first qubit 0, output |1>
    h(from, from) += half_pi;
    h(to, to) += half_pi;
    h(from, to) -= half_pi;
    h(to, from) -= half_pi;
  }
  return parameters_from_hermitian(h);
}

std::vector<int> isometry_block_coordinates(int dim_m, int dim_r, int dim_d) {
  const int total = dim_m * dim_r * dim_d;
  const int n_pairs = total * (total - 1) / 2;
  std::vector<bool> in_block(total, false);
  for (int c = 0; c < dim_m; ++c) in_block[c * dim_r * dim_d] = true;

  std::vector<int> active;
  for (int j = 0; j < total; ++j) active.push_back(j);  // diagonal phases
  std::vector<int> imag_part;
  for (int j = 0; j < total; ++j) {
    for (int k = j + 1; k < total; ++k) {
      if (!in_block[j] && !in_block[k]) continue;
      const int p = pair_rank(j, k, total);
      active.push_back(total + p);
      imag_part.push_back(total + n_pairs + p);
    }
  }
  active.insert(active.end(), imag_part.begin(), imag_part.end());
  return active;
}

}  // namespace nmdistill
