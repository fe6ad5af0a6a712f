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

#include "nmdistill/distill.hpp"

#include <cmath>
#include <string>

namespace nmdistill {

namespace {

constexpr double kUnitaryTol = 1e-10;
constexpr double kChoiPsdTol = 1e-9;
constexpr double kTracePreserveTol = 1e-10;
constexpr double kRecordTol = 1e-9;
constexpr double kRangeTol = 1e-12;

}  // namespace

CoarseGrainer::CoarseGrainer(int n_copies, int dim_r, int dim_d, Eigen::VectorXd theta)
    : n_copies_(n_copies), dim_r_(dim_r), dim_d_(dim_d), theta_(std::move(theta)) {
  if (n_copies_ < 1) {
    throw ContractViolation("CoarseGrainer: n_copies must be >= 1");
  }
  if (dim_r_ < 1 || dim_r_ > dim_d_) {
    throw ContractViolation("CoarseGrainer: auxiliary dimension must satisfy 1 <= r <= d");
  }
  const int total = dilation_dim();
  if (theta_.size() != static_cast<Eigen::Index>(total) * total) {
    throw ContractViolation("CoarseGrainer: expected " + std::to_string(total * total) +
                            " parameters, got " + std::to_string(theta_.size()));
  }
  unitary_ = unitary_from_generator(theta_, total);
  if ((unitary_.adjoint() * unitary_ - Eigen::MatrixXcd::Identity(total, total))
          .cwiseAbs()
          .maxCoeff() > kUnitaryTol) {
    throw ContractViolation("CoarseGrainer: derived unitary fails U^+ U = I");
  }
  isometry_ = isometry_from_unitary(unitary_, dim_m(), dim_r_, dim_d_);

  // The dilation construction guarantees a CPTP map; this check guards the
  // implementation. Choi built column-by-column from the isometry.
  const int m = dim_m();
  Eigen::MatrixXcd choi = Eigen::MatrixXcd::Zero(m * dim_d_, m * dim_d_);
  Eigen::MatrixXcd trace_block = Eigen::MatrixXcd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      Eigen::MatrixXcd basis = Eigen::MatrixXcd::Zero(m, m);
      basis(i, j) = 1.0;
      const Eigen::MatrixXcd image = apply_dilation(isometry_, basis, dim_d_);
      choi.block(i * dim_d_, j * dim_d_, dim_d_, dim_d_) = image / static_cast<double>(m);
      trace_block(i, j) = image.trace();
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(choi, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kChoiPsdTol) {
    throw ContractViolation("CoarseGrainer: induced map fails complete positivity check");
  }
  if ((trace_block - Eigen::MatrixXcd::Identity(m, m)).cwiseAbs().maxCoeff() >
      kTracePreserveTol) {
    throw ContractViolation("CoarseGrainer: induced map fails trace preservation check");
  }
}

Eigen::MatrixXcd isometry_from_unitary(const Eigen::MatrixXcd& unitary, int dim_m, int dim_r,
                                       int dim_d) {
  Eigen::MatrixXcd iso(unitary.rows(), dim_m);
  for (int j = 0; j < dim_m; ++j) {
    iso.col(j) = unitary.col(static_cast<Eigen::Index>(j) * dim_r * dim_d);
  }
  return iso;
}

Eigen::MatrixXcd apply_dilation(const Eigen::MatrixXcd& isometry, const Eigen::MatrixXcd& psi,
                                int dim_d) {
  const Eigen::Index m = isometry.cols();
  if (psi.rows() != m || psi.cols() != m) {
    throw ContractViolation("apply_dilation: operator dimension does not match isometry");
  }
  const Eigen::Index traced = isometry.rows() / dim_d;
  const Eigen::MatrixXcd lifted = isometry * psi;  // (m r d) x m
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_d, dim_d);
  for (Eigen::Index k = 0; k < traced; ++k) {
    for (int s = 0; s < dim_d; ++s) {
      for (int t = 0; t < dim_d; ++t) {
        out(s, t) += isometry.row(k * dim_d + t).dot(lifted.row(k * dim_d + s));
      }
    }
  }
  return out;
}

HermitianOperator coarse_grain(const CoarseGrainer& cg, const HermitianOperator& psi) {
  if (psi.dim() != cg.dim_m()) {
    throw ContractViolation("coarse_grain: operator dimension " + std::to_string(psi.dim()) +
                            " does not match coarse-grainer input dimension " +
                            std::to_string(cg.dim_m()));
  }
  return HermitianOperator(apply_dilation(cg.isometry(), psi.matrix(), cg.dim_d()));
}

double undistilled_delta_d(const PauliChannel& lam1, const PauliChannel& lam2,
                           const HermitianOperator& rho1, const HermitianOperator& rho2) {
  if (!is_density_matrix(rho1.matrix()) || !is_density_matrix(rho2.matrix())) {
    throw ContractViolation("undistilled_delta_d: inputs must be valid density matrices");
  }
  const HermitianOperator diff(rho2.matrix() - rho1.matrix());
  return 0.5 * (trace_norm(apply_channel(lam2, diff)) - trace_norm(apply_channel(lam1, diff)));
}

double distilled_delta_d(const CoarseGrainer& cg, const PauliChannel& lam1,
                         const PauliChannel& lam2, const HermitianOperator& rho1,
                         const HermitianOperator& rho2) {
  if (rho1.dim() != 2 || rho2.dim() != 2) {
    throw ContractViolation("distilled_delta_d: states must be 2x2");
  }
  const int n = cg.n_copies();
  const HermitianOperator op_a = difference_operator(lam2, rho1, rho2, n);
  const HermitianOperator op_b = difference_operator(lam1, rho1, rho2, n);
  return 0.5 * (trace_norm(coarse_grain(cg, op_a)) - trace_norm(coarse_grain(cg, op_b)));
}

GeneralBound general_bound(const PauliChannel& lam1, const PauliChannel& lam2,
                           const HermitianOperator& rho1, const HermitianOperator& rho2,
                           int n_copies) {
  // Bound route one: tensor powers of the single-copy evolved states.
  const Eigen::MatrixXcd combo =
      tensor_power(apply_channel(lam2, rho2).matrix(), n_copies) -
      tensor_power(apply_channel(lam2, rho1).matrix(), n_copies) -
      tensor_power(apply_channel(lam1, rho2).matrix(), n_copies) +
      tensor_power(apply_channel(lam1, rho1).matrix(), n_copies);
  const double norm = trace_norm(combo);

  // Bound route two: the n-copy evolved difference operators.
  const Eigen::MatrixXcd delta = difference_operator(lam2, rho1, rho2, n_copies).matrix() -
                                 difference_operator(lam1, rho1, rho2, n_copies).matrix();
  const double norm_sharp = trace_norm(delta);

  return GeneralBound{std::min(1.0, norm), std::min(1.0, 0.5 * norm_sharp)};
}

DistillationRecord make_distillation_record(double delta_d, double delta_d_prime,
                                            const GeneralBound& bound, double epsilon,
                                            int n_copies, bool sharp_tightness) {
  if (delta_d_prime > bound.beta + kRecordTol || delta_d_prime > bound.beta_sharp + kRecordTol) {
    throw std::logic_error("DistillationRecord: distilled value exceeds its upper bound");
  }
  if (std::abs(delta_d) > 1.0 + kRangeTol || std::abs(delta_d_prime) > 1.0 + kRangeTol) {
    throw std::logic_error("DistillationRecord: value outside the trace-distance range");
  }
  const double denom = sharp_tightness ? bound.beta_sharp : bound.beta;
  const double tightness = denom > 0.0 ? delta_d_prime / denom : 0.0;
  return DistillationRecord{delta_d, delta_d_prime, bound.beta, bound.beta_sharp,
                            tightness, epsilon, n_copies};
}

}  // namespace nmdistill
