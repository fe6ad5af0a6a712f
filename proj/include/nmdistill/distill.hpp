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

#ifndef NMDISTILL_DISTILL_HPP
#define NMDISTILL_DISTILL_HPP

#include <Eigen/Dense>

#include "nmdistill/channel.hpp"
#include "nmdistill/operator_core.hpp"

namespace nmdistill {

/// CPTP coarse-graining map from n-copy space (dim 2^n) down to dim_d,
/// realized as a unitary dilation: the system block is extended by an
/// auxiliary factor of dimension dim_r and an output factor of dimension
/// dim_d (both initialized to |0>), rotated by U = exp(iH(theta)), and all
/// but the output factor is traced out. Factor ordering is fixed as
/// (system copies, auxiliary, output).
///
/// theta has length (m r d)^2 in the layout of hermitian_from_parameters.
/// Unitarity of U and complete positivity / trace preservation of the induced
/// map are verified on construction.
class CoarseGrainer {
 public:
  CoarseGrainer(int n_copies, int dim_r, int dim_d, Eigen::VectorXd theta);

  int n_copies() const { return n_copies_; }
  int dim_m() const { return 1 << n_copies_; }
  int dim_r() const { return dim_r_; }
  int dim_d() const { return dim_d_; }
  int dilation_dim() const { return dim_m() * dim_r_ * dim_d_; }

  const Eigen::VectorXd& theta() const { return theta_; }
  const Eigen::MatrixXcd& unitary() const { return unitary_; }

  /// The dilation isometry V = U (I_m (x) |0_r> (x) |0_d>): the only part of
  /// U the induced map depends on.
  const Eigen::MatrixXcd& isometry() const { return isometry_; }

 private:
  int n_copies_, dim_r_, dim_d_;
  Eigen::VectorXd theta_;
  Eigen::MatrixXcd unitary_;
  Eigen::MatrixXcd isometry_;
};

/// lambda(psi) = Tr_{system, auxiliary}[V psi V^+] for a dilation isometry V
/// of shape (m r d) x m. Returns the d x d output block sum directly; psi may
/// be any m x m complex matrix.
Eigen::MatrixXcd apply_dilation(const Eigen::MatrixXcd& isometry, const Eigen::MatrixXcd& psi,
                                int dim_d);

/// Extracts the dilation isometry (the columns of U acting on the
/// |0_r, 0_d> input block) from a full dilation unitary.
Eigen::MatrixXcd isometry_from_unitary(const Eigen::MatrixXcd& unitary, int dim_m, int dim_r,
                                       int dim_d);

HermitianOperator coarse_grain(const CoarseGrainer& cg, const HermitianOperator& psi);

/// Change in distinguishability between the two channel snapshots without
/// any processing: (||lam2(rho2 - rho1)||_1 - ||lam1(rho2 - rho1)||_1) / 2.
double undistilled_delta_d(const PauliChannel& lam1, const PauliChannel& lam2,
                           const HermitianOperator& rho1, const HermitianOperator& rho2);

/// Distilled change for a given coarse-grainer:
/// (||cg(lam2-evolved n-copy difference)||_1 - ||cg(lam1-evolved ...)||_1) / 2.
double distilled_delta_d(const CoarseGrainer& cg, const PauliChannel& lam1,
                         const PauliChannel& lam2, const HermitianOperator& rho1,
                         const HermitianOperator& rho2);

/// Upper bounds on the distilled change for a given instance.
///   beta       = min{1, || A - B ||_1}, built from the tensor powers of the
///                single-copy evolved states (the effective general bound);
///   beta_sharp = min{1, || A - B ||_1 / 2}, the tight consequence of the
///                triangle-inequality chain applied to the halved objective,
/// with A, B the n-copy evolved difference operators. Both are reported;
/// the two norms are computed through independent constructions.
struct GeneralBound {
  double beta;
  double beta_sharp;
};

GeneralBound general_bound(const PauliChannel& lam1, const PauliChannel& lam2,
                           const HermitianOperator& rho1, const HermitianOperator& rho2,
                           int n_copies);

/// Per-instance summary of a distillation evaluation; invariants
/// (bound dominance, trace-distance range) are checked on construction.
struct DistillationRecord {
  double delta_d;
  double delta_d_prime;
  double beta;
  double beta_sharp;
  double tightness;  // delta_d_prime / beta when beta > 0, else 0
  double epsilon;
  int n_copies;
};

DistillationRecord make_distillation_record(double delta_d, double delta_d_prime,
                                            const GeneralBound& bound, double epsilon,
                                            int n_copies, bool sharp_tightness = false);

}  // namespace nmdistill

#endif  // NMDISTILL_DISTILL_HPP
