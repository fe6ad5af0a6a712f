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

#ifndef NMDISTILL_SATURATION_HPP
#define NMDISTILL_SATURATION_HPP

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "nmdistill/operator_core.hpp"

namespace nmdistill {

/// Verdict of the saturation feasibility test for a traceless Hermitian pair
/// (A, B): whether some CPTP map lambda can attain
///   ||lambda(A)||_1 - ||lambda(B)||_1 = ||lambda(A-B)||_1 = ||A-B||_1.
/// margin is the closed-form maximum of Tr((P_+ + E_0) B) over admissible
/// witnesses 0 <= E_0 <= P_0; feasibility is margin >= 0 (up to tolerance).
struct SaturationReport {
  bool feasible;
  double margin;
  std::optional<HermitianOperator> witness_e0;  // present iff feasible
  SpectralSplit split;                          // split of Delta = A - B
};

SaturationReport saturation_feasible(const HermitianOperator& a, const HermitianOperator& b,
                                     double zero_tol = kDefaultZeroTol);

/// Two-outcome measurement channel X -> Tr(M0 X)|0><0| + Tr((I-M0) X)|1><1|
/// into an out_dim-dimensional output space. The effects {M0, I - M0} must
/// form a valid positive decomposition of the identity.
class TwoOutcomeMeasurementMap {
 public:
  TwoOutcomeMeasurementMap(Eigen::MatrixXcd effect0, int out_dim);

  const Eigen::MatrixXcd& effect0() const { return effect0_; }
  Eigen::MatrixXcd effect1() const;
  int out_dim() const { return out_dim_; }

  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& x) const;

 private:
  Eigen::MatrixXcd effect0_;
  int out_dim_;
};

/// The explicit map that attains saturation when the report is feasible:
/// effect0 = P_+ + E_0. Throws on an infeasible report.
TwoOutcomeMeasurementMap construct_saturating_map(const HermitianOperator& a,
                                                  const HermitianOperator& b,
                                                  const SaturationReport& report,
                                                  int out_dim = 2);

/// ||A + B||_1 == ||A||_1 + ||B||_1 up to tol (norm comparison).
bool triangle_equality_holds(const HermitianOperator& a, const HermitianOperator& b,
                             double tol = 1e-9);

/// Spectral criterion for the same equality: A and B commute and their
/// eigenvalues on a common eigenbasis never have opposite signs. Kept as an
/// independent route; the two predicates must agree away from degenerate
/// boundaries.
bool triangle_equality_spectral(const HermitianOperator& a, const HermitianOperator& b,
                                double tol = 1e-9);

using ChannelFn = std::function<Eigen::MatrixXcd(const Eigen::MatrixXcd&)>;

/// Diagnostics for the norm-preservation condition of a channel on a
/// Hermitian operator delta. norm_equal compares ||lambda(delta)||_1 with
/// ||delta||_1; projector_identities checks that the images of the positive
/// and negative parts of delta stay inside the supports of the corresponding
/// parts of lambda(delta) and do not leak into each other. When delta or its
/// image has eigenvalues within zero_tol of 0 the projectors are numerically
/// ambiguous (near_degenerate is set) and the norm comparison is the
/// authoritative answer.
struct SupportConditionDetail {
  bool norm_equal;
  bool projector_identities;
  bool near_degenerate;
  double norm_gap;  // ||delta||_1 - ||lambda(delta)||_1
};

SupportConditionDetail orthogonal_support_detail(const ChannelFn& channel,
                                                 const HermitianOperator& delta,
                                                 double tol = 1e-9,
                                                 double zero_tol = kDefaultZeroTol);

bool orthogonal_support_condition(const ChannelFn& channel, const HermitianOperator& delta,
                                  double tol = 1e-9);

}  // namespace nmdistill

#endif  // NMDISTILL_SATURATION_HPP
