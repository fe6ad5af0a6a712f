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

#ifndef NMDISTILL_CHANNEL_HPP
#define NMDISTILL_CHANNEL_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <utility>

#include "nmdistill/operator_core.hpp"

namespace nmdistill {

Eigen::Matrix2cd pauli_x();
Eigen::Matrix2cd pauli_y();
Eigen::Matrix2cd pauli_z();

/// Thrown when a channel with a vanishing transfer eigenvalue is inverted.
/// Carries the Bloch axis (0 = x, 1 = y, 2 = z) whose eigenvalue vanished.
class NonInvertibleError : public std::runtime_error {
 public:
  NonInvertibleError(int axis, double value);
  int vanishing_axis() const { return axis_; }

 private:
  int axis_;
};

/// Qubit channel rho -> pI rho + pz Z rho Z + px X rho X + py Y rho Y.
/// Mixing weights form a probability vector; the transfer eigenvalues
/// (action on the X, Y, Z Bloch components) are derived on construction.
class PauliChannel {
 public:
  PauliChannel(double p_identity, double p_z, double p_x, double p_y);

  static PauliChannel identity() { return PauliChannel(1.0, 0.0, 0.0, 0.0); }

  double p_identity() const { return p_identity_; }
  double p_z() const { return p_z_; }
  double p_x() const { return p_x_; }
  double p_y() const { return p_y_; }

  /// (lambda_x, lambda_y, lambda_z).
  const Eigen::Vector3d& transfer_eigenvalues() const { return transfer_; }

  /// Choi matrix, normalized to unit trace. PSD for any valid weight vector.
  Eigen::Matrix4cd choi() const;

 private:
  double p_identity_, p_z_, p_x_, p_y_;
  Eigen::Vector3d transfer_;
};

/// Intermediate map connecting two snapshots of an evolution, defined by the
/// ratios of their transfer eigenvalues. Positivity uses the closed-form
/// criterion for unital Pauli-diagonal qubit maps (all |v_i| <= 1); complete
/// positivity uses the eigenvalues of the 4x4 Choi matrix.
struct IntermediateMap {
  Eigen::Vector3d transfer_eigenvalues;
  bool is_positive;
  bool is_cp;
  double min_choi_eigenvalue;
};

enum class RegimeLabel { kMarkovian, kWeak, kEssential };

std::string to_string(RegimeLabel label);

/// The two-step channel model: for noise parameter epsilon in [0, 0.5],
/// step one mixes Z and X errors with weight epsilon each; step two is the
/// twofold composition of step one.
std::pair<PauliChannel, PauliChannel> model_channels(double epsilon);

HermitianOperator apply_channel(const PauliChannel& ch, const HermitianOperator& rho);

/// Applies ch independently on each tensor factor of a 2^n-dimensional
/// Hermitian operator (n-fold product channel).
HermitianOperator apply_channel_power(const PauliChannel& ch, const HermitianOperator& m,
                                      int n_copies);

/// lam2 o lam1^{-1} as an IntermediateMap. Throws NonInvertibleError when a
/// transfer eigenvalue of lam1 vanishes (|v| <= 1e-12).
IntermediateMap intermediate_map(const PauliChannel& lam1, const PauliChannel& lam2);

/// Regime of the two-step model at the given epsilon:
///   MARKOVIAN  intermediate map completely positive
///   WEAK       positive but not completely positive
///   ESSENTIAL  not positive
RegimeLabel classify_regime(double epsilon);

bool is_density_matrix(const Eigen::MatrixXcd& rho, double psd_tol = 1e-10,
                       double trace_tol = 1e-10);

/// ch^{x n}(rho2^{x n} - rho1^{x n}): the n-copy evolved difference operator.
/// Traceless by construction.
HermitianOperator difference_operator(const PauliChannel& ch, const HermitianOperator& rho1,
                                      const HermitianOperator& rho2, int n_copies);

}  // namespace nmdistill

#endif  // NMDISTILL_CHANNEL_HPP
