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

#include "nmdistill/channel.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

namespace nmdistill {

namespace {

constexpr double kWeightTol = 1e-12;
constexpr double kPositivityTol = 1e-10;
constexpr double kChoiPsdTol = 1e-10;
constexpr double kInvertTol = 1e-12;

// Action of the unital Pauli-diagonal map with transfer eigenvalues v on a
// 2x2 operator: (Tr(m) I + sum_i v_i Tr(sigma_i m) sigma_i) / 2.
Eigen::Matrix2cd apply_transfer(const Eigen::Vector3d& v, const Eigen::Matrix2cd& m) {
  const Eigen::Matrix2cd sx = pauli_x(), sy = pauli_y(), sz = pauli_z();
  Eigen::Matrix2cd out = m.trace() * Eigen::Matrix2cd::Identity();
  out += v(0) * (sx * m).trace() * sx;
  out += v(1) * (sy * m).trace() * sy;
  out += v(2) * (sz * m).trace() * sz;
  return 0.5 * out;
}

// Choi matrix of a qubit map, normalized to the trace of the input channel
// applied to the maximally entangled state: C = (1/2) sum_ij |i><j| (x) L(|i><j|).
template <typename Apply>
Eigen::Matrix4cd choi_of(Apply&& apply) {
  Eigen::Matrix4cd c = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Eigen::Matrix2cd basis = Eigen::Matrix2cd::Zero();
      basis(i, j) = 1.0;
      const Eigen::Matrix2cd image = apply(basis);
      c.block<2, 2>(2 * i, 2 * j) = 0.5 * image;
    }
  }
  return c;
}

}  // namespace

Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

Eigen::Matrix2cd pauli_y() {
  Eigen::Matrix2cd m;
  m << std::complex<double>(0, 0), std::complex<double>(0, -1),
      std::complex<double>(0, 1), std::complex<double>(0, 0);
  return m;
}

Eigen::Matrix2cd pauli_z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

NonInvertibleError::NonInvertibleError(int axis, double value)
    : std::runtime_error("channel transfer eigenvalue on axis " + std::string(1, "xyz"[axis]) +
                         " vanishes (" + std::to_string(value) + "); intermediate map undefined"),
      axis_(axis) {}

PauliChannel::PauliChannel(double p_identity, double p_z, double p_x, double p_y)
    : p_identity_(p_identity), p_z_(p_z), p_x_(p_x), p_y_(p_y) {
  for (double w : {p_identity, p_z, p_x, p_y}) {
    if (w < -kWeightTol) {
      throw ContractViolation("PauliChannel: negative mixing weight " + std::to_string(w));
    }
  }
  const double sum = p_identity + p_z + p_x + p_y;
  if (std::abs(sum - 1.0) > kWeightTol) {
    throw ContractViolation("PauliChannel: weights sum to " + std::to_string(sum) + ", expected 1");
  }
  transfer_ = Eigen::Vector3d(p_identity - p_z + p_x - p_y,
                              p_identity - p_z - p_x + p_y,
                              p_identity + p_z - p_x - p_y);
}

Eigen::Matrix4cd PauliChannel::choi() const {
  return choi_of([this](const Eigen::Matrix2cd& m) {
    const Eigen::Matrix2cd sx = pauli_x(), sy = pauli_y(), sz = pauli_z();
    return (p_identity_ * m + p_z_ * sz * m * sz + p_x_ * sx * m * sx + p_y_ * sy * m * sy)
        .eval();
  });
}

std::string to_string(RegimeLabel label) {
  switch (label) {
    case RegimeLabel::kMarkovian: return "MARKOVIAN";
    case RegimeLabel::kWeak: return "WEAK";
    case RegimeLabel::kEssential: return "ESSENTIAL";
  }
  return "UNKNOWN";
}

std::pair<PauliChannel, PauliChannel> model_channels(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 0.5)) {
    throw ContractViolation("model_channels: epsilon must lie in [0, 0.5], got " +
                            std::to_string(epsilon));
  }
  PauliChannel lam1(1.0 - 2.0 * epsilon, epsilon, epsilon, 0.0);
  const double q = 2.0 * epsilon * (1.0 - 2.0 * epsilon);
  PauliChannel lam2((1.0 - 2.0 * epsilon) * (1.0 - 2.0 * epsilon) + 4.0 * epsilon * epsilon,
                    q, q, 0.0);
  return {lam1, lam2};
}

HermitianOperator apply_channel(const PauliChannel& ch, const HermitianOperator& rho) {
  if (rho.dim() != 2) {
    throw ContractViolation("apply_channel: operator must be 2x2");
  }
  const Eigen::Matrix2cd m = rho.matrix();
  const Eigen::Matrix2cd sx = pauli_x(), sy = pauli_y(), sz = pauli_z();
  Eigen::Matrix2cd out = ch.p_identity() * m + ch.p_z() * sz * m * sz +
                         ch.p_x() * sx * m * sx + ch.p_y() * sy * m * sy;
  return HermitianOperator(out);
}

HermitianOperator apply_channel_power(const PauliChannel& ch, const HermitianOperator& m,
                                      int n_copies) {
  if (n_copies < 1) {
    throw ContractViolation("apply_channel_power: n_copies must be >= 1");
  }
  const Eigen::Index dim = m.dim();
  if (dim != (Eigen::Index{1} << n_copies)) {
    throw ContractViolation("apply_channel_power: operator dimension " + std::to_string(dim) +
                            " does not match 2^" + std::to_string(n_copies));
  }

  Eigen::MatrixXcd work = m.matrix();
  for (int factor = 0; factor < n_copies; ++factor) {
    const Eigen::Index left = Eigen::Index{1} << factor;
    const Eigen::Index right = dim / (2 * left);
    Eigen::MatrixXcd sz = Eigen::kroneckerProduct(
        Eigen::MatrixXcd::Identity(left, left),
        Eigen::kroneckerProduct(pauli_z(), Eigen::MatrixXcd::Identity(right, right)).eval());
    Eigen::MatrixXcd sx = Eigen::kroneckerProduct(
        Eigen::MatrixXcd::Identity(left, left),
        Eigen::kroneckerProduct(pauli_x(), Eigen::MatrixXcd::Identity(right, right)).eval());
    Eigen::MatrixXcd sy = Eigen::kroneckerProduct(
        Eigen::MatrixXcd::Identity(left, left),
        Eigen::kroneckerProduct(pauli_y(), Eigen::MatrixXcd::Identity(right, right)).eval());
    work = (ch.p_identity() * work + ch.p_z() * sz * work * sz + ch.p_x() * sx * work * sx +
            ch.p_y() * sy * work * sy)
               .eval();
  }
  return HermitianOperator(std::move(work));
}

IntermediateMap intermediate_map(const PauliChannel& lam1, const PauliChannel& lam2) {
  const Eigen::Vector3d a = lam1.transfer_eigenvalues();
  const Eigen::Vector3d b = lam2.transfer_eigenvalues();
  for (int axis = 0; axis < 3; ++axis) {
    if (std::abs(a(axis)) <= kInvertTol) {
      throw NonInvertibleError(axis, a(axis));
    }
  }
  const Eigen::Vector3d v = b.cwiseQuotient(a);

  IntermediateMap map;
  map.transfer_eigenvalues = v;
  map.is_positive = v.cwiseAbs().maxCoeff() <= 1.0 + kPositivityTol;

  const Eigen::Matrix4cd choi = choi_of(
      [&v](const Eigen::Matrix2cd& m) { return apply_transfer(v, m); });
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(choi, Eigen::EigenvaluesOnly);
  map.min_choi_eigenvalue = es.eigenvalues().minCoeff();
  map.is_cp = map.min_choi_eigenvalue >= -kChoiPsdTol;
  return map;
}

RegimeLabel classify_regime(double epsilon) {
  const auto [lam1, lam2] = model_channels(epsilon);
  const IntermediateMap map = intermediate_map(lam1, lam2);
  if (map.is_cp) return RegimeLabel::kMarkovian;
  if (map.is_positive) return RegimeLabel::kWeak;
  return RegimeLabel::kEssential;
}

bool is_density_matrix(const Eigen::MatrixXcd& rho, double psd_tol, double trace_tol) {
  if (rho.rows() != rho.cols() || !is_hermitian(rho)) return false;
  if (std::abs(rho.trace().real() - 1.0) > trace_tol || std::abs(rho.trace().imag()) > trace_tol) {
    return false;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -psd_tol;
}

HermitianOperator difference_operator(const PauliChannel& ch, const HermitianOperator& rho1,
                                      const HermitianOperator& rho2, int n_copies) {
  if (!is_density_matrix(rho1.matrix()) || !is_density_matrix(rho2.matrix())) {
    throw ContractViolation("difference_operator: inputs must be valid density matrices");
  }
  const Eigen::MatrixXcd diff =
      tensor_power(rho2.matrix(), n_copies) - tensor_power(rho1.matrix(), n_copies);
  return apply_channel_power(ch, HermitianOperator(diff), n_copies);
}

}  // namespace nmdistill
