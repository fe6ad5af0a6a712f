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

#include "nmdistill/saturation.hpp"

#include <cmath>
#include <vector>

namespace nmdistill {

namespace {

constexpr double kTracelessTol = 1e-10;
constexpr double kFeasibilityTol = 1e-10;
constexpr double kEffectTol = 1e-10;

// Smallest nonzero eigenvalue magnitude below which support projectors are
// considered numerically ambiguous.
constexpr double kDegeneracyScale = 1e-6;

void require_traceless(const HermitianOperator& op, const char* name) {
  if (std::abs(op.matrix().trace()) > kTracelessTol) {
    throw ContractViolation(std::string("saturation: operator ") + name +
                            " is not traceless");
  }
}

}  // namespace

SaturationReport saturation_feasible(const HermitianOperator& a, const HermitianOperator& b,
                                     double zero_tol) {
  require_traceless(a, "A");
  require_traceless(b, "B");
  if (a.dim() != b.dim()) {
    throw ContractViolation("saturation: operators must have equal dimensions");
  }

  const Eigen::Index n = a.dim();
  SpectralSplit split = spectral_split(HermitianOperator(a.matrix() - b.matrix()), zero_tol);

  // The witness objective Tr(E0 B) is linear over {0 <= E0 <= P0}; its
  // maximum is the sum of positive eigenvalues of the kernel compression
  // P0 B P0, attained by the projector onto their eigenvectors.
  const Eigen::MatrixXcd kernel_b = split.p_zero * b.matrix() * split.p_zero;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(kernel_b);
  Eigen::MatrixXcd witness = Eigen::MatrixXcd::Zero(n, n);
  double kernel_gain = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (es.eigenvalues()(i) > 0.0) {
      kernel_gain += es.eigenvalues()(i);
      const Eigen::VectorXcd v = es.eigenvectors().col(i);
      witness += v * v.adjoint();
    }
  }
  // Restrict the witness to the kernel exactly; eigenvectors of P0 B P0 with
  // nonzero eigenvalue already lie there, this removes round-off leakage.
  witness = (split.p_zero * witness * split.p_zero).eval();
  witness = ((witness + witness.adjoint()) / 2.0).eval();

  const double margin = (split.p_plus * b.matrix()).trace().real() + kernel_gain;
  const bool feasible = margin >= -kFeasibilityTol;

  SaturationReport report{feasible, margin, std::nullopt, std::move(split)};
  if (feasible) {
    report.witness_e0 = HermitianOperator(std::move(witness));
  }
  return report;
}

TwoOutcomeMeasurementMap::TwoOutcomeMeasurementMap(Eigen::MatrixXcd effect0, int out_dim)
    : effect0_(std::move(effect0)), out_dim_(out_dim) {
  if (out_dim_ < 2) {
    throw ContractViolation("TwoOutcomeMeasurementMap: output dimension must be >= 2");
  }
  if (!is_hermitian(effect0_)) {
    throw ContractViolation("TwoOutcomeMeasurementMap: effect is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(effect0_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kEffectTol ||
      es.eigenvalues().maxCoeff() > 1.0 + kEffectTol) {
    throw ContractViolation("TwoOutcomeMeasurementMap: effect spectrum outside [0, 1]");
  }
}

Eigen::MatrixXcd TwoOutcomeMeasurementMap::effect1() const {
  return Eigen::MatrixXcd::Identity(effect0_.rows(), effect0_.cols()) - effect0_;
}

Eigen::MatrixXcd TwoOutcomeMeasurementMap::apply(const Eigen::MatrixXcd& x) const {
  if (x.rows() != effect0_.rows() || x.cols() != effect0_.cols()) {
    throw ContractViolation("TwoOutcomeMeasurementMap: operator dimension mismatch");
  }
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(out_dim_, out_dim_);
  out(0, 0) = (effect0_ * x).trace();
  out(1, 1) = (effect1() * x).trace();
  return out;
}

TwoOutcomeMeasurementMap construct_saturating_map(const HermitianOperator& a,
                                                  const HermitianOperator& b,
                                                  const SaturationReport& report,
                                                  int out_dim) {
  static_cast<void>(a);
  static_cast<void>(b);
  if (!report.feasible) {
    throw ContractViolation("construct_saturating_map: report is infeasible");
  }
  Eigen::MatrixXcd effect0 = report.split.p_plus;
  if (report.witness_e0) {
    effect0 += report.witness_e0->matrix();
  }
  effect0 = ((effect0 + effect0.adjoint()) / 2.0).eval();
  return TwoOutcomeMeasurementMap(std::move(effect0), out_dim);
}

bool triangle_equality_holds(const HermitianOperator& a, const HermitianOperator& b,
                             double tol) {
  if (a.dim() != b.dim()) {
    throw ContractViolation("triangle_equality: operators must have equal dimensions");
  }
  const double lhs = trace_norm(HermitianOperator(a.matrix() + b.matrix()));
  const double rhs = trace_norm(a) + trace_norm(b);
  return rhs - lhs <= tol;
}

bool triangle_equality_spectral(const HermitianOperator& a, const HermitianOperator& b,
                                double tol) {
  if (a.dim() != b.dim()) {
    throw ContractViolation("triangle_equality: operators must have equal dimensions");
  }
  const Eigen::MatrixXcd commutator = a.matrix() * b.matrix() - b.matrix() * a.matrix();
  if (commutator.cwiseAbs().maxCoeff() > tol) {
    return false;
  }

  // Common eigenbasis: diagonalize A, then refine each (near-)degenerate
  // eigenspace by the compression of B onto it.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es_a(a.matrix());
  const Eigen::Index n = a.dim();
  constexpr double kGroupTol = 1e-8;

  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index end = start + 1;
    while (end < n && es_a.eigenvalues()(end) - es_a.eigenvalues()(start) <= kGroupTol) {
      ++end;
    }
    const Eigen::MatrixXcd block = es_a.eigenvectors().middleCols(start, end - start);
    const Eigen::MatrixXcd b_sub = block.adjoint() * b.matrix() * block;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es_b(b_sub);
    for (Eigen::Index i = 0; i < end - start; ++i) {
      const double va = es_a.eigenvalues()(start);
      const double vb = es_b.eigenvalues()(i);
      if (va * vb < -tol) {
        return false;
      }
    }
    start = end;
  }
  return true;
}

SupportConditionDetail orthogonal_support_detail(const ChannelFn& channel,
                                                 const HermitianOperator& delta,
                                                 double tol, double zero_tol) {
  const HermitianOperator image(channel(delta.matrix()));
  const double gap = trace_norm(delta) - trace_norm(image);

  const SpectralSplit in_split = spectral_split(delta, zero_tol);
  const SpectralSplit out_split = spectral_split(image, zero_tol);

  const Eigen::MatrixXcd img_plus = channel(in_split.delta_plus.matrix());
  const Eigen::MatrixXcd img_minus = channel(in_split.delta_minus.matrix());
  const Eigen::MatrixXcd& pi_plus = out_split.p_plus;
  const Eigen::MatrixXcd& pi_minus = out_split.p_minus;

  auto max_abs = [](const Eigen::MatrixXcd& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
  };
  const bool identities =
      max_abs(pi_plus * img_plus * pi_plus - img_plus) <= tol &&
      max_abs(pi_minus * img_minus * pi_minus - img_minus) <= tol &&
      max_abs(pi_plus * img_minus * pi_plus) <= tol &&
      max_abs(pi_minus * img_plus * pi_minus) <= tol;

  auto smallest_nonzero = [zero_tol](const Eigen::VectorXd& eigenvalues) {
    double smallest = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
      const double v = std::abs(eigenvalues(i));
      if (v > zero_tol && v < smallest) smallest = v;
    }
    return smallest;
  };
  const bool near_degenerate = smallest_nonzero(in_split.eigenvalues) < kDegeneracyScale ||
                               smallest_nonzero(out_split.eigenvalues) < kDegeneracyScale;

  return SupportConditionDetail{std::abs(gap) <= tol, identities, near_degenerate, gap};
}

bool orthogonal_support_condition(const ChannelFn& channel, const HermitianOperator& delta,
                                  double tol) {
  return orthogonal_support_detail(channel, delta, tol).norm_equal;
}

}  // namespace nmdistill
