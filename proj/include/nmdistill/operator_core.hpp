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

#ifndef NMDISTILL_OPERATOR_CORE_HPP
#define NMDISTILL_OPERATOR_CORE_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace nmdistill {

// Hermiticity tolerance for operator contracts (max-entry norm).
inline constexpr double kHermitianTol = 1e-12;

// Eigenvalues with |v| <= zero_tol are assigned to the kernel when splitting
// an operator into positive/negative parts. Two orders above the eigensolver
// residual at the dimensions used here, far below physical eigenvalue scales.
inline constexpr double kDefaultZeroTol = 1e-9;

/// Thrown when an input violates a documented operator contract
/// (non-Hermitian entries, dimension mismatch, invalid parameters).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

bool is_hermitian(const Eigen::MatrixXcd& m, double tol = kHermitianTol);

/// Dense complex square matrix with a Hermiticity contract, checked on
/// construction. Carries density matrices and the traceless difference
/// operators the distillation pipeline works with.
class HermitianOperator {
 public:
  explicit HermitianOperator(Eigen::MatrixXcd entries);

  Eigen::Index dim() const { return mat_.rows(); }
  const Eigen::MatrixXcd& matrix() const { return mat_; }

 private:
  Eigen::MatrixXcd mat_;
};

/// Decomposition M = delta_plus - delta_minus with orthogonal supports,
/// plus the projectors onto the strictly positive eigenspace (p_plus), the
/// strictly negative eigenspace (p_minus) and the kernel (p_zero).
struct SpectralSplit {
  HermitianOperator delta_plus;
  HermitianOperator delta_minus;
  Eigen::MatrixXcd p_plus;
  Eigen::MatrixXcd p_minus;
  Eigen::MatrixXcd p_zero;
  Eigen::VectorXd eigenvalues;  // descending
};

/// Sum of absolute eigenvalues of a Hermitian operator.
double trace_norm(const Eigen::MatrixXcd& m);
double trace_norm(const HermitianOperator& m);

SpectralSplit spectral_split(const HermitianOperator& m,
                             double zero_tol = kDefaultZeroTol);

/// n-fold Kronecker power; rejects n < 1.
Eigen::MatrixXcd tensor_power(const Eigen::MatrixXcd& m, int n);

/// Partial trace of an operator on a tensor-product space. factor_dims lists
/// the dimensions of the factors in order; keep selects the factors retained
/// in the output (original order preserved). Trace is preserved.
Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& m,
                               const std::vector<int>& factor_dims,
                               const std::vector<int>& keep);

/// Hermitian matrix H(theta) for theta of length dim^2. Parameter layout,
/// fixed so parameter vectors are reproducible across runs and languages:
///   theta[0 .. dim-1]                    diagonal entries H(j, j)
///   theta[dim + p]                       Re H(j, k) for pair p = (j, k), j < k
///   theta[dim + P + p]                   Im H(j, k) for the same pair
/// with P = dim (dim - 1) / 2 and pairs ranked row-major: (0,1), (0,2), ...,
/// (0,dim-1), (1,2), ... H(k, j) is the conjugate of H(j, k).
Eigen::MatrixXcd hermitian_from_parameters(const Eigen::VectorXd& theta,
                                           int dim);

/// Inverse of hermitian_from_parameters.
Eigen::VectorXd parameters_from_hermitian(const Eigen::MatrixXcd& h);

/// exp(iH) for Hermitian H, computed through the eigendecomposition of H so
/// the result is unitary up to round-off regardless of the norm of H.
Eigen::MatrixXcd expi_hermitian(const Eigen::MatrixXcd& h);

/// U(theta) = exp(iH(theta)), a dim x dim unitary.
Eigen::MatrixXcd unitary_from_generator(const Eigen::VectorXd& theta, int dim);

/// Rank of the pair (j, k), j < k, in the parameter layout above.
inline int pair_rank(int j, int k, int dim) {
  return j * dim - j * (j + 1) / 2 + (k - j - 1);
}

}  // namespace nmdistill

#endif  // NMDISTILL_OPERATOR_CORE_HPP
