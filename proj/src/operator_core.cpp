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

#include "nmdistill/operator_core.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <string>

namespace nmdistill {

namespace {

std::string dim_string(const Eigen::MatrixXcd& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

bool is_hermitian(const Eigen::MatrixXcd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

HermitianOperator::HermitianOperator(Eigen::MatrixXcd entries)
    : mat_(std::move(entries)) {
  if (mat_.rows() < 1 || mat_.rows() != mat_.cols()) {
    throw ContractViolation("HermitianOperator: matrix must be square with dim >= 1, got " +
                            dim_string(mat_));
  }
  if (!is_hermitian(mat_)) {
    throw ContractViolation("HermitianOperator: entries differ from conjugate transpose beyond tolerance");
  }
}

double trace_norm(const Eigen::MatrixXcd& m) {
  if (!is_hermitian(m)) {
    throw ContractViolation("trace_norm: input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double trace_norm(const HermitianOperator& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

SpectralSplit spectral_split(const HermitianOperator& m, double zero_tol) {
  if (zero_tol <= 0.0) {
    throw ContractViolation("spectral_split: zero_tol must be positive");
  }
  const Eigen::Index n = m.dim();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.matrix());

  Eigen::MatrixXcd plus = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd minus = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd p_plus = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd p_minus = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd p_zero = Eigen::MatrixXcd::Zero(n, n);

  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = es.eigenvalues()(i);
    const Eigen::VectorXcd vec = es.eigenvectors().col(i);
    const Eigen::MatrixXcd proj = vec * vec.adjoint();
    if (v > zero_tol) {
      plus += v * proj;
      p_plus += proj;
    } else if (v < -zero_tol) {
      minus -= v * proj;
      p_minus += proj;
    } else {
      p_zero += proj;
    }
  }

  Eigen::VectorXd descending = es.eigenvalues().reverse();
  return SpectralSplit{HermitianOperator(std::move(plus)),
                       HermitianOperator(std::move(minus)),
                       std::move(p_plus),
                       std::move(p_minus),
                       std::move(p_zero),
                       std::move(descending)};
}

Eigen::MatrixXcd tensor_power(const Eigen::MatrixXcd& m, int n) {
  if (m.rows() != m.cols()) {
    throw ContractViolation("tensor_power: matrix must be square, got " + dim_string(m));
  }
  if (n < 1) {
    throw ContractViolation("tensor_power: exponent must be >= 1, got " + std::to_string(n));
  }
  Eigen::MatrixXcd out = m;
  for (int k = 1; k < n; ++k) {
    out = Eigen::kroneckerProduct(out, m).eval();
  }
  return out;
}

Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& m,
                               const std::vector<int>& factor_dims,
                               const std::vector<int>& keep) {
  if (m.rows() != m.cols()) {
    throw ContractViolation("partial_trace: matrix must be square");
  }
  long total = 1;
  for (int d : factor_dims) {
    if (d < 1) throw ContractViolation("partial_trace: factor dimensions must be positive");
    total *= d;
  }
  if (total != m.rows()) {
    throw ContractViolation("partial_trace: product of factor dims (" + std::to_string(total) +
                            ") does not match matrix dimension (" + std::to_string(m.rows()) + ")");
  }
  const int n_factors = static_cast<int>(factor_dims.size());
  std::vector<bool> kept(n_factors, false);
  for (int k : keep) {
    if (k < 0 || k >= n_factors) {
      throw ContractViolation("partial_trace: keep index out of range");
    }
    kept[k] = true;
  }
  if (keep.empty()) {
    throw ContractViolation("partial_trace: keep set must be non-empty");
  }

  // Row-major strides of each factor in the composite index.
  std::vector<long> stride(n_factors, 1);
  for (int f = n_factors - 2; f >= 0; --f) {
    stride[f] = stride[f + 1] * factor_dims[f + 1];
  }

  long keep_dim = 1, trace_dim = 1;
  std::vector<int> keep_factors, trace_factors;
  for (int f = 0; f < n_factors; ++f) {
    if (kept[f]) {
      keep_dim *= factor_dims[f];
      keep_factors.push_back(f);
    } else {
      trace_dim *= factor_dims[f];
      trace_factors.push_back(f);
    }
  }

  // Composite index of a (kept-tuple, traced-tuple) pair.
  auto composite = [&](long kept_idx, long traced_idx) {
    long idx = 0;
    for (int f = static_cast<int>(keep_factors.size()) - 1; f >= 0; --f) {
      const int d = factor_dims[keep_factors[f]];
      idx += (kept_idx % d) * stride[keep_factors[f]];
      kept_idx /= d;
    }
    for (int f = static_cast<int>(trace_factors.size()) - 1; f >= 0; --f) {
      const int d = factor_dims[trace_factors[f]];
      idx += (traced_idx % d) * stride[trace_factors[f]];
      traced_idx /= d;
    }
    return idx;
  };

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(keep_dim, keep_dim);
  for (long a = 0; a < keep_dim; ++a) {
    for (long b = 0; b < keep_dim; ++b) {
      std::complex<double> sum = 0.0;
      for (long t = 0; t < trace_dim; ++t) {
        sum += m(composite(a, t), composite(b, t));
      }
      out(a, b) = sum;
    }
  }
  return out;
}

Eigen::MatrixXcd hermitian_from_parameters(const Eigen::VectorXd& theta, int dim) {
  if (dim < 1) {
    throw ContractViolation("hermitian_from_parameters: dim must be >= 1");
  }
  if (theta.size() != static_cast<Eigen::Index>(dim) * dim) {
    throw ContractViolation("hermitian_from_parameters: expected " + std::to_string(dim * dim) +
                            " parameters, got " + std::to_string(theta.size()));
  }
  const int n_pairs = dim * (dim - 1) / 2;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int j = 0; j < dim; ++j) {
    h(j, j) = theta(j);
  }
  for (int j = 0; j < dim; ++j) {
    for (int k = j + 1; k < dim; ++k) {
      const int p = pair_rank(j, k, dim);
      const std::complex<double> v(theta(dim + p), theta(dim + n_pairs + p));
      h(j, k) = v;
      h(k, j) = std::conj(v);
    }
  }
  return h;
}

Eigen::VectorXd parameters_from_hermitian(const Eigen::MatrixXcd& h) {
  if (!is_hermitian(h)) {
    throw ContractViolation("parameters_from_hermitian: input is not Hermitian");
  }
  const int dim = static_cast<int>(h.rows());
  const int n_pairs = dim * (dim - 1) / 2;
  Eigen::VectorXd theta(dim * dim);
  for (int j = 0; j < dim; ++j) {
    theta(j) = h(j, j).real();
  }
  for (int j = 0; j < dim; ++j) {
    for (int k = j + 1; k < dim; ++k) {
      const int p = pair_rank(j, k, dim);
      theta(dim + p) = h(j, k).real();
      theta(dim + n_pairs + p) = h(j, k).imag();
    }
  }
  return theta;
}

Eigen::MatrixXcd expi_hermitian(const Eigen::MatrixXcd& h) {
  if (!is_hermitian(h)) {
    throw ContractViolation("expi_hermitian: generator is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::Index n = h.rows();
  Eigen::VectorXcd phases(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    phases(i) = std::exp(std::complex<double>(0.0, es.eigenvalues()(i)));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXcd unitary_from_generator(const Eigen::VectorXd& theta, int dim) {
  return expi_hermitian(hermitian_from_parameters(theta, dim));
}

}  // namespace nmdistill
