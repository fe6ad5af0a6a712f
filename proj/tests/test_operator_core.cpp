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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/KroneckerProduct>

#include "nmdistill/operator_core.hpp"
#include "test_support.hpp"

using namespace nmdistill;
using test::random_hermitian;

namespace {

Eigen::MatrixXcd diag2(double a, double b) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_CASE("HermitianOperator contract") {
  CHECK_NOTHROW(HermitianOperator(diag2(1.0, -1.0)));

  Eigen::MatrixXcd bad(2, 2);
  bad << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(HermitianOperator{bad}, ContractViolation);

  CHECK_THROWS_AS(HermitianOperator(Eigen::MatrixXcd::Zero(2, 3).eval()), ContractViolation);
}

TEST_CASE("trace_norm on fixed spectra") {
  CHECK(trace_norm(diag2(1.0, -1.0)) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(trace_norm(Eigen::MatrixXcd::Zero(4, 4)) == doctest::Approx(0.0));
  CHECK(trace_norm(diag2(3.0, -1.0)) == doctest::Approx(4.0).epsilon(1e-13));

  Eigen::MatrixXcd bad(2, 2);
  bad << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(trace_norm(bad), ContractViolation);
}

TEST_CASE("trace_norm is zero only for the zero operator") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXcd h = random_hermitian(rng, 3);
    if (h.cwiseAbs().maxCoeff() > 1e-10) {
      CHECK(trace_norm(h) > 0.0);
    }
  }
}

TEST_CASE("spectral_split on diagonal inputs") {
  const auto split = spectral_split(HermitianOperator(diag2(1.0, -1.0)), kDefaultZeroTol);
  CHECK((split.p_plus - diag2(1.0, 0.0)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((split.p_minus - diag2(0.0, 1.0)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(split.p_zero.cwiseAbs().maxCoeff() < 1e-12);

  Eigen::MatrixXcd m3 = Eigen::MatrixXcd::Zero(3, 3);
  m3(0, 0) = 2.0;
  m3(2, 2) = -2.0;
  const auto split3 = spectral_split(HermitianOperator(m3), 1e-10);
  CHECK(split3.p_zero(1, 1).real() == doctest::Approx(1.0));
  CHECK(split3.p_zero.trace().real() == doctest::Approx(1.0));
}

TEST_CASE("spectral_split of the two-copy model difference operator") {
  // (z2 - z1)/2 (Z x I + I x Z) at eps = 0.3: z1 = 0.4, z2 = 0.52.
  const double z1 = 0.4, z2 = 0.52;
  const Eigen::MatrixXcd zz =
      Eigen::kroneckerProduct(pauli_z(), Eigen::Matrix2cd::Identity()).eval() +
      Eigen::kroneckerProduct(Eigen::Matrix2cd::Identity(), pauli_z()).eval();
  const Eigen::MatrixXcd delta = 0.5 * (z2 - z1) * zz;

  const auto split = spectral_split(HermitianOperator(delta), kDefaultZeroTol);
  CHECK(split.eigenvalues(0) == doctest::Approx(0.12).epsilon(1e-12));
  CHECK(split.eigenvalues(1) == doctest::Approx(0.0));
  CHECK(split.eigenvalues(2) == doctest::Approx(0.0));
  CHECK(split.eigenvalues(3) == doctest::Approx(-0.12).epsilon(1e-12));
  CHECK(split.p_zero.trace().real() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("spectral_split invariants on random operators") {
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const int dim = 2 + static_cast<int>(rng.next_u64() % 5);
    const Eigen::MatrixXcd h = random_hermitian(rng, dim);
    const auto split = spectral_split(HermitianOperator(h), kDefaultZeroTol);

    const Eigen::MatrixXcd rebuilt = split.delta_plus.matrix() - split.delta_minus.matrix();
    CHECK((rebuilt - h).cwiseAbs().maxCoeff() < 1e-10);

    const Eigen::MatrixXcd projector_sum = split.p_plus + split.p_minus + split.p_zero;
    CHECK((projector_sum - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-10);
    for (const Eigen::MatrixXcd* p : {&split.p_plus, &split.p_minus, &split.p_zero}) {
      CHECK((*p * *p - *p).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(is_hermitian(*p, 1e-10));
    }
    CHECK((split.p_plus * split.delta_minus.matrix()).cwiseAbs().maxCoeff() < 1e-10);

    // ||M||_1 = Tr(delta_plus) + Tr(delta_minus)
    const double via_split =
        split.delta_plus.matrix().trace().real() + split.delta_minus.matrix().trace().real();
    CHECK(trace_norm(h) == doctest::Approx(via_split).epsilon(1e-10));
  }
}

TEST_CASE("triangle inequality for the trace norm") {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::MatrixXcd a = random_hermitian(rng, 4);
    const Eigen::MatrixXcd b = random_hermitian(rng, 4);
    CHECK(trace_norm(a + b) <= trace_norm(a) + trace_norm(b) + 1e-10);
  }
}

TEST_CASE("tensor_power basics") {
  CHECK((tensor_power(Eigen::MatrixXcd::Identity(2, 2), 3) -
         Eigen::MatrixXcd::Identity(8, 8))
            .cwiseAbs()
            .maxCoeff() < 1e-15);

  const Eigen::MatrixXcd z2 = tensor_power(diag2(1.0, -1.0), 2);
  Eigen::Vector4d expected(1.0, -1.0, -1.0, 1.0);
  for (int i = 0; i < 4; ++i) {
    CHECK(z2(i, i).real() == doctest::Approx(expected(i)));
  }

  CHECK_THROWS_AS(tensor_power(Eigen::MatrixXcd::Identity(2, 2), 0), ContractViolation);
}

TEST_CASE("tensor_power trace multiplicativity") {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXcd m = test::random_complex(rng, 2);
    for (int n : {1, 2, 3}) {
      const std::complex<double> lhs = tensor_power(m, n).trace();
      std::complex<double> rhs = 1.0;
      for (int k = 0; k < n; ++k) rhs *= m.trace();
      CHECK(std::abs(lhs - rhs) < 1e-10);
    }
  }
}

TEST_CASE("partial_trace on product states") {
  Rng rng(51);
  const Eigen::MatrixXcd rho = test::random_density(rng, 2);
  const Eigen::MatrixXcd sigma = test::random_density(rng, 3);
  const Eigen::MatrixXcd joint = Eigen::kroneckerProduct(rho, sigma);

  const Eigen::MatrixXcd second = partial_trace(joint, {2, 3}, {1});
  CHECK((second - sigma).cwiseAbs().maxCoeff() < 1e-12);

  const Eigen::MatrixXcd both = partial_trace(joint, {2, 3}, {0, 1});
  CHECK((both - joint).cwiseAbs().maxCoeff() < 1e-15);

  // trace preservation
  CHECK(std::abs(partial_trace(joint, {2, 3}, {0}).trace() - joint.trace()) < 1e-12);

  CHECK_THROWS_AS(partial_trace(joint, {2, 2}, {0}), ContractViolation);
  CHECK_THROWS_AS(partial_trace(joint, {2, 3}, std::vector<int>{}), ContractViolation);
}

TEST_CASE("partial_trace of a maximally entangled state") {
  Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(4);
  bell(0) = 1.0 / std::sqrt(2.0);
  bell(3) = 1.0 / std::sqrt(2.0);
  const Eigen::MatrixXcd rho = bell * bell.adjoint();
  for (int keep : {0, 1}) {
    const Eigen::MatrixXcd reduced = partial_trace(rho, {2, 2}, {keep});
    CHECK((reduced - 0.5 * Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("partial_trace against X Tr(Y)") {
  Rng rng(61);
  const Eigen::MatrixXcd x = random_hermitian(rng, 3);
  const Eigen::MatrixXcd y = random_hermitian(rng, 2);
  const Eigen::MatrixXcd out = partial_trace(Eigen::kroneckerProduct(x, y), {3, 2}, {0});
  CHECK((out - x * y.trace()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("unitary_from_generator at fixed points") {
  const int dim = 2;
  CHECK((unitary_from_generator(Eigen::VectorXd::Zero(4), dim) -
         Eigen::MatrixXcd::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() < 1e-14);

  // H = (pi/2) X  ->  U = exp(i pi X / 2) = i X
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(4);
  theta(2) = 1.5707963267948966;  // Re H(0,1)
  const Eigen::MatrixXcd u = unitary_from_generator(theta, dim);
  Eigen::MatrixXcd expected(2, 2);
  expected << 0.0, std::complex<double>(0, 1), std::complex<double>(0, 1), 0.0;
  CHECK((u - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("unitary_from_generator properties on random parameters") {
  Rng rng(71);
  for (int dim : {2, 3, 4, 8}) {
    Eigen::VectorXd theta(dim * dim);
    for (int i = 0; i < dim * dim; ++i) theta(i) = rng.gaussian();
    const Eigen::MatrixXcd u = unitary_from_generator(theta, dim);
    CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff() <
          1e-10);
    CHECK(std::abs(std::abs(u.determinant()) - 1.0) < 1e-10);

    // exp(iH) exp(-iH) = I
    const Eigen::MatrixXcd h = hermitian_from_parameters(theta, dim);
    CHECK((expi_hermitian(h) * expi_hermitian(-h) - Eigen::MatrixXcd::Identity(dim, dim))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
  }
  CHECK_THROWS_AS(unitary_from_generator(Eigen::VectorXd::Zero(5), 2), ContractViolation);
}

TEST_CASE("parameter packing round-trips") {
  Rng rng(81);
  for (int dim : {2, 4, 6}) {
    const Eigen::MatrixXcd h = random_hermitian(rng, dim);
    const Eigen::VectorXd theta = parameters_from_hermitian(h);
    CHECK((hermitian_from_parameters(theta, dim) - h).cwiseAbs().maxCoeff() < 1e-14);
  }
}
