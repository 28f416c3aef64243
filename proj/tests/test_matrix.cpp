// Copyright 2026 The Curo Authors
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

#include <catch2/catch_amalgamated.hpp>

#include "curo/matrix.hpp"
#include "curo/rng.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace curo;
using curo::testing::min_eigenvalue_inverse_iteration;
using curo::testing::random_psd;
using curo::testing::random_vec;

TEST_CASE("cholesky of the identity is the identity") {
    Matrix i3 = Matrix::identity(3);
    Matrix l = cholesky(i3);
    REQUIRE(l == i3);
}

TEST_CASE("cholesky multiply-back reproduces the input") {
    Matrix sigma(2, 2);
    sigma(0, 0) = 4.0;
    sigma(0, 1) = sigma(1, 0) = 2.0;
    sigma(1, 1) = 3.0;
    Matrix l = cholesky(sigma);
    Matrix back = matmul(l, l.transposed());
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) REQUIRE(back(i, j) == Catch::Approx(sigma(i, j)).margin(1e-12));
    REQUIRE(l(0, 1) == 0.0);
    REQUIRE(l(0, 0) >= 0.0);
    REQUIRE(l(1, 1) >= 0.0);
}

TEST_CASE("cholesky rejects an indefinite matrix") {
    Matrix m(2, 2);
    m(0, 0) = 1.0;
    m(0, 1) = m(1, 0) = 2.0;
    m(1, 1) = 1.0;  // eigenvalues 3 and -1
    REQUIRE_THROWS_AS(cholesky(m), NotPsd);
}

TEST_CASE("cholesky rejects asymmetry and non-square input") {
    Matrix m(2, 2);
    m(0, 0) = 1.0;
    m(0, 1) = 0.5;
    m(1, 0) = 0.5 + 1e-6;
    m(1, 1) = 1.0;
    REQUIRE_THROWS_AS(cholesky(m), NotSymmetric);
    REQUIRE_THROWS_AS(cholesky(Matrix(2, 3)), NotSquare);
}

TEST_CASE("cholesky accepts singular PSD matrices with zeroed columns") {
    // Rank-1: outer product of (1, 2).
    Matrix m(2, 2);
    m(0, 0) = 1.0;
    m(0, 1) = m(1, 0) = 2.0;
    m(1, 1) = 4.0;
    Matrix l = cholesky(m);
    Matrix back = matmul(l, l.transposed());
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) REQUIRE(back(i, j) == Catch::Approx(m(i, j)).margin(1e-9));
    REQUIRE(l(1, 1) == 0.0);
}

TEST_CASE("property: cholesky multiply-back over random PSD matrices") {
    CounterRng rng(rng_key(101));
    for (int trial = 0; trial < 50; ++trial) {
        int n = 1 + static_cast<int>(rng.below(8));
        Matrix sigma = random_psd(rng, n, 1.0 + 3.0 * rng.uniform());
        Matrix l = cholesky(sigma);
        Matrix back = matmul(l, l.transposed());
        double scale = 1.0 + sigma.max_abs();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                REQUIRE(std::abs(back(i, j) - sigma(i, j)) <= 1e-9 * scale);
    }
}

TEST_CASE("two_norm basics") {
    REQUIRE(two_norm({0.0, 0.0, 0.0}) == 0.0);
    REQUIRE(two_norm({3.0, 4.0}) == Catch::Approx(5.0).margin(1e-15));
    REQUIRE(two_norm({1.0, 1.0, 1.0, 1.0}) == Catch::Approx(2.0).margin(1e-15));
}

TEST_CASE("property: two_norm absolute homogeneity") {
    CounterRng rng(rng_key(102));
    for (int trial = 0; trial < 100; ++trial) {
        int n = 1 + static_cast<int>(rng.below(10));
        Vec v = random_vec(rng, n, -5.0, 5.0);
        double alpha = -4.0 + 8.0 * rng.uniform();
        REQUIRE(two_norm(scaled(v, alpha)) ==
                Catch::Approx(std::abs(alpha) * two_norm(v)).margin(1e-12));
    }
}

TEST_CASE("min_eigenvalue on stock matrices") {
    auto [v1, vec1] = min_eigenvalue(Matrix::identity(2));
    REQUIRE(v1 == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(two_norm(vec1) == Catch::Approx(1.0).margin(1e-12));

    Matrix swap2(2, 2);
    swap2(0, 1) = swap2(1, 0) = 1.0;
    auto [v2, vec2] = min_eigenvalue(swap2);
    REQUIRE(v2 == Catch::Approx(-1.0).margin(1e-10));
    REQUIRE(std::abs(vec2[0] + vec2[1]) < 1e-8);  // proportional to (1, -1)
}

TEST_CASE("min_eigenvalue matches the inverse-iteration oracle on random symmetric input") {
    CounterRng rng(rng_key(103));
    for (int trial = 0; trial < 30; ++trial) {
        int n = 4;
        Matrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) m(i, j) = m(j, i) = -2.0 + 4.0 * rng.uniform();
        EigenPair ep = min_eigenvalue(m);
        double oracle = min_eigenvalue_inverse_iteration(m);
        REQUIRE(ep.value == Catch::Approx(oracle).margin(1e-8));
        // Residual |Mv - lambda v|.
        Vec mv = matvec(m, ep.vector);
        axpy(-ep.value, ep.vector, mv);
        REQUIRE(two_norm(mv) <= 1e-8 * (1.0 + m.max_abs()));
    }
}

TEST_CASE("property: min_eigenvalue lower-bounds the Rayleigh quotient") {
    CounterRng rng(rng_key(104));
    for (int trial = 0; trial < 40; ++trial) {
        int n = 2 + static_cast<int>(rng.below(6));
        Matrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) m(i, j) = m(j, i) = -1.0 + 2.0 * rng.uniform();
        double lam = min_eigenvalue(m).value;
        for (int probe = 0; probe < 20; ++probe) {
            Vec v = random_vec(rng, n, -1.0, 1.0);
            double nrm = two_norm(v);
            if (nrm < 1e-9) continue;
            for (double& x : v) x /= nrm;
            REQUIRE(lam <= dot(v, matvec(m, v)) + 1e-8);
        }
    }
}

TEST_CASE("min_eigenvalue rejects asymmetric input") {
    Matrix m(2, 2);
    m(0, 1) = 1.0;
    REQUIRE_THROWS_AS(min_eigenvalue(m), NotSymmetric);
}
