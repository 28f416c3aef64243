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
#include <cmath>

#include "curo/cu_sets.hpp"
#include "curo/rng.hpp"
#include "generators.hpp"

using namespace curo;
using curo::testing::random_ellipsoidal_process;
using curo::testing::random_matrix_process;
using curo::testing::random_vec;

namespace {

EllipsoidalCuProcess scalar_process(int periods, double mu1, double a, double f, double c,
                                    double l, double r) {
    EllipsoidalCuProcess p;
    p.periods = periods;
    p.dim = 1;
    p.mu1 = {mu1};
    p.radii.assign(periods, r);
    Matrix lm(1, 1);
    lm(0, 0) = l;
    p.chol.assign(periods, lm);
    Matrix am(1, 1), fm(1, 1);
    am(0, 0) = a;
    fm(0, 0) = f;
    p.center_a.assign(periods - 1, am);
    p.center_f.assign(periods - 1, fm);
    p.center_c.assign(periods - 1, Vec{c});
    p.validate();
    return p;
}

}  // namespace

TEST_CASE("propagate_center: identity map keeps the first-period center") {
    EllipsoidalCuProcess p;
    p.periods = 3;
    p.dim = 2;
    p.mu1 = {1.0, -2.0};
    p.radii = {1.0, 1.0, 1.0};
    p.chol.assign(3, Matrix::identity(2));
    p.center_a.assign(2, Matrix::identity(2));
    p.center_f.assign(2, Matrix(2, 2));
    p.center_c.assign(2, Vec{0.0, 0.0});
    p.validate();
    std::vector<Vec> path = {{5.0, 5.0}, {-3.0, 7.0}};
    auto mu = propagate_center(p, path);
    for (const Vec& m : mu) REQUIRE(m == p.mu1);
}

TEST_CASE("propagate_center: pure feedthrough reproduces the path") {
    EllipsoidalCuProcess p;
    p.periods = 3;
    p.dim = 2;
    p.mu1 = {1.0, 1.0};
    p.radii = {1.0, 1.0, 1.0};
    p.chol.assign(3, Matrix::identity(2));
    p.center_a.assign(2, Matrix(2, 2));
    p.center_f.assign(2, Matrix::identity(2));
    p.center_c.assign(2, Vec{0.0, 0.0});
    std::vector<Vec> path = {{5.0, -1.0}, {2.0, 0.5}};
    auto mu = propagate_center(p, path);
    REQUIRE(mu[1] == path[0]);
    REQUIRE(mu[2] == path[1]);
}

TEST_CASE("propagate_center: scalar hand recursion") {
    auto p = scalar_process(3, 1.0, 0.5, 0.3, 0.1, 1.0, 1.0);
    auto mu = propagate_center(p, {{2.0}, {1.0}});
    REQUIRE(mu[1][0] == Catch::Approx(1.2).margin(1e-15));  // 0.5*1 + 0.3*2 + 0.1
    REQUIRE(mu[2][0] == Catch::Approx(1.0).margin(1e-15));  // 0.5*1.2 + 0.3*1 + 0.1
}

TEST_CASE("propagate_center rejects a path of the wrong length") {
    auto p = scalar_process(3, 1.0, 0.5, 0.3, 0.1, 1.0, 1.0);
    REQUIRE_THROWS_AS(propagate_center(p, {{1.0}}), DimensionMismatch);
}

TEST_CASE("property: propagate_center is linear in the path when offsets vanish") {
    CounterRng rng(rng_key(301));
    for (int trial = 0; trial < 25; ++trial) {
        int T = 2 + static_cast<int>(rng.below(3));
        int m = 1 + static_cast<int>(rng.below(3));
        auto proc = random_ellipsoidal_process(rng, T, m);
        proc.mu1.assign(m, 0.0);
        for (auto& c : proc.center_c) c.assign(m, 0.0);
        std::vector<Vec> pa, pb, pc;
        double alpha = -1.0 + 2.0 * rng.uniform(), beta = -1.0 + 2.0 * rng.uniform();
        for (int t = 0; t + 1 < T; ++t) {
            pa.push_back(random_vec(rng, m));
            pb.push_back(random_vec(rng, m));
            pc.push_back(scaled(pa.back(), alpha) + scaled(pb.back(), beta));
        }
        auto ma = propagate_center(proc, pa);
        auto mb = propagate_center(proc, pb);
        auto mc = propagate_center(proc, pc);
        for (int t = 0; t < T; ++t) {
            Vec expect = scaled(ma[t], alpha) + scaled(mb[t], beta);
            for (int j = 0; j < m; ++j)
                REQUIRE(mc[t][j] == Catch::Approx(expect[j]).margin(1e-10));
        }
    }
}

TEST_CASE("propagate_covariance: frozen and vanishing updates") {
    MatrixCuProcess p;
    p.periods = 3;
    p.dim = 2;
    p.means.assign(3, Vec{0.0, 0.0});
    p.radii = {1.0, 1.0, 1.0};
    p.sigma1 = Matrix::identity(2);
    p.a = {1.0, 1.0};
    p.f = {0.0, 0.0};
    p.c_mats.assign(2, Matrix(2, 2));
    p.validate();
    std::vector<Vec> path = {{3.0, 1.0}, {-2.0, 0.0}};
    auto sig = propagate_covariance(p, path);
    for (const Matrix& s : sig) REQUIRE(s == p.sigma1);

    p.a = {0.0, 0.0};
    auto zero = propagate_covariance(p, {{0.0, 0.0}, {0.0, 0.0}});  // d_t = mu_t
    REQUIRE(zero[1].max_abs() == 0.0);
    REQUIRE(zero[2].max_abs() == 0.0);
}

TEST_CASE("propagate_covariance: scalar hand value") {
    MatrixCuProcess p;
    p.periods = 2;
    p.dim = 1;
    p.means.assign(2, Vec{0.0});
    p.radii = {1.0, 1.0};
    p.sigma1 = Matrix(1, 1);
    p.sigma1(0, 0) = 2.0;
    p.a = {0.5};
    p.f = {0.25};
    p.c_mats.assign(1, Matrix(1, 1));
    p.c_mats[0](0, 0) = 0.1;
    auto sig = propagate_covariance(p, {{2.0}});
    REQUIRE(sig[1](0, 0) == Catch::Approx(2.1).margin(1e-15));  // 0.5*2 + 0.25*4 + 0.1
}

TEST_CASE("property: propagated covariances stay PSD along random paths") {
    CounterRng rng(rng_key(302));
    for (int trial = 0; trial < 20; ++trial) {
        int T = 2 + static_cast<int>(rng.below(3));
        int m = 1 + static_cast<int>(rng.below(3));
        auto proc = random_matrix_process(rng, T, m);
        std::vector<Vec> path;
        for (int t = 0; t + 1 < T; ++t) path.push_back(random_vec(rng, m, -3.0, 3.0));
        for (const Matrix& s : propagate_covariance(proc, path))
            REQUIRE(min_eigenvalue(s).value >= -1e-9);
    }
}

TEST_CASE("sample_path: zero covariance gives the deterministic center path") {
    KnapsackUncertaintyModel model;
    model.mu1 = {1.0, 2.0};
    model.phi = Matrix::identity(2);
    model.psi = scaled(Matrix::identity(2), 0.5);
    model.chol = Matrix::identity(2);
    model.r1 = model.r2 = 1.0;
    auto [d1, d2] = sample_path(model, Matrix(2, 2), 7);
    REQUIRE(d1 == model.mu1);
    Vec expect = matvec(model.phi, model.mu1) + matvec(model.psi, model.mu1);
    REQUIRE(d2 == expect);
}

TEST_CASE("sample_path: identical seeds give identical paths") {
    KnapsackUncertaintyModel model;
    model.mu1 = {1.0, 2.0, 3.0};
    model.phi = Matrix::identity(3);
    model.psi = scaled(Matrix::identity(3), -0.2);
    model.chol = Matrix::identity(3);
    model.r1 = model.r2 = 2.0;
    CounterRng rng(rng_key(303));
    Matrix sigma = curo::testing::random_psd(rng, 3, 0.04);
    auto a = sample_path(model, sigma, 7);
    auto b = sample_path(model, sigma, 7);
    REQUIRE(a.first == b.first);
    REQUIRE(a.second == b.second);
    auto c = sample_path(model, sigma, 8);
    REQUIRE(a.first != c.first);
}

TEST_CASE("sample_path: Monte Carlo mean of the second period is Phi mu1") {
    KnapsackUncertaintyModel model;
    model.mu1 = {1.0, 2.0};
    model.phi = scaled(Matrix::identity(2), 1.5);
    model.psi = Matrix(2, 2);  // no feedthrough
    model.chol = Matrix::identity(2);
    model.r1 = model.r2 = 1.0;
    Matrix sigma = scaled(Matrix::identity(2), 0.09);

    const int n = 100000;
    Vec sum(2, 0.0), sumsq(2, 0.0);
    for (int s = 0; s < n; ++s) {
        auto [d1, d2] = sample_path(model, sigma, rng_key(9000, {static_cast<uint64_t>(s)}));
        for (int j = 0; j < 2; ++j) {
            sum[j] += d2[j];
            sumsq[j] += d2[j] * d2[j];
        }
    }
    Vec target = matvec(model.phi, model.mu1);
    for (int j = 0; j < 2; ++j) {
        double mean = sum[j] / n;
        double var = (sumsq[j] - n * mean * mean) / (n - 1);
        double se = std::sqrt(var / n);
        REQUIRE(std::abs(mean - target[j]) <= 3.0 * se);
    }
}

TEST_CASE("member_ellipsoidal basics") {
    auto p = scalar_process(2, 0.0, 0.0, 0.0, 0.0, 1.0, 2.0);
    REQUIRE(member_ellipsoidal(p, 1, {0.0}, {0.0}));        // center
    REQUIRE_FALSE(member_ellipsoidal(p, 1, {0.0}, {2.5}));  // outside radius 2

    EllipsoidalCuProcess q;
    q.periods = 1;
    q.dim = 2;
    q.mu1 = {0.0, 0.0};
    q.radii = {1.0};
    q.chol = {Matrix::identity(2)};
    REQUIRE(member_ellipsoidal(q, 1, {1.0, 1.0}, {1.6, 1.8}));  // boundary, norm 1
    REQUIRE_FALSE(member_ellipsoidal(q, 1, {1.0, 1.0}, {1.7, 1.8}));
}

TEST_CASE("member_ellipsoidal: invariant under simultaneous rotation") {
    CounterRng rng(rng_key(304));
    for (int trial = 0; trial < 30; ++trial) {
        EllipsoidalCuProcess p;
        p.periods = 1;
        p.dim = 2;
        p.mu1 = random_vec(rng, 2);
        p.radii = {0.5 + rng.uniform()};
        p.chol = {cholesky(curo::testing::random_psd(rng, 2))};
        Vec d = random_vec(rng, 2, -2.0, 2.0);

        double theta = 6.28318530717958647 * rng.uniform();
        Matrix rot(2, 2);
        rot(0, 0) = std::cos(theta);
        rot(0, 1) = -std::sin(theta);
        rot(1, 0) = std::sin(theta);
        rot(1, 1) = std::cos(theta);

        EllipsoidalCuProcess pr = p;
        pr.chol = {matmul(rot, p.chol[0])};
        pr.mu1 = matvec(rot, p.mu1);
        bool base = member_ellipsoidal(p, 1, p.mu1, d);
        bool rotated = member_ellipsoidal(pr, 1, pr.mu1, matvec(rot, d));
        REQUIRE(base == rotated);
    }
}

TEST_CASE("member_polyhedral: box with and without shift") {
    PolyhedralCuProcess p;
    p.periods = 2;
    p.dim = 1;
    // Stage 1: 0 <= d <= 1 as G=(1;-1), g=(0;-1).
    Matrix g1(2, 1);
    g1(0, 0) = 1.0;
    g1(1, 0) = -1.0;
    p.g_mat = {g1, g1};
    p.g_vec = {{0.0, -1.0}, {-1.0, -1.0}};
    Matrix d1(2, 1), d2(2, 1);
    d2(0, 0) = 0.3;   // lower bound moves up with d_prev
    d2(1, 0) = -0.3;  // upper bound moves up with d_prev
    p.delta = {d1, d2};
    p.validate();

    REQUIRE(member_polyhedral(p, 1, {}, {0.5}));
    REQUIRE_FALSE(member_polyhedral(p, 1, {}, {1.5}));
    // Stage 2 base interval [-1,1] translated by 0.3*d_prev: at d_prev=1 it
    // is [-0.7, 1.3].
    REQUIRE(member_polyhedral(p, 2, {1.0}, {1.2}));
    REQUIRE(member_polyhedral(p, 2, {1.0}, {-0.7}));
    REQUIRE_FALSE(member_polyhedral(p, 2, {1.0}, {-0.8}));
    REQUIRE_FALSE(member_polyhedral(p, 2, {1.0}, {1.4}));
}

TEST_CASE("polyhedral validation rejects unbounded and empty stages") {
    PolyhedralCuProcess p;
    p.periods = 1;
    p.dim = 1;
    Matrix half(1, 1);
    half(0, 0) = 1.0;
    p.g_mat = {half};  // d >= 0 only: unbounded above
    p.g_vec = {{0.0}};
    p.delta = {Matrix(1, 1)};
    REQUIRE_THROWS_AS(p.validate(), BadInput);

    Matrix g(2, 1);
    g(0, 0) = 1.0;
    g(1, 0) = -1.0;
    p.g_mat = {g};
    p.g_vec = {{1.0, 1.0}};  // d >= 1 and d <= -1: empty
    p.delta = {Matrix(2, 1)};
    REQUIRE_THROWS_AS(p.validate(), BadInput);
}
