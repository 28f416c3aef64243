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

#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "curo/cu_sets.hpp"
#include "curo/matrix.hpp"
#include "curo/rng.hpp"

// Seeded random instances for the verification suites. Every draw flows
// through CounterRng, so a fixed seed reproduces the same instance set.

namespace curo::gen {

inline Vec random_vec(CounterRng& rng, int n, double lo = -1.0, double hi = 1.0) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * rng.uniform();
    return v;
}

inline Matrix random_matrix(CounterRng& rng, int rows, int cols, double lo = -1.0,
                            double hi = 1.0) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = lo + (hi - lo) * rng.uniform();
    return m;
}

/// Random PSD matrix A A^T scaled so the largest diagonal is `diag_scale`.
inline Matrix random_psd(CounterRng& rng, int n, double diag_scale = 1.0) {
    Matrix a = random_matrix(rng, n, n);
    Matrix s = matmul(a, a.transposed());
    double dmax = 0.0;
    for (int i = 0; i < n; ++i) dmax = std::max(dmax, s(i, i));
    if (dmax > 0.0) s = scaled(s, diag_scale / dmax);
    return s;
}

inline EllipsoidalCuProcess random_ellipsoidal_process(CounterRng& rng, int periods, int dim) {
    EllipsoidalCuProcess p;
    p.periods = periods;
    p.dim = dim;
    p.mu1 = random_vec(rng, dim, -2.0, 2.0);
    p.radii.resize(periods);
    for (double& r : p.radii) r = 2.0 * rng.uniform();
    for (int t = 0; t < periods; ++t) p.chol.push_back(cholesky(random_psd(rng, dim)));
    for (int t = 0; t + 1 < periods; ++t) {
        p.center_a.push_back(random_matrix(rng, dim, dim, -0.6, 0.6));
        p.center_f.push_back(random_matrix(rng, dim, dim, -0.6, 0.6));
        p.center_c.push_back(random_vec(rng, dim, -0.5, 0.5));
    }
    p.validate();
    return p;
}

inline MatrixCuProcess random_matrix_process(CounterRng& rng, int periods, int dim) {
    MatrixCuProcess p;
    p.periods = periods;
    p.dim = dim;
    for (int t = 0; t < periods; ++t) p.means.push_back(random_vec(rng, dim, -1.0, 1.0));
    p.radii.resize(periods);
    for (double& r : p.radii) r = 0.2 + 1.5 * rng.uniform();
    p.sigma1 = random_psd(rng, dim);
    for (int t = 0; t + 1 < periods; ++t) {
        p.a.push_back(0.2 + rng.uniform());
        p.f.push_back(0.8 * rng.uniform());
        p.c_mats.push_back(random_psd(rng, dim, 0.3));
    }
    p.validate();
    return p;
}

/// Bounded polyhedral stages: a box [-1,1]^dim plus a few random cutting
/// rows, with small rhs shifts so every reachable stage set stays nonempty.
inline PolyhedralCuProcess random_polyhedral_process(CounterRng& rng, int periods, int dim,
                                                     int extra_rows) {
    PolyhedralCuProcess p;
    p.periods = periods;
    p.dim = dim;
    for (int t = 0; t < periods; ++t) {
        int k = 2 * dim + (t == 0 ? 0 : extra_rows);
        Matrix g(k, dim);
        Vec gv(k);
        Matrix dl(k, dim);
        for (int j = 0; j < dim; ++j) {
            g(j, j) = 1.0;
            gv[j] = -1.0;
            g(dim + j, j) = -1.0;
            gv[dim + j] = -1.0;
        }
        for (int r = 2 * dim; r < k; ++r) {
            Vec a = random_vec(rng, dim, -1.0, 1.0);
            for (int j = 0; j < dim; ++j) g(r, j) = a[j];
            // Keep the row slack at the origin so the box interior survives.
            gv[r] = -(1.0 + rng.uniform()) * (1.0 + two_norm(a));
        }
        if (t > 0)
            for (int r = 0; r < k; ++r)
                for (int j = 0; j < dim; ++j) dl(r, j) = 0.25 * (2.0 * rng.uniform() - 1.0);
        p.g_mat.push_back(std::move(g));
        p.g_vec.push_back(std::move(gv));
        p.delta.push_back(std::move(dl));
    }
    p.validate();
    return p;
}

/// Feasible by construction: the support of every period starts with
/// hypercube corners at +-0.9 (so the hull always contains the reachable
/// mean centers) and the second-moment budget dominates a point mass there.
/// Pass support_points >= 2^dim.
inline MomentAmbiguityProcess random_moment_process(CounterRng& rng, int periods, int dim,
                                                    int support_points) {
    MomentAmbiguityProcess p;
    p.periods = periods;
    p.dim = dim;
    int corners = 1 << dim;
    for (int t = 0; t < periods; ++t) {
        std::vector<Vec> pts;
        for (int c = 0; c < corners && c < support_points; ++c) {
            Vec pt(dim);
            for (int j = 0; j < dim; ++j) pt[j] = (c >> j) & 1 ? 0.9 : -0.9;
            pts.push_back(std::move(pt));
        }
        while (static_cast<int>(pts.size()) < support_points)
            pts.push_back(random_vec(rng, dim, -1.0, 1.0));
        p.support.push_back(std::move(pts));
        p.delta.push_back(random_vec(rng, dim, 0.1, 0.4));
        p.anchor.push_back(random_vec(rng, dim, -0.2, 0.2));
        Matrix cap = random_psd(rng, dim, 0.8);
        for (int j = 0; j < dim; ++j) cap(j, j) += 0.8;  // roomy second-moment budget
        p.sigma_cap.push_back(std::move(cap));
    }
    p.mu1 = random_vec(rng, dim, -0.3, 0.3);
    for (int t = 0; t + 1 < periods; ++t) {
        p.mean_a.push_back(random_matrix(rng, dim, dim, -0.25 / dim, 0.25 / dim));
        p.mean_b.push_back(random_vec(rng, dim, -0.05, 0.05));
    }
    p.validate();
    return p;
}

}  // namespace curo::gen
