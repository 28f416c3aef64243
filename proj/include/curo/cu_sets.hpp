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

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "curo/errors.hpp"
#include "curo/lp.hpp"
#include "curo/matrix.hpp"
#include "curo/rng.hpp"

// Connected uncertainty processes: per-period set families whose parameters
// (ellipsoid center, covariance, polyhedron right-hand side, moment bounds)
// are driven by the previous period's realization. All types are immutable
// after validation and all operations are pure.

namespace curo {

/// Ellipsoids with a recursively updated center:
///   period t set = { mu_t + L_t u : |u|_2 <= r_t },
///   mu_{t+1} = A_t mu_t + F_t d_t + c_t  for the realized d_t.
struct EllipsoidalCuProcess {
    int periods = 0;
    int dim = 0;
    Vec mu1;
    Vec radii;                   // size periods
    std::vector<Matrix> chol;    // size periods, dim x dim lower-triangular
    std::vector<Matrix> center_a;  // size periods-1
    std::vector<Matrix> center_f;  // size periods-1
    std::vector<Vec> center_c;     // size periods-1

    void validate() const {
        if (periods < 1 || dim < 1) throw BadInput("ellipsoidal process: empty horizon or dim");
        auto square = [&](const Matrix& m) { return m.rows() == dim && m.cols() == dim; };
        if (static_cast<int>(mu1.size()) != dim || !all_finite(mu1))
            throw DimensionMismatch("ellipsoidal process: mu1");
        if (static_cast<int>(radii.size()) != periods)
            throw DimensionMismatch("ellipsoidal process: radii");
        for (double r : radii)
            if (!(r >= 0.0)) throw BadInput("ellipsoidal process: negative radius");
        if (static_cast<int>(chol.size()) != periods)
            throw DimensionMismatch("ellipsoidal process: cholesky factors");
        for (const Matrix& l : chol)
            if (!square(l) || !l.all_finite())
                throw DimensionMismatch("ellipsoidal process: cholesky factor shape");
        if (static_cast<int>(center_a.size()) != periods - 1 ||
            static_cast<int>(center_f.size()) != periods - 1 ||
            static_cast<int>(center_c.size()) != periods - 1)
            throw DimensionMismatch("ellipsoidal process: recursion coefficient count");
        for (int t = 0; t + 1 < periods; ++t)
            if (!square(center_a[t]) || !square(center_f[t]) ||
                static_cast<int>(center_c[t].size()) != dim)
                throw DimensionMismatch("ellipsoidal process: recursion coefficient shape");
    }
};

/// Ellipsoids with fixed centers and a realization-driven covariance:
///   Sigma_{t+1} = a_t Sigma_t + f_t (d_t - mu_t)(d_t - mu_t)^T + C_t.
struct MatrixCuProcess {
    int periods = 0;
    int dim = 0;
    std::vector<Vec> means;  // size periods
    Vec radii;
    Matrix sigma1;
    Vec a;                       // size periods-1, >= 0
    Vec f;                       // size periods-1, >= 0
    std::vector<Matrix> c_mats;  // size periods-1, PSD

    void validate() const {
        if (periods < 1 || dim < 1) throw BadInput("matrix process: empty horizon or dim");
        if (static_cast<int>(means.size()) != periods ||
            static_cast<int>(radii.size()) != periods)
            throw DimensionMismatch("matrix process: means/radii count");
        for (const Vec& m : means)
            if (static_cast<int>(m.size()) != dim) throw DimensionMismatch("matrix process: mean");
        for (double r : radii)
            if (!(r >= 0.0)) throw BadInput("matrix process: negative radius");
        if (sigma1.rows() != dim || sigma1.cols() != dim)
            throw DimensionMismatch("matrix process: sigma1 shape");
        cholesky(sigma1);  // PSD check
        if (static_cast<int>(a.size()) != periods - 1 ||
            static_cast<int>(f.size()) != periods - 1 ||
            static_cast<int>(c_mats.size()) != periods - 1)
            throw DimensionMismatch("matrix process: update coefficient count");
        for (int t = 0; t + 1 < periods; ++t) {
            if (!(a[t] >= 0.0) || !(f[t] >= 0.0))
                throw BadInput("matrix process: negative update scalar");
            if (c_mats[t].rows() != dim || c_mats[t].cols() != dim)
                throw DimensionMismatch("matrix process: C_t shape");
            cholesky(c_mats[t]);  // PSD check
        }
    }
};

/// Polyhedra whose right-hand side shifts with the previous realization:
///   period t set = { d : G_t d >= g_t + Delta_t d_{t-1} },  Delta_1 = 0.
struct PolyhedralCuProcess {
    int periods = 0;
    int dim = 0;
    std::vector<Matrix> g_mat;
    std::vector<Vec> g_vec;
    std::vector<Matrix> delta;

    /// Structural checks plus the construction guarantee: along the nominal
    /// path (stage centroid fed forward) every stage polyhedron is nonempty
    /// and bounded, certified by per-axis LPs. Boundedness of each stage
    /// implies boundedness of the joint set, since recession directions
    /// vanish stage by stage.
    void validate() const {
        if (periods < 1 || dim < 1) throw BadInput("polyhedral process: empty horizon or dim");
        if (static_cast<int>(g_mat.size()) != periods ||
            static_cast<int>(g_vec.size()) != periods ||
            static_cast<int>(delta.size()) != periods)
            throw DimensionMismatch("polyhedral process: stage count");
        for (int t = 0; t < periods; ++t) {
            int k = g_mat[t].rows();
            if (g_mat[t].cols() != dim || static_cast<int>(g_vec[t].size()) != k ||
                delta[t].rows() != k || delta[t].cols() != dim)
                throw DimensionMismatch("polyhedral process: stage " + std::to_string(t + 1));
        }
        if (delta[0].max_abs() != 0.0)
            throw BadInput("polyhedral process: Delta_1 must be zero");

        Vec nominal(dim, 0.0);
        for (int t = 0; t < periods; ++t) {
            Vec shift = t == 0 ? Vec(g_mat[t].rows(), 0.0) : matvec(delta[t], nominal);
            Vec centroid(dim, 0.0);
            for (int axis = 0; axis < dim; ++axis) {
                for (double sgn : {1.0, -1.0}) {
                    LpProblem p;
                    for (int j = 0; j < dim; ++j) p.add_var(j == axis ? sgn : 0.0, -kInf, kInf);
                    p.sense = LpSense::maximize;
                    for (int r = 0; r < g_mat[t].rows(); ++r)
                        p.add_row(g_mat[t].row(r), RowSense::ge, g_vec[t][r] + shift[r]);
                    LpSolution s = solve_lp(p);
                    if (s.status == LpStatus::unbounded)
                        throw BadInput("polyhedral process: stage " + std::to_string(t + 1) +
                                       " is unbounded");
                    if (s.status == LpStatus::infeasible)
                        throw BadInput("polyhedral process: stage " + std::to_string(t + 1) +
                                       " is empty at the nominal path");
                    axpy(0.5 / dim, s.primal, centroid);
                }
            }
            nominal = centroid;
        }
    }
};

/// Finite-support moment ambiguity sets with a realization-driven mean box:
/// the period-t conditional mean lies in  A_t d_{t-1} + b_t +- delta_t  and
/// the second moment about the anchor is capped by sigma_cap_t.
struct MomentAmbiguityProcess {
    int periods = 0;
    int dim = 0;
    std::vector<std::vector<Vec>> support;  // size periods
    Vec mu1;
    std::vector<Matrix> mean_a;  // size periods-1, drives periods 2..T
    std::vector<Vec> mean_b;     // size periods-1
    std::vector<Vec> delta;      // size periods, elementwise >= 0
    std::vector<Vec> anchor;     // size periods
    std::vector<Matrix> sigma_cap;  // size periods, PSD

    void validate() const {
        if (periods < 1 || dim < 1) throw BadInput("moment process: empty horizon or dim");
        if (static_cast<int>(support.size()) != periods ||
            static_cast<int>(delta.size()) != periods ||
            static_cast<int>(anchor.size()) != periods ||
            static_cast<int>(sigma_cap.size()) != periods)
            throw DimensionMismatch("moment process: per-period field count");
        if (static_cast<int>(mean_a.size()) != periods - 1 ||
            static_cast<int>(mean_b.size()) != periods - 1)
            throw DimensionMismatch("moment process: mean coefficient count");
        if (static_cast<int>(mu1.size()) != dim) throw DimensionMismatch("moment process: mu1");
        for (int t = 0; t < periods; ++t) {
            if (support[t].size() < 2)
                throw BadInput("moment process: fewer than two support points in period " +
                               std::to_string(t + 1));
            for (const Vec& pt : support[t])
                if (static_cast<int>(pt.size()) != dim || !all_finite(pt))
                    throw DimensionMismatch("moment process: support point shape");
            for (size_t i = 0; i < support[t].size(); ++i)
                for (size_t j = i + 1; j < support[t].size(); ++j)
                    if (support[t][i] == support[t][j])
                        throw BadInput("moment process: duplicate support points");
            if (static_cast<int>(delta[t].size()) != dim ||
                static_cast<int>(anchor[t].size()) != dim)
                throw DimensionMismatch("moment process: delta/anchor shape");
            for (double dv : delta[t])
                if (!(dv >= 0.0)) throw BadInput("moment process: negative mean slack");
            if (sigma_cap[t].rows() != dim || sigma_cap[t].cols() != dim)
                throw DimensionMismatch("moment process: covariance cap shape");
            cholesky(sigma_cap[t]);  // PSD check
        }
        for (int t = 0; t + 1 < periods; ++t)
            if (mean_a[t].rows() != dim || mean_a[t].cols() != dim ||
                static_cast<int>(mean_b[t].size()) != dim)
                throw DimensionMismatch("moment process: mean coefficient shape");
    }

    /// Conditional mean center of period t (1-based) given d_{t-1}.
    Vec mean_center(int t, const Vec& d_prev) const {
        if (t == 1) return mu1;
        Vec c = matvec(mean_a[t - 2], d_prev);
        axpy(1.0, mean_b[t - 2], c);
        return c;
    }
};

/// Two-period ellipsoidal model for budgeted selection experiments: the
/// second-period center is Phi mu_1 + Psi d_1 and both periods share one
/// Cholesky factor.
struct KnapsackUncertaintyModel {
    Vec mu1;
    Matrix phi;
    Matrix psi;
    Matrix chol;
    double r1 = 0.0;
    double r2 = 0.0;

    int dim() const { return static_cast<int>(mu1.size()); }

    void validate() const {
        int m = dim();
        if (m < 1) throw BadInput("knapsack model: empty dimension");
        if (phi.rows() != m || phi.cols() != m || psi.rows() != m || psi.cols() != m ||
            chol.rows() != m || chol.cols() != m)
            throw DimensionMismatch("knapsack model: matrix shapes");
        if (!(r1 >= 0.0) || !(r2 >= 0.0)) throw BadInput("knapsack model: negative radius");
    }

    EllipsoidalCuProcess as_process() const {
        EllipsoidalCuProcess p;
        p.periods = 2;
        p.dim = dim();
        p.mu1 = mu1;
        p.radii = {r1, r2};
        p.chol = {chol, chol};
        p.center_a = {phi};
        p.center_f = {psi};
        p.center_c = {Vec(dim(), 0.0)};
        return p;
    }
};

/// Applies the center recursion along a realized path d_1..d_{T-1};
/// returns mu_1..mu_T.
inline std::vector<Vec> propagate_center(const EllipsoidalCuProcess& proc,
                                         const std::vector<Vec>& path) {
    if (static_cast<int>(path.size()) != proc.periods - 1)
        throw DimensionMismatch("propagate_center: path length must be periods-1");
    for (const Vec& d : path)
        if (static_cast<int>(d.size()) != proc.dim)
            throw DimensionMismatch("propagate_center: path vector dimension");
    std::vector<Vec> mu;
    mu.reserve(proc.periods);
    mu.push_back(proc.mu1);
    for (int t = 0; t + 1 < proc.periods; ++t) {
        Vec next = matvec(proc.center_a[t], mu. back());
        axpy(1.0, matvec(proc.center_f[t], path[t]), next);
        axpy(1.0, proc.center_c[t], next);
        mu.push_back(std::move(next));
    }
    return mu;
}

/// Applies the covariance recursion along a realized path; returns
/// Sigma_1..Sigma_T. Outputs stay positive semidefinite because every update
/// term is.
inline std::vector<Matrix> propagate_covariance(const MatrixCuProcess& proc,
                                                const std::vector<Vec>& path) {
    if (static_cast<int>(path.size()) != proc.periods - 1)
        throw DimensionMismatch("propagate_covariance: path length must be periods-1");
    for (const Vec& d : path)
        if (static_cast<int>(d.size()) != proc.dim)
            throw DimensionMismatch("propagate_covariance: path vector dimension");
    std::vector<Matrix> sig;
    sig.reserve(proc.periods);
    sig.push_back(proc.sigma1);
    for (int t = 0; t + 1 < proc.periods; ++t) {
        Matrix next = scaled(sig.back(), proc.a[t]);
        Vec dev = path[t] - proc.means[t];
        next = next + outer(dev, proc.f[t]) + proc.c_mats[t];
        sig.push_back(std::move(next));
    }
    return sig;
}

/// Draws one two-period realization: d_1 = mu_1 + eps_1 and
/// d_2 = Phi mu_1 + Psi d_1 + eps_2 with eps ~ N(0, sigma) through the
/// Cholesky factor of sigma. Streams are keyed by (seed, period, component),
/// so equal seeds reproduce paths bit for bit. Draws are NOT truncated to
/// the ellipsoids.
inline std::pair<Vec, Vec> sample_path(const KnapsackUncertaintyModel& model,
                                       const Matrix& sigma, uint64_t rng_seed) {
    model.validate();
    int m = model.dim();
    if (sigma.rows() != m || sigma.cols() != m)
        throw DimensionMismatch("sample_path: sigma shape");
    Matrix l = cholesky(sigma);

    auto noise = [&](uint64_t period) {
        Vec z(m);
        for (int i = 0; i < m; ++i)
            z[i] = normal_at(rng_key(rng_seed, {period, static_cast<uint64_t>(i)}), 0);
        return matvec(l, z);
    };
    Vec d1 = model.mu1 + noise(1);
    Vec d2 = matvec(model.phi, model.mu1) + matvec(model.psi, d1) + noise(2);
    return {std::move(d1), std::move(d2)};
}

/// Membership in the period-t ellipsoid with the given realized center:
/// true iff min{ |u| : L_t u = d - mu_t } <= r_t + 1e-9. Zero columns of a
/// singular factor force the matching component of d - mu_t to vanish.
inline bool member_ellipsoidal(const EllipsoidalCuProcess& proc, int t, const Vec& mu_t,
                               const Vec& d) {
    if (t < 1 || t > proc.periods) throw BadInput("member_ellipsoidal: period out of range");
    if (static_cast<int>(mu_t.size()) != proc.dim || static_cast<int>(d.size()) != proc.dim)
        throw DimensionMismatch("member_ellipsoidal: vector dimension");
    const Matrix& l = proc.chol[t - 1];
    double scale = 1.0 + l.max_abs();
    Vec res = d - mu_t;
    Vec u(proc.dim, 0.0);
    // Forward substitution; a zero pivot contributes nothing, so its row
    // residual must already be zero for membership.
    for (int i = 0; i < proc.dim; ++i) {
        double s = res[i];
        for (int j = 0; j < i; ++j) s -= l(i, j) * u[j];
        if (std::abs(l(i, i)) <= 1e-12 * scale) {
            if (std::abs(s) > 1e-9 * scale) return false;
            u[i] = 0.0;
        } else {
            u[i] = s / l(i, i);
        }
    }
    return two_norm(u) <= proc.radii[t - 1] + 1e-9;
}

/// Membership in the period-t polyhedron given the previous realization:
/// all rows of G_t d >= g_t + Delta_t d_prev within 1e-9.
inline bool member_polyhedral(const PolyhedralCuProcess& proc, int t, const Vec& d_prev,
                              const Vec& d) {
    if (t < 1 || t > proc.periods) throw BadInput("member_polyhedral: period out of range");
    if (static_cast<int>(d.size()) != proc.dim)
        throw DimensionMismatch("member_polyhedral: vector dimension");
    Vec lhs = matvec(proc.g_mat[t - 1], d);
    Vec rhs = proc.g_vec[t - 1];
    if (t > 1) {
        if (static_cast<int>(d_prev.size()) != proc.dim)
            throw DimensionMismatch("member_polyhedral: previous realization dimension");
        axpy(1.0, matvec(proc.delta[t - 1], d_prev), rhs);
    }
    for (size_t i = 0; i < lhs.size(); ++i)
        if (lhs[i] < rhs[i] - 1e-9) return false;
    return true;
}

}  // namespace curo
