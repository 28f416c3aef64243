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
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "curo/constraint_system.hpp"
#include "curo/cu_sets.hpp"
#include "curo/errors.hpp"
#include "curo/lp.hpp"
#include "curo/matrix.hpp"
#include "curo/rng.hpp"

// Robust counterparts of the budgeted linear constraint
//   sum_t d_t^T x_t <= B   for all paths through connected sets,
// one reformulation per set family, plus independent worst-case oracles used
// to verify them.

namespace curo {

// ---------------------------------------------------------------------------
// Center-connected ellipsoids.
// ---------------------------------------------------------------------------

/// Backward recursion trace: per period the aggregated decision y_k, the
/// accumulated offset term C_k, and the accumulated protection term R_k.
/// Terminal values: y_T = x_T, C_T = 0, R_T = r_T |L_T^T x_T|.
struct CenterCuRecursion {
    std::vector<Vec> y;
    Vec offsets;      // C_k
    Vec protection;   // R_k
};

struct CenterCuResult {
    double lhs = 0.0;
    CenterCuRecursion trace;
};

/// Worst-case value of the budget constraint over center-connected
/// ellipsoids:  mu_1^T y_1 + C_1 + R_1. The protection term carries
/// x_k + F_k^T y_{k+1} inside the norm, matching the recursion that
/// reproduces the exact one-dimensional nested maximum.
inline CenterCuResult center_cu_lhs(const std::vector<Vec>& x,
                                    const EllipsoidalCuProcess& proc) {
    proc.validate();
    int T = proc.periods, m = proc.dim;
    if (static_cast<int>(x.size()) != T)
        throw DimensionMismatch("center_cu_lhs: need one decision vector per period");
    for (const Vec& xt : x)
        if (static_cast<int>(xt.size()) != m)
            throw DimensionMismatch("center_cu_lhs: decision dimension");

    CenterCuRecursion tr;
    tr.y.assign(T, Vec());
    tr.offsets.assign(T, 0.0);
    tr.protection.assign(T, 0.0);
    tr.y[T - 1] = x[T - 1];
    tr.protection[T - 1] = proc.radii[T - 1] * two_norm(matvec_t(proc.chol[T - 1], x[T - 1]));
    for (int k = T - 2; k >= 0; --k) {
        const Vec& ynext = tr.y[k + 1];
        Vec y = x[k];
        axpy(1.0, matvec_t(proc.center_f[k], ynext), y);
        axpy(1.0, matvec_t(proc.center_a[k], ynext), y);
        tr.y[k] = std::move(y);
        tr.offsets[k] = dot(proc.center_c[k], ynext) + tr.offsets[k + 1];
        Vec inner = x[k];
        axpy(1.0, matvec_t(proc.center_f[k], ynext), inner);
        tr.protection[k] = proc.radii[k] * two_norm(matvec_t(proc.chol[k], inner)) +
                           tr.protection[k + 1];
    }
    CenterCuResult out;
    out.lhs = dot(proc.mu1, tr.y[0]) + tr.offsets[0] + tr.protection[0];
    out.trace = std::move(tr);
    return out;
}

struct Exact1d {};
struct MonteCarlo {
    int samples = 10000;
    uint64_t seed = 0;
};
using OracleMode = std::variant<Exact1d, MonteCarlo>;

/// Independent evaluation of the nested worst case
///   max_{d_1} { d_1^T x_1 + max_{d_2} { ... } }.
/// Exact1d (dim 1 only): each stage objective is affine in the realization,
/// so the nested maximum is attained at interval endpoints; all 2^T endpoint
/// combinations are enumerated. MonteCarlo (any dim): spherical boundary
/// samples propagated through the center recursion; a lower bound.
inline double nested_worst_case_oracle(const std::vector<Vec>& x,
                                       const EllipsoidalCuProcess& proc,
                                       const OracleMode& mode) {
    proc.validate();
    int T = proc.periods, m = proc.dim;
    if (static_cast<int>(x.size()) != T)
        throw DimensionMismatch("nested_worst_case_oracle: decision count");

    if (std::holds_alternative<Exact1d>(mode)) {
        if (m != 1)
            throw ModeUnsupportedForDimension("exact1d oracle requires dimension 1");
        double best = -kInf;
        for (uint32_t mask = 0; mask < (1u << T); ++mask) {
            double mu = proc.mu1[0];
            double total = 0.0;
            for (int t = 0; t < T; ++t) {
                double sign = (mask >> t) & 1 ? 1.0 : -1.0;
                double d = mu + sign * proc.radii[t] * proc.chol[t](0, 0);
                total += d * x[t][0];
                if (t + 1 < T)
                    mu = proc.center_a[t](0, 0) * mu + proc.center_f[t](0, 0) * d +
                         proc.center_c[t][0];
            }
            best = std::max(best, total);
        }
        return best;
    }

    const MonteCarlo& mc = std::get<MonteCarlo>(mode);
    double best = -kInf;
    for (int s = 0; s < mc.samples; ++s) {
        Vec mu = proc.mu1;
        double total = 0.0;
        for (int t = 0; t < T; ++t) {
            Vec u(m);
            for (int j = 0; j < m; ++j)
                u[j] = normal_at(rng_key(mc.seed, {static_cast<uint64_t>(s),
                                                   static_cast<uint64_t>(t),
                                                   static_cast<uint64_t>(j)}),
                                 0);
            double nrm = two_norm(u);
            double scale = nrm > 0.0 ? proc.radii[t] / nrm : 0.0;
            for (double& v : u) v *= scale;
            Vec d = mu + matvec(proc.chol[t], u);
            total += dot(d, x[t]);
            if (t + 1 < T) {
                Vec next = matvec(proc.center_a[t], mu);
                axpy(1.0, matvec(proc.center_f[t], d), next);
                axpy(1.0, proc.center_c[t], next);
                mu = std::move(next);
            }
        }
        best = std::max(best, total);
    }
    return best;
}

// ---------------------------------------------------------------------------
// Covariance-connected ellipsoids.
// ---------------------------------------------------------------------------

/// Sign assignment n_{k,t} in {-1,+1} for 1 <= k < t <= T, flattened in
/// lexicographic (k,t) order.
using SignVector = std::vector<int>;

inline int sign_index(int k, int t, int periods) {
    // (k,t) with 1 <= k < t <= periods.
    return (k - 1) * periods - (k * (k + 1)) / 2 + (t - 1);
}

/// All 2^{T(T-1)/2} sign vectors in lexicographic order (-1 before +1).
/// Capped at T = 5; the count is inherent to the case split.
inline std::vector<SignVector> enumerate_sign_vectors(int periods) {
    if (periods < 1) throw BadInput("enumerate_sign_vectors: empty horizon");
    if (periods > 5) throw HorizonTooLarge("enumerate_sign_vectors: horizon capped at 5");
    int k = periods * (periods - 1) / 2;
    std::vector<SignVector> out;
    out.reserve(1u << k);
    for (uint32_t mask = 0; mask < (1u << k); ++mask) {
        SignVector n(k);
        for (int i = 0; i < k; ++i) n[i] = (mask >> (k - 1 - i)) & 1 ? 1 : -1;
        out.push_back(std::move(n));
    }
    return out;
}

struct MatrixCuResult {
    double lhs = 0.0;
    SignVector worst_sign;
};

/// Conservative worst-case value of the budget constraint under the
/// covariance recursion. The quadratic update term is split by sign
/// enumeration; the value reported is the maximum over all sign vectors,
/// which is what feasibility against a budget requires.
inline MatrixCuResult matrix_cu_lhs(const std::vector<Vec>& x, const MatrixCuProcess& proc) {
    proc.validate();
    int T = proc.periods, m = proc.dim;
    if (T > 5) throw HorizonTooLarge("matrix_cu_lhs: horizon capped at 5");
    if (static_cast<int>(x.size()) != T)
        throw DimensionMismatch("matrix_cu_lhs: decision count");
    for (const Vec& xt : x)
        if (static_cast<int>(xt.size()) != m)
            throw DimensionMismatch("matrix_cu_lhs: decision dimension");

    Matrix l1 = cholesky(proc.sigma1);
    // decay(k, t) = product of a_j for j in [k, t-1], decay(t, t) = 1.
    std::vector<Vec> decay(T + 2, Vec(T + 1, 1.0));
    for (int k = 1; k <= T; ++k)
        for (int t = k + 1; t <= T; ++t) decay[k][t] = decay[k][t - 1] * proc.a[t - 2];

    double mean_term = 0.0;
    for (int t = 0; t < T; ++t) mean_term += dot(proc.means[t], x[t]);

    MatrixCuResult out;
    out.lhs = -kInf;
    for (const SignVector& n : enumerate_sign_vectors(T)) {
        std::vector<Vec> y(T);
        y[T - 1] = x[T - 1];
        for (int k = T - 1; k >= 1; --k) {
            Vec yk = x[k - 1];
            for (int t = k + 1; t <= T; ++t) {
                double w = n[sign_index(k, t, T)] * proc.radii[t - 1] *
                           std::sqrt(decay[k + 1][t] * proc.f[k - 1]);
                axpy(w, y[t - 1], yk);
            }
            y[k - 1] = std::move(yk);
        }
        double protect = 0.0;
        for (int t = 1; t <= T; ++t)
            protect += proc.radii[t - 1] * std::sqrt(decay[1][t]) *
                       two_norm(matvec_t(l1, y[t - 1]));
        double offset = 0.0;
        for (int k = 1; k <= T - 1; ++k)
            for (int t = k + 1; t <= T; ++t) {
                double q = dot(y[t - 1], matvec(proc.c_mats[k - 1], y[t - 1]));
                offset += proc.radii[t - 1] * std::sqrt(decay[k + 1][t] * std::max(q, 0.0));
            }
        double lhs = mean_term + protect + offset;
        if (lhs > out.lhs) {
            out.lhs = lhs;
            out.worst_sign = n;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Right-hand-side-connected polyhedra.
// ---------------------------------------------------------------------------

struct PolyhedralWorstCase {
    double value = 0.0;
    std::vector<Vec> path;
};

/// Joint linear program whose optimum is the exact worst case:
///   max sum_t d_t^T x_t  s.t.  G_1 d_1 >= g_1,  G_t d_t >= g_t + Delta_t d_{t-1}.
inline LpProblem polyhedral_joint_lp(const std::vector<Vec>& x,
                                     const PolyhedralCuProcess& proc) {
    int T = proc.periods, m = proc.dim;
    if (static_cast<int>(x.size()) != T)
        throw DimensionMismatch("polyhedral_joint_lp: decision count");
    LpProblem p;
    p.sense = LpSense::maximize;
    for (int t = 0; t < T; ++t) {
        if (static_cast<int>(x[t].size()) != m)
            throw DimensionMismatch("polyhedral_joint_lp: decision dimension");
        for (int j = 0; j < m; ++j) p.add_var(x[t][j], -kInf, kInf);
    }
    for (int t = 0; t < T; ++t)
        for (int r = 0; r < proc.g_mat[t].rows(); ++r) {
            std::vector<std::pair<int, double>> terms;
            for (int j = 0; j < m; ++j) {
                double g = proc.g_mat[t](r, j);
                if (g != 0.0) terms.emplace_back(t * m + j, g);
                if (t > 0) {
                    double dl = proc.delta[t](r, j);
                    if (dl != 0.0) terms.emplace_back((t - 1) * m + j, -dl);
                }
            }
            p.add_terms(terms, RowSense::ge, proc.g_vec[t][r]);
        }
    return p;
}

inline PolyhedralWorstCase polyhedral_worst_case(const std::vector<Vec>& x,
                                                 const PolyhedralCuProcess& proc) {
    int T = proc.periods, m = proc.dim;
    LpSolution s = solve_lp(polyhedral_joint_lp(x, proc));
    if (s.status == LpStatus::unbounded)
        throw LpUnbounded("polyhedral_worst_case: joint polyhedron is unbounded");
    if (s.status == LpStatus::infeasible)
        throw LpInfeasible("polyhedral_worst_case: joint polyhedron is empty");
    PolyhedralWorstCase out;
    out.value = s.objective;
    for (int t = 0; t < T; ++t)
        out.path.emplace_back(s.primal.begin() + t * m, s.primal.begin() + (t + 1) * m);
    return out;
}

/// Dual system certifying the budget constraint over the connected
/// polyhedra: one nonpositive multiplier block q_t per stage with
///   sum_t q_t^T g_t <= B,
///   q_t^T G_t - q_{t+1}^T Delta_{t+1} = x_t^T   (Delta_{T+1} = 0).
/// Feasibility of the emitted system (phase-1 LP) is equivalent to the
/// robust constraint holding at x.
inline ConstraintSystem polyhedral_cu_dual_system(const std::vector<Vec>& x,
                                                  const PolyhedralCuProcess& proc,
                                                  double budget) {
    int T = proc.periods, m = proc.dim;
    if (static_cast<int>(x.size()) != T)
        throw DimensionMismatch("polyhedral_cu_dual_system: decision count");
    ConstraintSystem cs;
    std::vector<std::vector<int>> q(T);
    for (int t = 0; t < T; ++t) {
        if (static_cast<int>(x[t].size()) != m)
            throw DimensionMismatch("polyhedral_cu_dual_system: decision dimension");
        for (int r = 0; r < proc.g_mat[t].rows(); ++r)
            q[t].push_back(cs.add_variable(
                "q_" + std::to_string(t + 1) + "_" + (r < 10 ? "0" : "") + std::to_string(r),
                VarSign::nonpos));
    }
    std::vector<std::pair<int, double>> budget_terms;
    for (int t = 0; t < T; ++t)
        for (int r = 0; r < proc.g_mat[t].rows(); ++r)
            budget_terms.emplace_back(q[t][r], proc.g_vec[t][r]);
    cs.add_linear(std::move(budget_terms), RowSense::le, budget);
    for (int t = 0; t < T; ++t)
        for (int j = 0; j < m; ++j) {
            std::vector<std::pair<int, double>> terms;
            for (int r = 0; r < proc.g_mat[t].rows(); ++r) {
                double g = proc.g_mat[t](r, j);
                if (g != 0.0) terms.emplace_back(q[t][r], g);
            }
            if (t + 1 < T)
                for (int r = 0; r < proc.g_mat[t + 1].rows(); ++r) {
                    double dl = proc.delta[t + 1](r, j);
                    if (dl != 0.0) terms.emplace_back(q[t + 1][r], -dl);
                }
            cs.add_linear(std::move(terms), RowSense::eq, x[t][j]);
        }
    return cs;
}

// ---------------------------------------------------------------------------
// Two-period adjustable problems under affine recourse x_2(d_1) = X_2 d_1.
// ---------------------------------------------------------------------------

struct AroPolyhedralInstance {
    Matrix a21;      // second-constraint coefficients of x_1
    Matrix a22;      // second-constraint coefficients of the recourse
    Matrix b2;       // rhs loading of d_2, one row per constraint row
    Matrix g1_mat;   // first-period set
    Vec g1_vec;
    Matrix g2_mat;   // second-period set
    Vec g2_vec;
    Matrix delta1;   // rhs shift of the second-period set by d_1
    Matrix x2_rule;  // affine recourse matrix X_2
    Vec x1;
};

/// Dual system for the adjustable second constraint over connected
/// polyhedra. Per constraint row i, with multipliers p_i <= 0 on the
/// first-period rows and q_i <= 0 on the second-period rows:
///   g_1^T p_i + g_2^T q_i <= (A_21 x_1)_i,
///   G_1^T p_i - Delta_1^T q_i = -(A_22 X_2)_i^T,
///   G_2^T q_i = B_{2,i}.
/// Feasibility of the system matches the bilinear worst case of each row.
inline ConstraintSystem aro_polyhedral_system(const AroPolyhedralInstance& inst) {
    int n2 = inst.b2.rows();
    int md1 = inst.g1_mat.cols();
    int md2 = inst.g2_mat.cols();
    int k1 = inst.g1_mat.rows();
    int k2 = inst.g2_mat.rows();
    if (inst.a21.rows() != n2 || inst.a22.rows() != n2)
        throw DimensionMismatch("aro_polyhedral_system: constraint row counts disagree");
    if (inst.a21.cols() != static_cast<int>(inst.x1.size()))
        throw DimensionMismatch("aro_polyhedral_system: x1 length");
    if (inst.a22.cols() != inst.x2_rule.rows() || inst.x2_rule.cols() != md1)
        throw DimensionMismatch("aro_polyhedral_system: recourse shapes");
    if (inst.b2.cols() != md2)
        throw DimensionMismatch("aro_polyhedral_system: b2 loading shape");
    if (inst.delta1.rows() != k2 || inst.delta1.cols() != md1)
        throw DimensionMismatch("aro_polyhedral_system: delta shape");
    if (static_cast<int>(inst.g1_vec.size()) != k1 ||
        static_cast<int>(inst.g2_vec.size()) != k2)
        throw DimensionMismatch("aro_polyhedral_system: rhs lengths");

    Matrix coupled = matmul(inst.a22, inst.x2_rule);  // n2 x md1
    Vec rhs1 = matvec(inst.a21, inst.x1);
    ConstraintSystem cs;
    for (int i = 0; i < n2; ++i) {
        std::vector<int> p(k1), q(k2);
        for (int r = 0; r < k1; ++r)
            p[r] = cs.add_variable("p_" + std::to_string(i) + "_" + std::to_string(r),
                                   VarSign::nonpos);
        for (int r = 0; r < k2; ++r)
            q[r] = cs.add_variable("q_" + std::to_string(i) + "_" + std::to_string(r),
                                   VarSign::nonpos);
        std::vector<std::pair<int, double>> budget;
        for (int r = 0; r < k1; ++r) budget.emplace_back(p[r], inst.g1_vec[r]);
        for (int r = 0; r < k2; ++r) budget.emplace_back(q[r], inst.g2_vec[r]);
        cs.add_linear(std::move(budget), RowSense::le, rhs1[i]);
        for (int j = 0; j < md1; ++j) {
            std::vector<std::pair<int, double>> terms;
            for (int r = 0; r < k1; ++r)
                if (inst.g1_mat(r, j) != 0.0) terms.emplace_back(p[r], inst.g1_mat(r, j));
            for (int r = 0; r < k2; ++r)
                if (inst.delta1(r, j) != 0.0) terms.emplace_back(q[r], -inst.delta1(r, j));
            cs.add_linear(std::move(terms), RowSense::eq, -coupled(i, j));
        }
        for (int j = 0; j < md2; ++j) {
            std::vector<std::pair<int, double>> terms;
            for (int r = 0; r < k2; ++r)
                if (inst.g2_mat(r, j) != 0.0) terms.emplace_back(q[r], inst.g2_mat(r, j));
            cs.add_linear(std::move(terms), RowSense::eq, inst.b2(i, j));
        }
    }
    return cs;
}

struct AroEllipsoidalInstance {
    Matrix a21;
    Matrix a22;
    Matrix b2;
    Matrix x2_rule;
    Vec x1;
    Vec mu1;
    Matrix l1;
    Matrix l2;
    double r1 = 0.0;
    double r2 = 0.0;
    Matrix a2;  // second-period center recursion
    Matrix f2;
    Vec c2;
};

/// Per-row violation of the adjustable second constraint over
/// center-connected ellipsoids:
///   worst_i - (A_21 x_1)_i   with
///   worst_i = B_{2,i}^T (A_2 mu_1 + F_2 mu_1 + c_2) - (A_22 X_2)_i^T mu_1
///           + r_2 |L_2^T B_{2,i}| + r_1 |L_1^T (F_2^T B_{2,i} - (A_22 X_2)_i)|.
/// Feasible iff every entry is <= 1e-9.
inline Vec aro_ellipsoidal_rows(const AroEllipsoidalInstance& inst) {
    int n2 = inst.b2.rows();
    int m = static_cast<int>(inst.mu1.size());
    if (inst.a21.rows() != n2 || inst.a22.rows() != n2)
        throw DimensionMismatch("aro_ellipsoidal_rows: constraint row counts disagree");
    if (inst.a21.cols() != static_cast<int>(inst.x1.size()))
        throw DimensionMismatch("aro_ellipsoidal_rows: x1 length");
    if (inst.a22.cols() != inst.x2_rule.rows() || inst.x2_rule.cols() != m)
        throw DimensionMismatch("aro_ellipsoidal_rows: recourse shapes");
    if (inst.b2.cols() != m || inst.l1.rows() != m || inst.l2.rows() != m ||
        inst.a2.rows() != m || inst.f2.rows() != m || static_cast<int>(inst.c2.size()) != m)
        throw DimensionMismatch("aro_ellipsoidal_rows: period-two shapes");

    Matrix coupled = matmul(inst.a22, inst.x2_rule);  // n2 x m
    Vec center2 = matvec(inst.a2, inst.mu1);
    axpy(1.0, matvec(inst.f2, inst.mu1), center2);
    axpy(1.0, inst.c2, center2);
    Vec lhs = matvec(inst.a21, inst.x1);

    Vec out(n2, 0.0);
    for (int i = 0; i < n2; ++i) {
        Vec bi = inst.b2.row(i);
        Vec mi = coupled.row(i);
        double worst = dot(bi, center2) - dot(mi, inst.mu1);
        worst += inst.r2 * two_norm(matvec_t(inst.l2, bi));
        Vec dir = matvec_t(inst.f2, bi) - mi;
        worst += inst.r1 * two_norm(matvec_t(inst.l1, dir));
        out[i] = worst - lhs[i];
    }
    return out;
}

}  // namespace curo
