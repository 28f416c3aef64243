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
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "curo/cu_sets.hpp"
#include "curo/errors.hpp"
#include "curo/lp.hpp"
#include "curo/matrix.hpp"

// Distributionally robust machinery over finite supports: single-stage
// moment problems as LPs with eigenvector cuts for the covariance cap, the
// nested multi-stage evaluation, and the two dual reformulations (one with
// multiplier copies per previous-period realization, one with constant
// multipliers — the conservative variant).

namespace curo {

enum class Direction { sup, inf };

struct DiscreteDistribution {
    std::vector<int> support_index;
    Vec mass;

    void validate() const {
        double total = 0.0;
        for (double m : mass) {
            if (m < -1e-12) throw BadInput("distribution: negative mass");
            total += m;
        }
        if (std::abs(total - 1.0) > 1e-9) throw BadInput("distribution: masses must sum to 1");
    }
};

/// One period's moment set, conditioned: support points, realized mean box
/// center, elementwise slack, second-moment anchor and cap.
struct StageMomentSet {
    std::vector<Vec> support;
    Vec mean_center;
    Vec delta;
    Vec anchor;
    Matrix sigma_cap;

    int dim() const { return static_cast<int>(mean_center.size()); }
};

struct MomentDuals {
    double p = 0.0;
    Vec q_upper;
    Vec q_lower;
    Matrix r;
};

struct MomentLpResult {
    double value = 0.0;
    DiscreteDistribution distribution;
    MomentDuals duals;  // populated for Direction::sup
    int cuts = 0;
};

/// Optimal E[f] over all distributions on the support whose mean lies in
/// the +-delta box around the center and whose second moment about the
/// anchor is capped. The cap is enforced by direction cuts
/// v^T M(p) v <= v^T cap v generated from violated eigenvectors. For the
/// sup direction the returned multipliers (p, q_upper, q_lower, R) certify
///   p + (q_upper - q_lower - 2 R anchor)^T d + d^T R d >= f(d)
/// on every support point, with R = sum of cut outer products (PSD), and
/// their objective matches the primal value up to LP tolerances.
/// Mass LP over the support with the normalization and mean-box rows; the
/// covariance cap is enforced separately by cuts.
inline LpProblem moment_base_lp(const Vec& cost, const StageMomentSet& set, Direction dir) {
    int n = static_cast<int>(set.support.size());
    int m = set.dim();
    if (static_cast<int>(cost.size()) != n)
        throw DimensionMismatch("moment lp: cost per support point");
    for (const Vec& pt : set.support)
        if (static_cast<int>(pt.size()) != m)
            throw DimensionMismatch("moment lp: support point dimension");
    LpProblem lp;
    lp.sense = dir == Direction::sup ? LpSense::maximize : LpSense::minimize;
    for (int i = 0; i < n; ++i) lp.add_var(cost[i], 0.0, kInf);
    lp.add_row(Vec(n, 1.0), RowSense::eq, 1.0);
    for (int j = 0; j < m; ++j) {
        Vec coords(n);
        for (int i = 0; i < n; ++i) coords[i] = set.support[i][j];
        lp.add_row(coords, RowSense::le, set.mean_center[j] + set.delta[j]);
        lp.add_row(coords, RowSense::ge, set.mean_center[j] - set.delta[j]);
    }
    return lp;
}

inline MomentLpResult moment_sup_lp(const Vec& cost, const StageMomentSet& set, Direction dir) {
    int n = static_cast<int>(set.support.size());
    int m = set.dim();
    LpProblem lp = moment_base_lp(cost, set, dir);
    const int fixed_rows = 1 + 2 * m;

    std::vector<Vec> cut_dirs;
    Vec cut_scales;
    MomentLpResult out;
    LpSolution sol;
    for (int round = 0;; ++round) {
        if (round > 200)
            throw CutLimitExceeded("moment_sup_lp: covariance cut loop did not close");
        sol = solve_lp(lp);
        if (sol.status == LpStatus::infeasible)
            throw InfeasibleMomentSet("moment_sup_lp: no distribution meets the moment bounds");
        if (sol.status == LpStatus::unbounded)
            throw NumericalFailure("moment_sup_lp: unbounded mass problem");

        Matrix second(m, m);
        for (int i = 0; i < n; ++i) {
            double w = sol.primal[i];
            if (w <= 0.0) continue;
            Vec dev = set.support[i] - set.anchor;
            second = second + outer(dev, w);
        }
        Matrix gap = set.sigma_cap;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) gap(i, j) -= second(i, j);
        EigenPair ep = min_eigenvalue(gap);
        if (ep.value >= -1e-7) break;
        bool dup = false;
        for (const Vec& w : cut_dirs)
            if (std::abs(dot(w, ep.vector)) > 1.0 - 1e-6) {
                dup = true;
                break;
            }
        if (dup) break;  // residual violation is tolerance noise
        cut_dirs.push_back(ep.vector);
        Vec row(n);
        double row_scale = 0.0;
        for (int i = 0; i < n; ++i) {
            double proj = dot(ep.vector, set.support[i] - set.anchor);
            row[i] = proj * proj;
            row_scale = std::max(row_scale, row[i]);
        }
        double rhs = dot(ep.vector, matvec(set.sigma_cap, ep.vector));
        // Normalize so near-parallel cuts cannot degrade the basis; the
        // dual mapping divides by the same scale.
        if (row_scale <= 0.0) row_scale = 1.0;
        for (double& v : row) v /= row_scale;
        lp.add_row(row, RowSense::le, rhs / row_scale);
        cut_scales.push_back(row_scale);
        ++out.cuts;
    }

    out.value = sol.objective;
    out.distribution.mass = sol.primal;
    out.distribution.support_index.resize(n);
    for (int i = 0; i < n; ++i) out.distribution.support_index[i] = i;

    if (dir == Direction::sup) {
        // Map LP row duals onto the moment-dual variables. For a maximize
        // problem <= rows carry duals >= 0 and >= rows duals <= 0.
        out.duals.q_upper.assign(m, 0.0);
        out.duals.q_lower.assign(m, 0.0);
        for (int j = 0; j < m; ++j) {
            out.duals.q_upper[j] = std::max(0.0, sol.row_dual[1 + 2 * j]);
            out.duals.q_lower[j] = std::max(0.0, -sol.row_dual[2 + 2 * j]);
        }
        out.duals.r = Matrix(m, m);
        for (size_t k = 0; k < cut_dirs.size(); ++k) {
            double s = std::max(0.0, sol.row_dual[fixed_rows + static_cast<int>(k)]);
            if (s != 0.0) out.duals.r = out.duals.r + outer(cut_dirs[k], s / cut_scales[k]);
        }
        out.duals.p = sol.row_dual[0] + dot(set.anchor, matvec(out.duals.r, set.anchor));
    }
    return out;
}

/// Stage cost evaluated at a support point, with the decision already bound.
using StageCost = std::function<double(const Vec&)>;

namespace drodetail {

inline StageMomentSet stage_set(const MomentAmbiguityProcess& proc, int t, const Vec& d_prev) {
    StageMomentSet s;
    s.support = proc.support[t - 1];
    s.mean_center = proc.mean_center(t, d_prev);
    s.delta = proc.delta[t - 1];
    s.anchor = proc.anchor[t - 1];
    s.sigma_cap = proc.sigma_cap[t - 1];
    return s;
}

}  // namespace drodetail

/// Raises InfeasibleMomentSet unless every stage moment problem is solvable
/// for every conditioning point. Run at construction boundaries.
inline void check_moment_feasibility(const MomentAmbiguityProcess& proc) {
    proc.validate();
    for (int t = 1; t <= proc.periods; ++t) {
        int n = static_cast<int>(proc.support[t - 1].size());
        Vec zero(n, 0.0);
        if (t == 1) {
            moment_sup_lp(zero, drodetail::stage_set(proc, 1, {}), Direction::sup);
            continue;
        }
        for (const Vec& prev : proc.support[t - 2])
            try {
                moment_sup_lp(zero, drodetail::stage_set(proc, t, prev), Direction::sup);
            } catch (const InfeasibleMomentSet&) {
                throw InfeasibleMomentSet("moment process: period " + std::to_string(t) +
                                          " set is empty for some previous realization");
            }
    }
}

struct NestedDroResult {
    double value = 0.0;
    /// conditionals[t-1][c] = optimal conditional distribution of period t
    /// given the c-th support point of period t-1 (a single entry for t=1).
    std::vector<std::vector<DiscreteDistribution>> conditionals;
};

/// Backward evaluation of the nested worst-case expectation
///   opt_{P_1} E[ h_1 + opt_{P_2|1} E[ h_2 + ... ] ]
/// over the connected moment sets; `dir` selects sup or inf at every stage.
/// One stage LP is solved per (period, conditioning point).
inline NestedDroResult nested_dro_value(const MomentAmbiguityProcess& proc,
                                        const std::vector<StageCost>& costs, Direction dir) {
    proc.validate();
    int T = proc.periods;
    if (static_cast<int>(costs.size()) != T)
        throw DimensionMismatch("nested_dro_value: one stage cost per period");

    NestedDroResult out;
    out.conditionals.assign(T, {});
    Vec continuation(proc.support[T - 1].size(), 0.0);
    for (int t = T; t >= 1; --t) {
        const auto& pts = proc.support[t - 1];
        Vec stage_cost(pts.size());
        for (size_t i = 0; i < pts.size(); ++i)
            stage_cost[i] = costs[t - 1](pts[i]) + continuation[i];
        if (t == 1) {
            auto res = moment_sup_lp(stage_cost, drodetail::stage_set(proc, 1, {}), dir);
            out.conditionals[0].push_back(std::move(res.distribution));
            out.value = res.value;
            return out;
        }
        const auto& prev_pts = proc.support[t - 2];
        Vec vals(prev_pts.size(), 0.0);
        out.conditionals[t - 1].resize(prev_pts.size());
        for (size_t c = 0; c < prev_pts.size(); ++c) {
            auto res = moment_sup_lp(stage_cost, drodetail::stage_set(proc, t, prev_pts[c]), dir);
            vals[c] = res.value;
            out.conditionals[t - 1][c] = std::move(res.distribution);
        }
        continuation = std::move(vals);
    }
    return out;  // unreachable
}

/// Expectation of the summed stage costs under the joint distribution
/// composed from the stagewise conditionals, evaluated by flat enumeration
/// of support tuples. Agrees with the nested value for finite supports.
inline double composed_expectation(const MomentAmbiguityProcess& proc,
                                   const std::vector<StageCost>& costs,
                                   const NestedDroResult& nested) {
    double total = 0.0;
    std::function<void(int, int, double, double)> walk = [&](int t, int prev_idx, double mass,
                                                             double acc) {
        if (t > proc.periods) {
            total += mass * acc;
            return;
        }
        const DiscreteDistribution& dist =
            t == 1 ? nested.conditionals[0][0] : nested.conditionals[t - 1][prev_idx];
        for (size_t i = 0; i < proc.support[t - 1].size(); ++i) {
            double w = dist.mass[i];
            if (w <= 0.0) continue;
            walk(t + 1, static_cast<int>(i), mass * w,
                 acc + costs[t - 1](proc.support[t - 1][i]));
        }
    };
    walk(1, -1, 1.0, 0.0);
    return total;
}

namespace drodetail {

struct StageVars {
    int p = -1;
    std::vector<int> qu, ql;
    std::vector<int> r;  // upper triangle, row-major
};

inline int tri_col(const StageVars& v, int dim, int i, int j) {
    if (i > j) std::swap(i, j);
    return v.r[static_cast<size_t>(i) * dim - i * (i + 1) / 2 + j];
}

inline StageVars add_stage_vars(LpProblem& lp, std::vector<PsdBlock>& blocks, int dim) {
    StageVars v;
    v.p = lp.add_var(0.0, -kInf, kInf);
    for (int j = 0; j < dim; ++j) v.qu.push_back(lp.add_var(0.0, 0.0, kInf));
    for (int j = 0; j < dim; ++j) v.ql.push_back(lp.add_var(0.0, 0.0, kInf));
    for (int i = 0; i < dim * (dim + 1) / 2; ++i) v.r.push_back(lp.add_var(0.0, -kInf, kInf));
    blocks.push_back(PsdBlock{dim, v.r});
    return v;
}

/// Frobenius weights of R against a symmetric matrix, on triangle columns.
inline void add_frob_terms(std::vector<std::pair<int, double>>& terms, const StageVars& v,
                           int dim, const Matrix& m, double scale) {
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
            double w = i == j ? m(i, i) : m(i, j) + m(j, i);
            if (w != 0.0) terms.emplace_back(tri_col(v, dim, i, j), scale * w);
        }
}

/// Terms of (qu - ql - 2 R anchor)^T xi + xi^T R xi on the stage variables.
inline void add_quadratic_terms(std::vector<std::pair<int, double>>& terms, const StageVars& v,
                                int dim, const Vec& anchor, const Vec& xi, double scale) {
    for (int j = 0; j < dim; ++j) {
        terms.emplace_back(v.qu[j], scale * xi[j]);
        terms.emplace_back(v.ql[j], -scale * xi[j]);
    }
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
            double quad = i == j ? xi[i] * xi[j] : 2.0 * xi[i] * xi[j];
            double cross = i == j ? anchor[i] * xi[i] : anchor[i] * xi[j] + anchor[j] * xi[i];
            double w = quad - 2.0 * cross;
            if (w != 0.0) terms.emplace_back(tri_col(v, dim, i, j), scale * w);
        }
}

inline Matrix anchored_cap(const MomentAmbiguityProcess& proc, int t) {
    Matrix m = proc.sigma_cap[t - 1];
    Vec a = proc.anchor[t - 1];
    for (int i = 0; i < proc.dim; ++i)
        for (int j = 0; j < proc.dim; ++j) m(i, j) -= a[i] * a[j];
    return m;
}

struct DualAssembly {
    double value = 0.0;
    int cuts = 0;
};

/// Shared assembly of the multi-stage dual minimization. `per_realization`
/// selects whether stage multipliers are replicated per previous-period
/// support point (the exact reformulation) or shared (the conservative one).
inline DualAssembly solve_stage_dual(const MomentAmbiguityProcess& proc,
                                     const std::vector<StageCost>& costs, bool per_realization) {
    proc.validate();
    int T = proc.periods, m = proc.dim;
    if (static_cast<int>(costs.size()) != T)
        throw DimensionMismatch("stage dual: one stage cost per period");

    LpProblem lp;
    lp.sense = LpSense::minimize;
    std::vector<PsdBlock> blocks;
    // vars[t-1]: one entry for stage 1; per previous-period point otherwise.
    std::vector<std::vector<StageVars>> vars(T);
    for (int t = 1; t <= T; ++t) {
        size_t copies = (t == 1 || !per_realization) ? 1 : proc.support[t - 2].size();
        for (size_t c = 0; c < copies; ++c) vars[t - 1].push_back(add_stage_vars(lp, blocks, m));
    }

    const StageVars& first = vars[0][0];
    lp.objective[first.p] = 1.0;
    for (int j = 0; j < m; ++j) {
        lp.objective[first.qu[j]] = proc.mu1[j] + proc.delta[0][j];
        lp.objective[first.ql[j]] = -(proc.mu1[j] - proc.delta[0][j]);
    }
    {
        Matrix m1 = anchored_cap(proc, 1);
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                double w = i == j ? m1(i, i) : m1(i, j) + m1(j, i);
                lp.objective[tri_col(first, m, i, j)] += w;
            }
    }

    auto stage_copy = [&](int t, size_t cond) -> const StageVars& {
        if (t == 1 || !per_realization) return vars[t - 1][0];
        return vars[t - 1][cond];
    };

    for (int t = 1; t <= T; ++t) {
        size_t cond_count =
            (t == 1 || !per_realization) ? 1 : proc.support[t - 2].size();
        const auto& pts = proc.support[t - 1];
        for (size_t c = 0; c < cond_count; ++c) {
            const StageVars& cur = stage_copy(t, c);
            for (size_t i = 0; i < pts.size(); ++i) {
                const Vec& xi = pts[i];
                std::vector<std::pair<int, double>> terms;
                terms.emplace_back(cur.p, 1.0);
                add_quadratic_terms(terms, cur, m, proc.anchor[t - 1], xi, 1.0);
                if (t < T) {
                    // Subtract the next stage's certified bound, whose copy
                    // is the one conditioned on this realization xi.
                    const StageVars& nxt =
                        per_realization ? vars[t][i] : vars[t][0];
                    terms.emplace_back(nxt.p, -1.0);
                    Vec a_xi = matvec(proc.mean_a[t - 1], xi);
                    for (int j = 0; j < m; ++j) {
                        double upper = proc.mean_b[t - 1][j] + proc.delta[t][j] + a_xi[j];
                        double lower = proc.mean_b[t - 1][j] - proc.delta[t][j] + a_xi[j];
                        terms.emplace_back(nxt.qu[j], -upper);
                        terms.emplace_back(nxt.ql[j], lower);
                    }
                    add_frob_terms(terms, nxt, m, anchored_cap(proc, t + 1), -1.0);
                }
                lp.add_terms(terms, RowSense::ge, costs[t - 1](xi));
            }
        }
    }

    auto res = solve_with_psd_cuts(std::move(lp), blocks);
    if (res.solution.status == LpStatus::infeasible)
        throw LpInfeasible("stage dual: system infeasible (modeling error)");
    if (res.solution.status == LpStatus::unbounded)
        throw LpUnbounded("stage dual: unbounded below (primal sets empty)");
    return {res.solution.objective, res.cuts_added};
}

}  // namespace drodetail

/// Least certified upper bound on the nested sup with one multiplier copy
/// per previous-period realization. For finite supports this matches the
/// nested value up to stagewise LP duality gaps.
inline double exact_dual_value(const MomentAmbiguityProcess& proc,
                               const std::vector<StageCost>& costs) {
    return drodetail::solve_stage_dual(proc, costs, true).value;
}

/// Same bound with a single multiplier set per stage; feasible multipliers
/// form a subset of the per-realization ones, so the value can only grow.
inline double conservative_dual_value(const MomentAmbiguityProcess& proc,
                                      const std::vector<StageCost>& costs) {
    return drodetail::solve_stage_dual(proc, costs, false).value;
}

struct DroReport {
    double primal = 0.0;
    double exact_dual = 0.0;
    double conservative_dual = 0.0;
    double composed_joint = 0.0;
    int exact_cuts = 0;
    int conservative_cuts = 0;
};

/// All three evaluations of one instance side by side, with the cut counts
/// of the dual assemblies.
inline DroReport dro_report(const MomentAmbiguityProcess& proc,
                            const std::vector<StageCost>& costs) {
    DroReport rep;
    auto nested = nested_dro_value(proc, costs, Direction::sup);
    rep.primal = nested.value;
    rep.composed_joint = composed_expectation(proc, costs, nested);
    auto exact = drodetail::solve_stage_dual(proc, costs, true);
    rep.exact_dual = exact.value;
    rep.exact_cuts = exact.cuts;
    auto conservative = drodetail::solve_stage_dual(proc, costs, false);
    rep.conservative_dual = conservative.value;
    rep.conservative_cuts = conservative.cuts;
    return rep;
}

}  // namespace curo
