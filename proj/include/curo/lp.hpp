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
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "curo/errors.hpp"
#include "curo/matrix.hpp"

// Self-contained dense linear programming: a two-phase tableau simplex with
// Dantzig pricing, Bland's rule as an anti-cycling fallback, primal/dual
// certificates, and an eigenvector cutting loop that enforces positive
// semidefiniteness of small symmetric matrix variables through linear cuts.
//
// Dual sign convention, for the problem as given (not an internal form):
//   minimize:  >= rows have dual >= 0, <= rows dual <= 0, == rows free;
//   maximize:  the signs flip.
// In both senses  c - A^T y  are the reduced costs and
//   b^T y + sum_j rc_j * (bound active at x_j)
// matches the primal objective up to the stated tolerances.

namespace curo {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class LpSense { minimize, maximize };
enum class RowSense { le, eq, ge };
enum class LpStatus { optimal, infeasible, unbounded };

struct LpProblem {
    LpSense sense = LpSense::minimize;
    Vec objective;
    std::vector<Vec> row_coeffs;
    std::vector<RowSense> row_rel;
    Vec row_rhs;
    Vec lower;
    Vec upper;

    int num_vars() const { return static_cast<int>(objective.size()); }
    int num_rows() const { return static_cast<int>(row_rhs.size()); }

    int add_var(double obj = 0.0, double lb = 0.0, double ub = kInf) {
        objective.push_back(obj);
        lower.push_back(lb);
        upper.push_back(ub);
        for (auto& r : row_coeffs) r.push_back(0.0);
        return num_vars() - 1;
    }

    void add_row(Vec coeffs, RowSense rel, double rhs) {
        if (static_cast<int>(coeffs.size()) != num_vars())
            throw DimensionMismatch("add_row: coefficient count != variable count");
        row_coeffs.push_back(std::move(coeffs));
        row_rel.push_back(rel);
        row_rhs.push_back(rhs);
    }

    /// Sparse convenience: unspecified coefficients are zero.
    void add_terms(const std::vector<std::pair<int, double>>& terms, RowSense rel, double rhs) {
        Vec coeffs(num_vars(), 0.0);
        for (auto& [j, v] : terms) coeffs[j] += v;
        add_row(std::move(coeffs), rel, rhs);
    }
};

struct LpSolution {
    LpStatus status = LpStatus::optimal;
    double objective = 0.0;
    double dual_objective = 0.0;
    Vec primal;
    Vec row_dual;
    Vec reduced_cost;
    /// infeasible: Farkas multipliers per row (see row_dual signs);
    /// unbounded: improving ray in the original variable space.
    Vec certificate;
    /// infeasible only: Farkas multipliers attached to upper-bound rows.
    Vec certificate_ub;
    int iterations = 0;
};

namespace lpdetail {

constexpr double kPivTol = 1e-9;
constexpr double kPivFloor = 1e-11;

class Simplex {
public:
    explicit Simplex(const LpProblem& p) : orig_(p) { standardize(); }

    LpSolution solve() {
        build_tableau();
        LpSolution out;

        // Phase 1: minimize the artificial total.
        Vec cost1(ncols_, 0.0);
        for (int a = art0_; a < ncols_; ++a) cost1[a] = 1.0;
        LpStatus s1 = iterate(cost1, /*phase1=*/true);
        if (s1 == LpStatus::unbounded)
            throw NumericalFailure("simplex: phase 1 reported unbounded");
        double infeas = current_objective(cost1);
        double feas_tol = 1e-7 * (1.0 + rhs_scale_);
        if (infeas > feas_tol) {
            out.status = LpStatus::infeasible;
            extract_farkas(cost1, out);
            out.iterations = iterations_;
            return out;
        }
        drive_out_artificials();
        for (int a = art0_; a < ncols_; ++a) banned_[a] = true;

        // Phase 2: the real objective.
        LpStatus s2 = iterate(zcost_, /*phase1=*/false);
        out.iterations = iterations_;
        if (s2 == LpStatus::unbounded) {
            out.status = LpStatus::unbounded;
            extract_point(out);
            extract_ray(out);
            return out;
        }
        out.status = LpStatus::optimal;
        extract_point(out);
        extract_duals(out);
        return out;
    }

private:
    // --- standardized form: minimize zcost.z  s.t.  Z z = zrhs, z >= 0 ---
    const LpProblem& orig_;
    struct VarMap {
        int kind;    // 0: x = off + z;  1: x = off - z;  2: x = z - z'
        int z;       // first z column
        double off;  // bound offset
    };
    std::vector<VarMap> vmap_;
    int nz_ = 0;
    std::vector<Vec> zrows_;
    std::vector<RowSense> zrel_;
    Vec zrhs_;
    std::vector<int> zrow_src_;  // original row index, or -1-j for x_j's upper-bound row
    Vec zcost_;
    double obj_const_ = 0.0;
    double obj_sign_ = 1.0;  // -1 when the original sense is maximize
    double rhs_scale_ = 0.0;

    // --- tableau (flat, row-major, stride ncols_+1, last entry = rhs) ---
    int m_ = 0, ncols_ = 0, slack0_ = 0, art0_ = 0, stride_ = 0;
    Vec tab_;
    Vec row_flip_;
    std::vector<int> basis_;
    std::vector<int> unit_col_;  // column holding e_i initially, for dual reads
    std::vector<bool> banned_;
    int iterations_ = 0;

    double* row(int i) { return tab_.data() + static_cast<size_t>(i) * stride_; }
    const double* row(int i) const { return tab_.data() + static_cast<size_t>(i) * stride_; }

    void standardize() {
        int n = orig_.num_vars();
        if (n > 2000 || orig_.num_rows() > 2000)
            throw BadInput("solve_lp: more than 2000 rows or columns");
        vmap_.resize(n);
        zcost_.clear();
        obj_sign_ = orig_.sense == LpSense::maximize ? -1.0 : 1.0;
        std::vector<std::pair<int, double>> ub_rows;  // (var, ub - lb) rows to append
        for (int j = 0; j < n; ++j) {
            double lb = orig_.lower[j], ub = orig_.upper[j];
            double cj = obj_sign_ * orig_.objective[j];
            if (!std::isfinite(orig_.objective[j]))
                throw BadInput("solve_lp: non-finite objective coefficient");
            if (lb > ub) throw BadInput("solve_lp: empty bound interval");
            if (std::isfinite(lb)) {
                vmap_[j] = {0, nz_++, lb};
                zcost_.push_back(cj);
                obj_const_ += cj * lb;
                if (std::isfinite(ub)) ub_rows.emplace_back(j, ub - lb);
            } else if (std::isfinite(ub)) {
                vmap_[j] = {1, nz_++, ub};
                zcost_.push_back(-cj);
                obj_const_ += cj * ub;
            } else {
                vmap_[j] = {2, nz_, 0.0};
                nz_ += 2;
                zcost_.push_back(cj);
                zcost_.push_back(-cj);
            }
        }
        auto to_z = [&](const Vec& coeffs, double rhs) {
            Vec zr(nz_, 0.0);
            double r = rhs;
            for (int j = 0; j < n; ++j) {
                double a = coeffs[j];
                if (a == 0.0) continue;
                if (!std::isfinite(a)) throw BadInput("solve_lp: non-finite row coefficient");
                const VarMap& vm = vmap_[j];
                if (vm.kind == 0) {
                    zr[vm.z] += a;
                    r -= a * vm.off;
                } else if (vm.kind == 1) {
                    zr[vm.z] -= a;
                    r -= a * vm.off;
                } else {
                    zr[vm.z] += a;
                    zr[vm.z + 1] -= a;
                }
            }
            return std::make_pair(zr, r);
        };
        for (int i = 0; i < orig_.num_rows(); ++i) {
            auto [zr, r] = to_z(orig_.row_coeffs[i], orig_.row_rhs[i]);
            zrows_.push_back(std::move(zr));
            zrel_.push_back(orig_.row_rel[i]);
            zrhs_.push_back(r);
            zrow_src_.push_back(i);
        }
        for (auto& [j, width] : ub_rows) {
            Vec zr(nz_, 0.0);
            zr[vmap_[j].z] = 1.0;
            zrows_.push_back(std::move(zr));
            zrel_.push_back(RowSense::le);
            zrhs_.push_back(width);
            zrow_src_.push_back(-1 - j);
        }
        for (double r : zrhs_) rhs_scale_ = std::max(rhs_scale_, std::abs(r));
    }

    /// Rows whose flipped slack enters with +1 start with the slack basic;
    /// only equality rows and negative-slack rows get artificial columns.
    void build_tableau() {
        m_ = static_cast<int>(zrows_.size());
        int nslack = 0, nart = 0;
        std::vector<double> slack_sign(m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            double flip = zrhs_[i] < 0.0 ? -1.0 : 1.0;
            row_flip_.push_back(flip);
            if (zrel_[i] != RowSense::eq) {
                ++nslack;
                slack_sign[i] = flip * (zrel_[i] == RowSense::le ? 1.0 : -1.0);
            }
            if (slack_sign[i] <= 0.0) ++nart;
        }
        slack0_ = nz_;
        art0_ = nz_ + nslack;
        ncols_ = art0_ + nart;
        stride_ = ncols_ + 1;
        tab_.assign(static_cast<size_t>(m_) * stride_, 0.0);
        basis_.assign(m_, 0);
        unit_col_.assign(m_, 0);
        banned_.assign(ncols_, false);
        zcost_.resize(ncols_, 0.0);

        int s = slack0_, a = art0_;
        for (int i = 0; i < m_; ++i) {
            double flip = row_flip_[i];
            double* r = row(i);
            for (int j = 0; j < nz_; ++j) r[j] = flip * zrows_[i][j];
            r[ncols_] = flip * zrhs_[i];
            if (zrel_[i] != RowSense::eq) r[s++] = slack_sign[i];
            if (slack_sign[i] > 0.0) {
                basis_[i] = s - 1;
                unit_col_[i] = s - 1;
            } else {
                r[a] = 1.0;
                basis_[i] = a;
                unit_col_[i] = a;
                ++a;
            }
        }
    }

    double current_objective(const Vec& cost) const {
        double o = 0.0;
        for (int i = 0; i < m_; ++i) o += cost[basis_[i]] * row(i)[ncols_];
        return o;
    }

    Vec reduced_costs(const Vec& cost) const {
        Vec rc = cost;
        for (int i = 0; i < m_; ++i) {
            double cb = cost[basis_[i]];
            if (cb == 0.0) continue;
            const double* r = row(i);
            for (int j = 0; j < ncols_; ++j) rc[j] -= cb * r[j];
        }
        return rc;
    }

    void pivot(int prow, int pcol, Vec& rc) {
        double* pr = row(prow);
        double pv = pr[pcol];
        for (int j = 0; j <= ncols_; ++j) pr[j] /= pv;
        pr[pcol] = 1.0;
        for (int i = 0; i < m_; ++i) {
            if (i == prow) continue;
            double* ri = row(i);
            double f = ri[pcol];
            if (f == 0.0) continue;
            for (int j = 0; j <= ncols_; ++j) ri[j] -= f * pr[j];
            ri[pcol] = 0.0;
        }
        double f = rc[pcol];
        if (f != 0.0) {
            for (int j = 0; j < ncols_; ++j) rc[j] -= f * pr[j];
            rc[pcol] = 0.0;
        }
        basis_[prow] = pcol;
    }

    /// Runs the simplex loop for one phase. Dantzig pricing until the
    /// objective stalls for 3(rows+cols) iterations, then Bland's rule.
    /// Reduced costs are refreshed from scratch periodically and whenever a
    /// pivot search comes up empty, so incremental drift cannot fabricate an
    /// entering column.
    LpStatus iterate(const Vec& cost, bool phase1) {
        Vec rc = reduced_costs(cost);
        double opt_tol = kPivTol;
        for (double c : cost) opt_tol = std::max(opt_tol, kPivTol * std::abs(c));
        bool bland = false;
        int stall = 0;
        const int stall_limit = 3 * (m_ + ncols_);
        double last_obj = current_objective(cost);
        const long iter_cap = 2000L * (m_ + ncols_) + 10000L;
        int since_refresh = 0;

        for (long it = 0;; ++it) {
            if (it > iter_cap) throw NumericalFailure("simplex: iteration cap exceeded");
            if (++since_refresh > 100) {
                rc = reduced_costs(cost);
                since_refresh = 0;
            }
            int enter = -1;
            if (!bland) {
                double best = -opt_tol;
                for (int j = 0; j < ncols_; ++j)
                    if (!banned_[j] && rc[j] < best) {
                        best = rc[j];
                        enter = j;
                    }
            } else {
                for (int j = 0; j < ncols_; ++j)
                    if (!banned_[j] && rc[j] < -opt_tol) {
                        enter = j;
                        break;
                    }
            }
            if (enter < 0) return LpStatus::optimal;

            int leave = -1;
            double best_ratio = 0.0, best_piv = 0.0;
            for (int i = 0; i < m_; ++i) {
                double a = row(i)[enter];
                if (a <= kPivFloor) continue;
                double ratio = row(i)[ncols_] / a;
                bool better = false;
                if (leave < 0) {
                    better = true;
                } else {
                    double eps = 1e-12 * (1.0 + std::abs(best_ratio));
                    if (ratio < best_ratio - eps) {
                        better = true;
                    } else if (ratio <= best_ratio + eps) {
                        // Tie: Bland's rule needs the smallest basis index
                        // for guaranteed termination; otherwise prefer the
                        // stabler (larger) pivot.
                        if (bland)
                            better = basis_[i] < basis_[leave];
                        else if (a > best_piv + 1e-15)
                            better = true;
                        else if (std::abs(a - best_piv) <= 1e-15)
                            better = basis_[i] < basis_[leave];
                    }
                }
                if (better) {
                    leave = i;
                    best_ratio = ratio;
                    best_piv = a;
                }
            }
            if (leave < 0) {
                // Confirm against freshly computed reduced costs before
                // concluding anything from an all-nonpositive column.
                Vec fresh = reduced_costs(cost);
                if (fresh[enter] >= -opt_tol) {
                    rc = std::move(fresh);
                    since_refresh = 0;
                    continue;
                }
                if (phase1)
                    throw NumericalFailure("simplex: no admissible pivot in phase 1");
                return unbounded_from(enter);
            }
            if (best_piv < kPivTol && best_piv < kPivFloor)
                throw NumericalFailure("simplex: pivot below tolerance with no alternative");
            int leaving_col = basis_[leave];
            pivot(leave, enter, rc);
            if (phase1 && leaving_col >= art0_) banned_[leaving_col] = true;
            ++iterations_;

            double obj = current_objective(cost);
            if (obj < last_obj - 1e-12 * (1.0 + std::abs(last_obj))) {
                stall = 0;
                last_obj = obj;
            } else if (++stall > stall_limit) {
                bland = true;
            }
        }
    }

    int pending_unbounded_col_ = -1;
    LpStatus unbounded_from(int col) {
        pending_unbounded_col_ = col;
        return LpStatus::unbounded;
    }

    void drive_out_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < art0_) continue;
            int piv = -1;
            for (int j = 0; j < art0_; ++j)
                if (!banned_[j] && std::abs(row(i)[j]) > kPivTol) {
                    piv = j;
                    break;
                }
            if (piv < 0) continue;  // dependent row, artificial stays basic at zero
            Vec dummy(ncols_, 0.0);
            pivot(i, piv, dummy);
        }
    }

    Vec z_values() const {
        Vec z(ncols_, 0.0);
        for (int i = 0; i < m_; ++i) z[basis_[i]] = row(i)[ncols_];
        return z;
    }

    Vec x_from_z(const Vec& z) const {
        int n = orig_.num_vars();
        Vec x(n, 0.0);
        for (int j = 0; j < n; ++j) {
            const VarMap& vm = vmap_[j];
            if (vm.kind == 0)
                x[j] = vm.off + z[vm.z];
            else if (vm.kind == 1)
                x[j] = vm.off - z[vm.z];
            else
                x[j] = z[vm.z] - z[vm.z + 1];
        }
        return x;
    }

    void extract_point(LpSolution& out) const {
        out.primal = x_from_z(z_values());
        double obj = 0.0;
        for (int j = 0; j < orig_.num_vars(); ++j) obj += orig_.objective[j] * out.primal[j];
        out.objective = obj;
    }

    /// y = c_B B^{-1}; the initial unit column of each row holds B^{-1} e_i.
    Vec tableau_duals(const Vec& cost) const {
        Vec y(m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            double s = 0.0;
            for (int k = 0; k < m_; ++k) s += cost[basis_[k]] * row(k)[unit_col_[i]];
            y[i] = s;
        }
        return y;
    }

    void extract_duals(LpSolution& out) const {
        Vec yz = tableau_duals(zcost_);
        int n = orig_.num_vars();
        out.row_dual.assign(orig_.num_rows(), 0.0);
        for (int i = 0; i < m_; ++i) {
            int src = zrow_src_[i];
            if (src >= 0) out.row_dual[src] = obj_sign_ * row_flip_[i] * yz[i];
        }
        out.reduced_cost.assign(n, 0.0);
        for (int j = 0; j < n; ++j) {
            double r = orig_.objective[j];
            for (int i = 0; i < orig_.num_rows(); ++i) {
                double a = orig_.row_coeffs[i][j];
                if (a != 0.0) r -= a * out.row_dual[i];
            }
            out.reduced_cost[j] = r;
        }
        double dobj = 0.0;
        for (int i = 0; i < orig_.num_rows(); ++i) dobj += out.row_dual[i] * orig_.row_rhs[i];
        double rc_tol = 1e-7 * (1.0 + std::abs(out.objective));
        for (int j = 0; j < n; ++j) {
            double r = out.reduced_cost[j];
            if (std::abs(r) <= rc_tol) continue;
            bool wants_lower = orig_.sense == LpSense::minimize ? r > 0.0 : r < 0.0;
            double bound = wants_lower ? orig_.lower[j] : orig_.upper[j];
            if (std::isfinite(bound)) dobj += r * bound;
        }
        out.dual_objective = dobj;
    }

    void extract_farkas(const Vec& cost1, LpSolution& out) const {
        Vec yz = tableau_duals(cost1);
        out.certificate.assign(orig_.num_rows(), 0.0);
        out.certificate_ub.assign(orig_.num_vars(), 0.0);
        for (int i = 0; i < m_; ++i) {
            int src = zrow_src_[i];
            double v = row_flip_[i] * yz[i];
            if (src >= 0)
                out.certificate[src] = v;
            else
                out.certificate_ub[-1 - src] = v;
        }
        extract_point(out);
    }

    void extract_ray(LpSolution& out) const {
        int col = pending_unbounded_col_;
        Vec dz(ncols_, 0.0);
        dz[col] = 1.0;
        for (int i = 0; i < m_; ++i) dz[basis_[i]] = -row(i)[col];
        int n = orig_.num_vars();
        out.certificate.assign(n, 0.0);
        for (int j = 0; j < n; ++j) {
            const VarMap& vm = vmap_[j];
            if (vm.kind == 0)
                out.certificate[j] = dz[vm.z];
            else if (vm.kind == 1)
                out.certificate[j] = -dz[vm.z];
            else
                out.certificate[j] = dz[vm.z] - dz[vm.z + 1];
        }
    }
};

}  // namespace lpdetail

/// Two-phase dense simplex. Optimal solutions carry duals and reduced costs
/// meeting the sign convention above; infeasible problems carry Farkas row
/// multipliers; unbounded problems carry a feasible point plus an improving
/// ray in `certificate`.
inline LpSolution solve_lp(const LpProblem& p) {
    lpdetail::Simplex s(p);
    return s.solve();
}

/// One symmetric matrix variable constrained positive semidefinite. `cols`
/// maps the upper triangle, row-major with i <= j, onto LP columns; entry
/// (i,j) and (j,i) share a column by construction.
struct PsdBlock {
    int dim = 0;
    std::vector<int> cols;
};

inline int psd_block_col(const PsdBlock& b, int i, int j) {
    if (i > j) std::swap(i, j);
    return b.cols[static_cast<size_t>(i) * b.dim - i * (i + 1) / 2 + j];
}

struct PsdCutSolution {
    LpSolution solution;
    int cuts_added = 0;
    int iterations = 0;
    Vec objective_trace;
};

/// Solves an LP whose solution must realize each PsdBlock as a positive
/// semidefinite matrix. Violated blocks contribute eigenvector cuts
/// v^T R v >= 0 until the smallest eigenvalue of every block clears -1e-7
/// or 200 rounds pass (CutLimitExceeded). One-dimensional blocks become
/// plain sign constraints. Cut directions nearly parallel (cosine within
/// 1e-6) to an earlier cut on the same block are skipped.
inline PsdCutSolution solve_with_psd_cuts(LpProblem p, const std::vector<PsdBlock>& blocks,
                                          int max_iterations = 200) {
    for (const PsdBlock& b : blocks) {
        if (static_cast<int>(b.cols.size()) != b.dim * (b.dim + 1) / 2)
            throw DimensionMismatch("psd block: triangle size mismatch");
        // Diagonal entries of a PSD matrix are nonnegative; for dim 1 this
        // already is the whole constraint.
        for (int i = 0; i < b.dim; ++i) {
            int c = psd_block_col(b, i, i);
            p.lower[c] = std::max(p.lower[c], 0.0);
        }
    }
    std::vector<std::vector<Vec>> normals(blocks.size());
    PsdCutSolution out;

    auto realize = [](const PsdBlock& b, const Vec& values) {
        Matrix r(b.dim, b.dim);
        for (int i = 0; i < b.dim; ++i)
            for (int j = i; j < b.dim; ++j) r(i, j) = r(j, i) = values[psd_block_col(b, i, j)];
        return r;
    };
    // Adds the cut v^T R v >= 0 unless a nearly parallel one exists.
    auto add_cut = [&](size_t bi, const Vec& v) {
        for (const Vec& w : normals[bi])
            if (std::abs(dot(w, v)) > 1.0 - 1e-6) return false;
        normals[bi].push_back(v);
        const PsdBlock& b = blocks[bi];
        std::vector<std::pair<int, double>> terms;
        for (int i = 0; i < b.dim; ++i)
            for (int j = i; j < b.dim; ++j) {
                double w = i == j ? v[i] * v[i] : 2.0 * v[i] * v[j];
                if (w != 0.0) terms.emplace_back(psd_block_col(b, i, j), w);
            }
        p.add_terms(terms, RowSense::ge, 0.0);
        ++out.cuts_added;
        return true;
    };

    for (int round = 0; round < max_iterations; ++round) {
        out.solution = solve_lp(p);
        ++out.iterations;
        if (out.solution.status == LpStatus::infeasible) return out;

        if (out.solution.status == LpStatus::unbounded) {
            // The improving ray must itself realize PSD blocks, or a cut
            // along its most negative direction removes it.
            bool progressed = false;
            for (size_t bi = 0; bi < blocks.size(); ++bi) {
                if (blocks[bi].dim == 1) continue;
                EigenPair ep = min_eigenvalue(realize(blocks[bi], out.solution.certificate));
                if (ep.value < -1e-9 && add_cut(bi, ep.vector)) progressed = true;
            }
            if (!progressed) return out;  // genuinely unbounded
            continue;
        }

        out.objective_trace.push_back(out.solution.objective);
        bool violated = false, progressed = false;
        for (size_t bi = 0; bi < blocks.size(); ++bi) {
            if (blocks[bi].dim == 1) continue;
            EigenPair ep = min_eigenvalue(realize(blocks[bi], out.solution.primal));
            if (ep.value >= -1e-7) continue;
            violated = true;
            if (add_cut(bi, ep.vector)) progressed = true;
        }
        if (!violated) return out;
        if (!progressed)
            // Every violated direction duplicates an existing cut; the
            // residual violation is LP tolerance noise.
            return out;
    }
    throw CutLimitExceeded("solve_with_psd_cuts: 200 rounds without certified feasibility");
}

}  // namespace curo
