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
#include <string>
#include <vector>

#include "curo/constraint_system.hpp"
#include "curo/cu_sets.hpp"
#include "curo/matrix.hpp"
#include "curo/ro.hpp"

// Deterministic reformulations of the budget constraint as constraint
// systems in the decision variables: second-order-cone rows for the
// ellipsoidal families, linear dual systems for the polyhedral ones. The
// decision variable of period t, component j is named x_<t>_<jj>.

namespace curo {

namespace refdetail {

inline std::string pad2(int v) { return (v < 10 ? "0" : "") + std::to_string(v); }

}  // namespace refdetail

/// Budget constraint over center-connected ellipsoids as one linear row plus
/// one cone row per period. The aggregated decisions y_k are expanded into
/// the x variables through the recursion weights.
inline ConstraintSystem reformulate_center(const EllipsoidalCuProcess& proc, double budget) {
    proc.validate();
    int T = proc.periods, m = proc.dim;
    ConstraintSystem cs;
    std::vector<std::vector<int>> x(T, std::vector<int>(m));
    for (int t = 0; t < T; ++t)
        for (int j = 0; j < m; ++j)
            x[t][j] = cs.add_variable("x_" + std::to_string(t + 1) + "_" + refdetail::pad2(j));
    std::vector<int> s(T);
    for (int t = 0; t < T; ++t) s[t] = cs.add_variable("s_" + std::to_string(t + 1));

    // weights[k][tau] carries y_{k+1} = sum_tau weights x_{tau+1}
    // (zero-based period indices).
    std::vector<std::vector<Matrix>> weights(T, std::vector<Matrix>(T));
    for (int k = T - 1; k >= 0; --k) {
        weights[k][k] = Matrix::identity(m);
        for (int tau = k + 1; tau < T; ++tau) {
            Matrix sum = proc.center_f[k] + proc.center_a[k];
            weights[k][tau] = matmul(sum.transposed(), weights[k + 1][tau]);
        }
    }

    std::vector<std::pair<int, double>> budget_terms;
    Vec coeff(m);
    for (int tau = 0; tau < T; ++tau) {
        // mu_1 through y_1 plus every offset c_k through y_{k+1}.
        coeff = matvec_t(weights[0][tau], proc.mu1);
        for (int k = 0; k < tau; ++k)
            axpy(1.0, matvec_t(weights[k + 1][tau], proc.center_c[k]), coeff);
        for (int j = 0; j < m; ++j)
            if (coeff[j] != 0.0) budget_terms.emplace_back(x[tau][j], coeff[j]);
    }
    for (int t = 0; t < T; ++t)
        if (proc.radii[t] != 0.0) budget_terms.emplace_back(s[t], proc.radii[t]);
    cs.add_linear(std::move(budget_terms), RowSense::le, budget);

    for (int t = 0; t < T; ++t) {
        SocRow row;
        row.head.add(s[t], 1.0);
        for (int i = 0; i < m; ++i) {
            AffineExpr body;
            // Row i of L_t^T (x_t + F_t^T y_{t+1}).
            for (int tau = t; tau < T; ++tau) {
                Matrix v = tau == t ? Matrix::identity(m)
                                    : matmul(proc.center_f[t].transposed(), weights[t + 1][tau]);
                Matrix lv = matmul(proc.chol[t].transposed(), v);
                for (int j = 0; j < m; ++j) body.add(x[tau][j], lv(i, j));
            }
            row.body.push_back(std::move(body));
        }
        cs.soc.push_back(std::move(row));
    }
    return cs;
}

/// Budget constraint over covariance-connected ellipsoids: one linear row
/// and one set of cone rows per sign assignment. Auxiliary variables are
/// indexed by the sign vector's position in the lexicographic enumeration.
inline ConstraintSystem reformulate_matrix(const MatrixCuProcess& proc, double budget) {
    proc.validate();
    int T = proc.periods, m = proc.dim;
    Matrix l1 = cholesky(proc.sigma1);
    std::vector<Matrix> c_chol;
    for (int k = 0; k + 1 < T; ++k) c_chol.push_back(cholesky(proc.c_mats[k]));
    std::vector<Vec> decay(T + 2, Vec(T + 1, 1.0));
    for (int k = 1; k <= T; ++k)
        for (int t = k + 1; t <= T; ++t) decay[k][t] = decay[k][t - 1] * proc.a[t - 2];

    ConstraintSystem cs;
    std::vector<std::vector<int>> x(T, std::vector<int>(m));
    for (int t = 0; t < T; ++t)
        for (int j = 0; j < m; ++j)
            x[t][j] = cs.add_variable("x_" + std::to_string(t + 1) + "_" + refdetail::pad2(j));

    auto signs = enumerate_sign_vectors(T);
    for (size_t ni = 0; ni < signs.size(); ++ni) {
        const SignVector& n = signs[ni];
        // beta[t][tau]: scalar weight of x_{tau+1} inside y_{t+1}.
        std::vector<Vec> beta(T, Vec(T, 0.0));
        for (int t = T - 1; t >= 0; --t) {
            beta[t][t] = 1.0;
            for (int tau = t + 1; tau < T; ++tau) {
                double acc = 0.0;
                for (int tp = t + 1; tp <= tau; ++tp) {
                    double w = n[sign_index(t + 1, tp + 1, T)] * proc.radii[tp] *
                               std::sqrt(decay[t + 2][tp + 1] * proc.f[t]);
                    acc += w * beta[tp][tau];
                }
                beta[t][tau] = acc;
            }
        }
        std::string tag = "_n" + std::to_string(ni);
        std::vector<std::pair<int, double>> row;
        for (int t = 0; t < T; ++t)
            for (int j = 0; j < m; ++j)
                if (proc.means[t][j] != 0.0) row.emplace_back(x[t][j], proc.means[t][j]);

        auto add_cone = [&](const std::string& name, const Matrix& lmat, int t, double coeff) {
            int aux = cs.add_variable(name);
            row.emplace_back(aux, coeff);
            SocRow soc;
            soc.head.add(aux, 1.0);
            for (int i = 0; i < m; ++i) {
                AffineExpr body;
                for (int tau = t; tau < T; ++tau) {
                    if (beta[t][tau] == 0.0) continue;
                    for (int j = 0; j < m; ++j)
                        body.add(x[tau][j], beta[t][tau] * lmat(j, i));
                }
                soc.body.push_back(std::move(body));
            }
            cs.soc.push_back(std::move(soc));
        };

        for (int t = 0; t < T; ++t)
            add_cone("s_" + std::to_string(t + 1) + tag, l1, t,
                     proc.radii[t] * std::sqrt(decay[1][t + 1]));
        for (int k = 1; k <= T - 1; ++k)
            for (int t = k + 1; t <= T; ++t)
                add_cone("w_" + std::to_string(k) + "_" + std::to_string(t) + tag,
                         c_chol[k - 1], t - 1,
                         proc.radii[t - 1] * std::sqrt(decay[k + 1][t]));
        cs.add_linear(std::move(row), RowSense::le, budget);
    }
    return cs;
}

}  // namespace curo
