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
#include <vector>

#include "curo/cu_sets.hpp"
#include "curo/errors.hpp"
#include "curo/matrix.hpp"
#include "curo/parallel.hpp"
#include "curo/rng.hpp"
#include "curo/ro.hpp"
#include "curo/textio.hpp"

// Two-period robust knapsack benchmark: binary selections under a budget
// constraint whose weights live in connected (CU) or nonconnected (NC)
// ellipsoids, an exact branch-and-bound solver, Monte Carlo constraint
// probing, and the sweep experiment over set sizes and temporal correlation.

namespace curo {

/// Budget-constraint worst case for the connected model, the two-period
/// specialization of the center recursion:
///   mu1^T (x1 + (Phi+Psi)^T x2) + r1 |L^T (x1 + Psi^T x2)| + r2 |L^T x2|.
inline double cu_knapsack_lhs(const Vec& x1, const Vec& x2,
                              const KnapsackUncertaintyModel& model) {
    int m = model.dim();
    if (static_cast<int>(x1.size()) != m || static_cast<int>(x2.size()) != m)
        throw DimensionMismatch("cu_knapsack_lhs: decision dimension");
    Vec y1 = x1;
    axpy(1.0, matvec_t(model.phi, x2), y1);
    axpy(1.0, matvec_t(model.psi, x2), y1);
    Vec inner = x1;
    axpy(1.0, matvec_t(model.psi, x2), inner);
    return dot(model.mu1, y1) + model.r1 * two_norm(matvec_t(model.chol, inner)) +
           model.r2 * two_norm(matvec_t(model.chol, x2));
}

/// Nonconnected counterpart: both periods centered at mu1 with independent
/// protection terms.
inline double nc_knapsack_lhs(const Vec& x1, const Vec& x2,
                              const KnapsackUncertaintyModel& model) {
    int m = model.dim();
    if (static_cast<int>(x1.size()) != m || static_cast<int>(x2.size()) != m)
        throw DimensionMismatch("nc_knapsack_lhs: decision dimension");
    return dot(model.mu1, x1) + model.r1 * two_norm(matvec_t(model.chol, x1)) +
           dot(model.mu1, x2) + model.r2 * two_norm(matvec_t(model.chol, x2));
}

struct KnapsackInstance {
    enum class Mode { cu, nc };
    Vec c1, c2;
    double budget = 0.0;
    KnapsackUncertaintyModel model;
    Mode mode = Mode::cu;
};

struct KnapsackSolution {
    std::vector<uint8_t> x1, x2;
    double objective = 0.0;
    long nodes = 0;
};

namespace ksdetail {

/// Depth-first search over items in index order, zero branch first, so the
/// first solution found at each value is the lexicographically smallest.
/// Bounds are admissible: suffix sums of positive objective coefficients,
/// plus a best-ratio relaxation and mean-term feasibility pruning when every
/// mean coefficient is nonnegative (the protection terms only add weight).
class Search {
public:
    Search(const KnapsackInstance& inst, bool pruning) : inst_(inst), pruning_(pruning) {
        const auto& mo = inst.model;
        m_ = mo.dim();
        items_ = 2 * m_;
        bool cu = inst.mode == KnapsackInstance::Mode::cu;

        mean_coeff_.resize(items_);
        Vec phipsi_mu = matvec(mo.phi, mo.mu1);
        axpy(1.0, matvec(mo.psi, mo.mu1), phipsi_mu);
        for (int i = 0; i < m_; ++i) {
            mean_coeff_[i] = mo.mu1[i];
            mean_coeff_[m_ + i] = cu ? phipsi_mu[i] : mo.mu1[i];
        }
        obj_.resize(items_);
        for (int i = 0; i < m_; ++i) {
            obj_[i] = inst.c1[i];
            obj_[m_ + i] = inst.c2[i];
        }
        // Per-item contributions to the two protection vectors.
        dv1_.assign(items_, Vec(m_, 0.0));
        dv2_.assign(items_, Vec(m_, 0.0));
        Matrix psi_l = matmul(mo.psi, mo.chol);
        for (int i = 0; i < m_; ++i) {
            for (int j = 0; j < m_; ++j) {
                dv1_[i][j] = mo.chol(i, j);  // row i of L = column i of L^T
                if (cu) dv1_[m_ + i][j] = psi_l(i, j);
                dv2_[m_ + i][j] = mo.chol(i, j);
            }
        }

        suffix_pos_obj_.assign(items_ + 1, 0.0);
        suffix_best_ratio_.assign(items_ + 1, 0.0);
        prune_mean_ = pruning_;
        for (double w : mean_coeff_)
            if (w < 0.0) prune_mean_ = false;
        for (int i = items_ - 1; i >= 0; --i) {
            suffix_pos_obj_[i] = suffix_pos_obj_[i + 1] + std::max(0.0, obj_[i]);
            double ratio = suffix_best_ratio_[i + 1];
            if (obj_[i] > 0.0)
                ratio = std::max(ratio, mean_coeff_[i] > 1e-12 ? obj_[i] / mean_coeff_[i] : kInf);
            suffix_best_ratio_[i] = ratio;
        }
    }

    KnapsackSolution run() {
        x_.assign(items_, 0);
        v1_.assign(m_, 0.0);
        v2_.assign(m_, 0.0);
        best_found_ = false;
        if (lhs(0.0) > inst_.budget + 1e-9)
            throw LpInfeasible("solve_robust_knapsack: the empty selection violates the budget");
        descend(0, 0.0, 0.0);
        KnapsackSolution out;
        out.x1.assign(best_x_.begin(), best_x_.begin() + m_);
        out.x2.assign(best_x_.begin() + m_, best_x_.end());
        out.objective = best_value_;
        out.nodes = nodes_;
        return out;
    }

private:
    double lhs(double mean) const {
        return mean + inst_.model.r1 * two_norm(v1_) + inst_.model.r2 * two_norm(v2_);
    }

    void consider(double value) {
        if (best_found_ && value <= best_value_) return;  // first hit wins ties
        best_found_ = true;
        best_value_ = value;
        best_x_ = x_;
    }

    void descend(int item, double value, double mean) {
        ++nodes_;
        if (item == items_) {
            if (lhs(mean) <= inst_.budget + 1e-9) consider(value);
            return;
        }
        if (pruning_ && best_found_) {
            double bound = value + suffix_pos_obj_[item];
            if (prune_mean_) {
                double capacity = inst_.budget - mean;
                if (capacity < -1e-9) return;  // no completion can shed weight
                bound = std::min(bound, value + suffix_best_ratio_[item] * std::max(0.0, capacity));
            }
            if (bound < best_value_) return;
        }
        descend(item + 1, value, mean);
        axpy(1.0, dv1_[item], v1_);
        axpy(1.0, dv2_[item], v2_);
        x_[item] = 1;
        double new_mean = mean + mean_coeff_[item];
        bool viable = true;
        if (prune_mean_ && new_mean > inst_.budget + 1e-9) viable = false;
        if (viable) descend(item + 1, value + obj_[item], new_mean);
        x_[item] = 0;
        axpy(-1.0, dv1_[item], v1_);
        axpy(-1.0, dv2_[item], v2_);
    }

    const KnapsackInstance& inst_;
    bool pruning_;
    bool prune_mean_ = false;
    int m_ = 0, items_ = 0;
    Vec obj_, mean_coeff_;
    std::vector<Vec> dv1_, dv2_;
    Vec suffix_pos_obj_, suffix_best_ratio_;

    std::vector<uint8_t> x_, best_x_;
    Vec v1_, v2_;
    double best_value_ = 0.0;
    bool best_found_ = false;
    long nodes_ = 0;
};

}  // namespace ksdetail

/// Maximizes c1^T x1 + c2^T x2 over binary selections subject to the robust
/// budget constraint of the instance's mode. Exhaustive mode disables
/// pruning (horizon cap 24 items); the default branch-and-bound handles up
/// to 40. Ties go to the lexicographically smallest selection.
inline KnapsackSolution solve_robust_knapsack(const KnapsackInstance& inst,
                                              bool exhaustive = false) {
    inst.model.validate();
    int m = inst.model.dim();
    if (static_cast<int>(inst.c1.size()) != m || static_cast<int>(inst.c2.size()) != m)
        throw DimensionMismatch("solve_robust_knapsack: objective lengths");
    int items = 2 * m;
    if (exhaustive && items > 24)
        throw BadInput("solve_robust_knapsack: exhaustive mode capped at 24 items");
    if (items > 40) throw BadInput("solve_robust_knapsack: capped at 40 items");
    ksdetail::Search s(inst, !exhaustive);
    return s.run();
}

/// Fraction of `n` sampled weight paths that satisfy the realized budget
/// constraint. Deterministic in (seed, sample index).
inline double constraint_satisfaction(const std::vector<uint8_t>& x1,
                                      const std::vector<uint8_t>& x2,
                                      const KnapsackUncertaintyModel& model, const Matrix& sigma,
                                      double budget, int n, uint64_t seed) {
    if (n < 1) throw BadInput("constraint_satisfaction: need at least one sample");
    int m = model.dim();
    if (static_cast<int>(x1.size()) != m || static_cast<int>(x2.size()) != m)
        throw DimensionMismatch("constraint_satisfaction: decision dimension");
    int satisfied = 0;
    for (int s = 0; s < n; ++s) {
        auto [d1, d2] = sample_path(model, sigma, rng_key(seed, {static_cast<uint64_t>(s)}));
        double lhs = 0.0;
        for (int i = 0; i < m; ++i) lhs += d1[i] * x1[i] + d2[i] * x2[i];
        if (lhs <= budget + 1e-12) ++satisfied;
    }
    return static_cast<double>(satisfied) / n;
}

struct KnapsackExperimentConfig {
    int items1 = 10;
    int items2 = 10;
    double budget = 20.0;
    int replications = 10;       // estimates of the uncertainty model
    int estimation_samples = 500;
    int evaluation_samples = 500;
    Vec r_grid;                  // set sizes swept at fixed lambda
    Vec lambda_grid;             // temporal correlations swept at fixed r
    double lambda_for_r_sweep = 0.5;
    double r_for_lambda_sweep = 2.0;
    double noise_scale = 0.4;    // marginal standard deviation of the weights
    uint64_t base_seed = 1;
    int threads = 1;

    void validate() const {
        if (items1 < 1 || items2 < 1 || items1 != items2)
            throw BadInput("knapsack config: need equal positive item counts");
        if (replications < 1 || estimation_samples < 2 || evaluation_samples < 1)
            throw BadInput("knapsack config: counts must be positive");
        if (r_grid.empty() && lambda_grid.empty())
            throw BadInput("knapsack config: no sweep requested");
        for (double r : r_grid)
            if (!(r >= 0.0)) throw BadInput("knapsack config: negative set size");
        if (!std::isfinite(budget)) throw BadInput("knapsack config: budget");
    }
};

struct KnapsackRow {
    std::string sweep;  // "r" or "lambda"
    double sweep_value = 0.0;
    std::string model;  // "CU" or "NC"
    double avg_objective = 0.0;
    double satisfaction = 0.0;
    int excluded_replications = 0;
    int failed_replications = 0;
    double avg_selected_period1 = 0.0;
    double avg_selected_period2 = 0.0;
};

struct KnapsackExperimentResult {
    std::vector<KnapsackRow> rows;
};

inline std::string to_csv(const KnapsackExperimentResult& res) {
    CsvBuilder csv({"sweep", "sweep_value", "model", "avg_objective", "satisfaction",
                    "excluded_replications", "failed_replications", "avg_selected_period1",
                    "avg_selected_period2"});
    for (const KnapsackRow& r : res.rows) {
        csv.cell(r.sweep)
            .cell(r.sweep_value)
            .cell(r.model)
            .cell(r.avg_objective)
            .cell(r.satisfaction)
            .cell(r.excluded_replications)
            .cell(r.failed_replications)
            .cell(r.avg_selected_period1)
            .cell(r.avg_selected_period2);
        csv.end_row();
    }
    return csv.text();
}

namespace ksdetail {

/// True weight covariance for the sweep: a random correlation structure
/// scaled to the configured marginal standard deviation.
inline Matrix true_sigma(const KnapsackExperimentConfig& cfg) {
    int m = cfg.items1;
    CounterRng rng(rng_key(cfg.base_seed, {0xC0}));
    Matrix a(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) a(i, j) = rng.normal();
    Matrix s = matmul(a, a.transposed());
    Vec d(m);
    for (int i = 0; i < m; ++i) d[i] = 1.0 / std::sqrt(s(i, i));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            s(i, j) *= cfg.noise_scale * cfg.noise_scale * d[i] * d[j];
    return s;
}

struct Estimate {
    Vec mu_hat;
    Matrix sigma_hat;
    Vec c1, c2;
};

inline Estimate replication_estimate(const KnapsackExperimentConfig& cfg, const Matrix& sigma,
                                     int rep) {
    int m = cfg.items1;
    Matrix l = cholesky(sigma);
    Estimate est;
    est.mu_hat.assign(m, 0.0);
    std::vector<Vec> draws;
    for (int s = 0; s < cfg.estimation_samples; ++s) {
        Vec z(m);
        for (int j = 0; j < m; ++j)
            z[j] = normal_at(rng_key(cfg.base_seed, {1, static_cast<uint64_t>(rep),
                                                     static_cast<uint64_t>(s),
                                                     static_cast<uint64_t>(j)}),
                             0);
        Vec d = matvec(l, z);
        for (int j = 0; j < m; ++j) d[j] += 1.0;  // true mean is all-ones
        axpy(1.0 / cfg.estimation_samples, d, est.mu_hat);
        draws.push_back(std::move(d));
    }
    est.sigma_hat = Matrix(m, m);
    for (const Vec& d : draws) {
        Vec dev = d - est.mu_hat;
        est.sigma_hat = est.sigma_hat + outer(dev, 1.0 / (cfg.estimation_samples - 1));
    }
    // Objective draws, centered at e and 1.25 e with covariance sigma/100.
    Vec z1(m), z2(m);
    for (int j = 0; j < m; ++j) {
        z1[j] = normal_at(
            rng_key(cfg.base_seed, {2, static_cast<uint64_t>(rep), static_cast<uint64_t>(j)}), 0);
        z2[j] = normal_at(
            rng_key(cfg.base_seed, {3, static_cast<uint64_t>(rep), static_cast<uint64_t>(j)}), 0);
    }
    est.c1 = matvec(l, z1);
    est.c2 = matvec(l, z2);
    for (int j = 0; j < m; ++j) {
        est.c1[j] = 1.0 + 0.1 * est.c1[j];   // sqrt(sigma/100) = L/10
        est.c2[j] = 1.25 + 0.1 * est.c2[j];
    }
    return est;
}

}  // namespace ksdetail

/// Full CU-vs-NC sweep. Per replication the uncertainty model is estimated
/// from samples, both counterparts are solved at every grid point, and the
/// solutions are probed on freshly sampled paths from the true model.
/// Objective averages count only satisfied paths; replications with no
/// satisfied path are excluded and reported. Cells are independent work
/// units keyed by (seed, cell, replication), so the thread count never
/// changes the output.
inline KnapsackExperimentResult run_knapsack_experiment(const KnapsackExperimentConfig& cfg) {
    cfg.validate();
    int m = cfg.items1;
    Matrix sigma = ksdetail::true_sigma(cfg);

    struct Cell {
        std::string sweep;
        double value = 0.0;
        double r = 0.0, lambda = 0.0;
    };
    std::vector<Cell> cells;
    for (double r : cfg.r_grid) cells.push_back({"r", r, r, cfg.lambda_for_r_sweep});
    for (double lam : cfg.lambda_grid) cells.push_back({"lambda", lam, cfg.r_for_lambda_sweep, lam});

    KnapsackExperimentResult out;
    out.rows.assign(2 * cells.size(), KnapsackRow{});
    parallel_for(static_cast<int>(cells.size()), cfg.threads, [&](int ci) {
        const Cell& cell = cells[ci];
        KnapsackUncertaintyModel truth;
        truth.mu1.assign(m, 1.0);
        truth.phi = Matrix::identity(m);
        truth.psi = scaled(Matrix::identity(m), cell.lambda);
        truth.chol = cholesky(sigma);
        truth.r1 = truth.r2 = cell.r;

        for (int mode = 0; mode < 2; ++mode) {
            bool cu = mode == 0;
            KnapsackRow row;
            row.sweep = cell.sweep;
            row.sweep_value = cell.value;
            row.model = cu ? "CU" : "NC";
            double weighted_obj = 0.0, total_sat = 0.0;
            long total_paths = 0, satisfied_paths = 0;
            double sel1 = 0.0, sel2 = 0.0;
            for (int rep = 0; rep < cfg.replications; ++rep) {
                auto est = ksdetail::replication_estimate(cfg, sigma, rep);
                KnapsackInstance inst;
                inst.c1 = est.c1;
                inst.c2 = est.c2;
                inst.budget = cfg.budget;
                inst.mode = cu ? KnapsackInstance::Mode::cu : KnapsackInstance::Mode::nc;
                inst.model.mu1 = est.mu_hat;
                inst.model.phi = Matrix::identity(m);
                inst.model.psi = scaled(Matrix::identity(m), cell.lambda);
                Matrix sym = est.sigma_hat;
                for (int i = 0; i < m; ++i)
                    for (int j = i + 1; j < m; ++j) {
                        double v = 0.5 * (sym(i, j) + sym(j, i));
                        sym(i, j) = sym(j, i) = v;
                    }
                inst.model.chol = cholesky(sym);
                inst.model.r1 = inst.model.r2 = cell.r;

                KnapsackSolution sol;
                try {
                    sol = solve_robust_knapsack(inst);
                } catch (const Error&) {
                    ++row.failed_replications;
                    continue;
                }
                double sat = constraint_satisfaction(
                    sol.x1, sol.x2, truth, sigma, cfg.budget, cfg.evaluation_samples,
                    rng_key(cfg.base_seed, {4, static_cast<uint64_t>(ci),
                                            static_cast<uint64_t>(rep)}));
                long sat_count = std::lround(sat * cfg.evaluation_samples);
                total_paths += cfg.evaluation_samples;
                satisfied_paths += sat_count;
                double obj = dot(inst.c1, Vec(sol.x1.begin(), sol.x1.end())) +
                             dot(inst.c2, Vec(sol.x2.begin(), sol.x2.end()));
                weighted_obj += obj * sat_count;
                total_sat += sat_count;
                if (sat_count == 0) ++row.excluded_replications;
                for (uint8_t b : sol.x1) sel1 += b;
                for (uint8_t b : sol.x2) sel2 += b;
            }
            int solved = cfg.replications - row.failed_replications;
            row.satisfaction = total_paths > 0
                                   ? static_cast<double>(satisfied_paths) / total_paths
                                   : 0.0;
            row.avg_objective = total_sat > 0.0 ? weighted_obj / total_sat : 0.0;
            row.avg_selected_period1 = solved > 0 ? sel1 / solved : 0.0;
            row.avg_selected_period2 = solved > 0 ? sel2 / solved : 0.0;
            out.rows[2 * ci + mode] = std::move(row);
        }
    });
    return out;
}

}  // namespace curo
