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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "curo/dro.hpp"
#include "curo/errors.hpp"
#include "curo/matrix.hpp"
#include "curo/parallel.hpp"
#include "curo/rng.hpp"
#include "curo/textio.hpp"

// Two-asset, two-period distributionally robust portfolio benchmark. The
// connected (CU) model centers the second-period mean box at
// mu1 + omega (d1 - mu1); the plain DRO comparison keeps mu2 = mu1. Both
// maximize the worst-case expected piecewise-linear utility over a grid of
// simplex allocations, then realized wealth paths are simulated.

namespace curo {

struct PortfolioConfig {
    Vec mu1 = {0.03, 0.06};
    Vec delta = {0.02, 0.02};
    double variance = 0.005;
    /// utility(r) = min over pieces of (slope * r + intercept)
    std::vector<std::pair<double, double>> utility_pieces = {
        {1.5, 0.0}, {1.0, 0.015}, {0.2, 0.06}};
    int allocation_steps = 100;       // simplex grid resolution
    int support_points_per_axis = 7;  // moment-set support discretization
    int wealth_samples = 2000;
    double initial_wealth = 100.0;
    Vec omega_grid = {-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0};
    Vec rho_grid = {-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0};
    uint64_t base_seed = 1;
    int threads = 1;
    /// false: wealth multiplies by the gross return 1 + d^T x (default);
    /// true: the recursion is applied literally to the net returns.
    bool net_wealth_formula = false;

    void validate() const {
        if (mu1.size() != 2 || delta.size() != 2) throw BadInput("portfolio config: two assets");
        if (!(variance > 0.0)) throw BadInput("portfolio config: variance must be positive");
        for (double r : rho_grid)
            if (r < -1.0 || r > 1.0) throw BadInput("portfolio config: rho outside [-1, 1]");
        if (allocation_steps < 2 || support_points_per_axis < 2)
            throw BadInput("portfolio config: grid resolutions must be at least 2");
        if (wealth_samples < 2) throw BadInput("portfolio config: need at least two samples");
        if (!(initial_wealth > 0.0)) throw BadInput("portfolio config: initial wealth");
        if (omega_grid.empty() || rho_grid.empty()) throw BadInput("portfolio config: empty grid");
        if (utility_pieces.empty()) throw BadInput("portfolio config: empty utility");
    }

    double utility(double ret) const {
        double u = kInf;
        for (auto& [slope, intercept] : utility_pieces)
            u = std::min(u, slope * ret + intercept);
        return u;
    }

    Matrix sigma1(double rho) const {
        Matrix s(2, 2);
        s(0, 0) = s(1, 1) = variance;
        s(0, 1) = s(1, 0) = variance * rho;
        return s;
    }
};

enum class PortfolioModel { cu, dro };

namespace pfdetail {

inline double support_halfwidth(const PortfolioConfig& cfg) {
    return 3.0 * std::sqrt(cfg.variance);
}

/// Support lattice mu1 + L u over a u-grid of +-u_halfwidth standard
/// deviations, so the points respect the correlation geometry: at rho = 0
/// this is the plain per-axis box spanning mu1 +- u_halfwidth * sigma, and
/// at |rho| = 1 it degenerates to the reachable segment (duplicates
/// dropped).
inline std::vector<Vec> correlated_support(const Vec& center, const Matrix& chol,
                                           double u_halfwidth, int per_axis) {
    std::vector<Vec> pts;
    for (int i = 0; i < per_axis; ++i)
        for (int j = 0; j < per_axis; ++j) {
            Vec u = {-u_halfwidth + 2.0 * u_halfwidth * i / (per_axis - 1),
                     -u_halfwidth + 2.0 * u_halfwidth * j / (per_axis - 1)};
            Vec d = center + matvec(chol, u);
            bool dup = false;
            for (const Vec& p : pts)
                if (two_norm(p - d) <= 1e-12) {
                    dup = true;
                    break;
                }
            if (!dup) pts.push_back(std::move(d));
        }
    return pts;
}

}  // namespace pfdetail

/// Ambiguity process for one grid cell. The connected second period widens
/// its support lattice to (1+|omega|) times the base halfwidth and scales
/// the second-moment cap by the envelope of the reachable conditional
/// second moments about the fixed anchor mu1 — proportionally to Sigma_1,
/// so the adversary's freedom keeps the correlation geometry. Without the
/// widening every conditional set beyond |omega| of about 1 would be empty.
inline MomentAmbiguityProcess portfolio_process(const PortfolioConfig& cfg, double omega,
                                                double rho, PortfolioModel model) {
    cfg.validate();
    Matrix chol = cholesky(cfg.sigma1(rho));
    MomentAmbiguityProcess p;
    p.periods = 2;
    p.dim = 2;
    p.mu1 = cfg.mu1;
    p.support.push_back(
        pfdetail::correlated_support(cfg.mu1, chol, 3.0, cfg.support_points_per_axis));
    p.delta = {cfg.delta, cfg.delta};
    p.anchor = {cfg.mu1, cfg.mu1};
    Matrix cap1 = cfg.sigma1(rho);
    if (model == PortfolioModel::cu) {
        p.mean_a = {scaled(Matrix::identity(2), omega)};
        p.mean_b = {scaled(cfg.mu1, 1.0 - omega)};
        double widen = 1.0 + std::abs(omega);
        p.support.push_back(pfdetail::correlated_support(cfg.mu1, chol, 3.0 * widen,
                                                         cfg.support_points_per_axis));
        // Conditional second moments about mu1 reach omega^2 u u^T plus the
        // variance of bracketing mixtures on the coarser second-period
        // lattice (at most spacing^2/4 per axis); their envelope scales
        // Sigma_1.
        double spacing = 6.0 * widen / (cfg.support_points_per_axis - 1);
        double reach = 3.0 * std::abs(omega);
        double factor =
            omega == 0.0 ? 1.0 : 1.0 + 2.0 * reach * reach + 0.25 * spacing * spacing;
        p.sigma_cap = {cap1, scaled(cap1, factor)};
    } else {
        p.mean_a = {Matrix(2, 2)};
        p.mean_b = {cfg.mu1};
        p.support.push_back(p.support[0]);
        p.sigma_cap = {cap1, cap1};
    }
    p.validate();
    return p;
}

/// Worst-case expected utility of one allocation over one stage set.
inline double portfolio_stage_value(const PortfolioConfig& cfg, const Vec& x,
                                    const StageMomentSet& set) {
    if (x.size() != 2) throw DimensionMismatch("portfolio_stage_value: two assets");
    Vec cost(set.support.size());
    for (size_t i = 0; i < set.support.size(); ++i) cost[i] = cfg.utility(dot(x, set.support[i]));
    return moment_sup_lp(cost, set, Direction::inf).value;
}

struct PortfolioSolution {
    Vec x1, x2;
    double objective = 0.0;
};

/// Grid search over both simplex allocations. The connected model evaluates
/// the nested objective (one stage-two LP per conditioning point, shared
/// across first-period allocations); the plain model separates into two
/// identical single-stage problems. Ties prefer the smaller asset-one
/// weight, first period first.
inline PortfolioSolution solve_portfolio(const PortfolioConfig& cfg, double omega, double rho,
                                         PortfolioModel model) {
    MomentAmbiguityProcess proc = portfolio_process(cfg, omega, rho, model);
    int steps = cfg.allocation_steps;
    std::vector<Vec> grid;
    for (int i = 0; i <= steps; ++i) {
        double w = static_cast<double>(i) / steps;
        grid.push_back({w, 1.0 - w});
    }
    auto stage_set = [&](int t, const Vec& prev) { return drodetail::stage_set(proc, t, prev); };

    PortfolioSolution best;
    bool found = false;
    if (model == PortfolioModel::dro) {
        // Identical sets in both periods: one value sweep serves both.
        StageMomentSet set = stage_set(1, {});
        int arg = -1;
        double best_v = 0.0;
        for (size_t i = 0; i < grid.size(); ++i) {
            double v = portfolio_stage_value(cfg, grid[i], set);
            if (arg < 0 || v > best_v) {
                arg = static_cast<int>(i);
                best_v = v;
            }
        }
        best.x1 = best.x2 = grid[arg];
        best.objective = 2.0 * best_v;
        return best;
    }

    const auto& pts1 = proc.support[0];
    const auto& pts2 = proc.support[1];
    StageMomentSet first = stage_set(1, {});
    for (size_t i2 = 0; i2 < grid.size(); ++i2) {
        const Vec& x2 = grid[i2];
        Vec cost2(pts2.size());
        for (size_t i = 0; i < pts2.size(); ++i) cost2[i] = cfg.utility(dot(x2, pts2[i]));
        // Worst-case second-period value conditioned on each realization.
        Vec continuation(pts1.size());
        for (size_t c = 0; c < pts1.size(); ++c)
            continuation[c] = moment_sup_lp(cost2, stage_set(2, pts1[c]), Direction::inf).value;
        for (size_t i1 = 0; i1 < grid.size(); ++i1) {
            const Vec& x1 = grid[i1];
            Vec cost1(pts1.size());
            for (size_t i = 0; i < pts1.size(); ++i)
                cost1[i] = cfg.utility(dot(x1, pts1[i])) + continuation[i];
            double v = moment_sup_lp(cost1, first, Direction::inf).value;
            bool better = !found || v > best.objective;
            if (!better && found && v == best.objective) {
                // lexicographic (x1 weight, x2 weight), ascending
                if (x1[0] < best.x1[0] || (x1[0] == best.x1[0] && x2[0] < best.x2[0]))
                    better = true;
            }
            if (better) {
                found = true;
                best.x1 = x1;
                best.x2 = x2;
                best.objective = v;
            }
        }
    }
    return best;
}

struct WealthStats {
    double mean = 0.0;
    double stddev = 0.0;
    double worst = 0.0;
};

/// Terminal wealth along one realized return path: the per-period
/// multiplier is d^T x, taken on gross returns (1 + d) unless the literal
/// net-return recursion is configured.
inline double wealth_path(const PortfolioConfig& cfg, const Vec& x1, const Vec& x2,
                          const Vec& d1, const Vec& d2) {
    double shift = cfg.net_wealth_formula ? 0.0 : 1.0;
    return cfg.initial_wealth * (shift + dot(d1, x1)) * (shift + dot(d2, x2));
}

/// Simulates terminal wealth over sampled return paths
///   d1 ~ N(mu1, Sigma1),  d2 ~ N(mu1 + omega (d1 - mu1), Sigma1),
/// with the standardized draws clipped to +-3 so realizations stay inside
/// the modeled support lattices. Wealth compounds by d^T x per period, with
/// returns shifted to gross multipliers unless the literal net-return
/// recursion is requested.
inline WealthStats simulate_wealth(const PortfolioConfig& cfg, const Vec& x1, const Vec& x2,
                                   double omega, double rho, int n, uint64_t seed) {
    cfg.validate();
    if (n < 2) throw BadInput("simulate_wealth: need at least two samples");
    Matrix l = cholesky(cfg.sigma1(rho));
    auto noise = [&](uint64_t s, uint64_t period) {
        Vec z(2);
        for (int j = 0; j < 2; ++j)
            z[j] = std::clamp(
                normal_at(rng_key(seed, {s, period, static_cast<uint64_t>(j)}), 0), -3.0, 3.0);
        return matvec(l, z);
    };

    double sum = 0.0, sumsq = 0.0, worst = kInf;
    for (int s = 0; s < n; ++s) {
        Vec d1 = cfg.mu1 + noise(s, 1);
        Vec d2 = cfg.mu1;
        axpy(omega, d1 - cfg.mu1, d2);
        axpy(1.0, noise(s, 2), d2);
        double w = wealth_path(cfg, x1, x2, d1, d2);
        sum += w;
        sumsq += w * w;
        worst = std::min(worst, w);
    }
    WealthStats out;
    out.mean = sum / n;
    out.stddev = std::sqrt(std::max(0.0, (sumsq - n * out.mean * out.mean) / (n - 1)));
    out.worst = worst;
    return out;
}

struct PortfolioRow {
    double omega = 0.0;
    double rho = 0.0;
    std::string model;  // "CU" or "DRO"
    double objective = 0.0;
    double x1_asset1 = 0.0;
    double x2_asset1 = 0.0;
    double wealth_mean = 0.0;
    double wealth_std = 0.0;
    double wealth_worst = 0.0;
    // CU rows carry the differences against the DRO row of the same cell.
    double std_minus_dro = 0.0;
    double worst_minus_dro = 0.0;
    std::string wealth_formula;  // "gross" or "net"
};

struct PortfolioExperimentResult {
    std::vector<PortfolioRow> rows;
};

inline std::string to_csv(const PortfolioExperimentResult& res) {
    CsvBuilder csv({"omega", "rho", "model", "objective", "x1_asset1", "x2_asset1",
                    "wealth_mean", "wealth_std", "wealth_worst", "std_minus_dro",
                    "worst_minus_dro", "wealth_formula"});
    for (const PortfolioRow& r : res.rows) {
        csv.cell(r.omega)
            .cell(r.rho)
            .cell(r.model)
            .cell(r.objective)
            .cell(r.x1_asset1)
            .cell(r.x2_asset1)
            .cell(r.wealth_mean)
            .cell(r.wealth_std)
            .cell(r.wealth_worst)
            .cell(r.std_minus_dro)
            .cell(r.worst_minus_dro)
            .cell(r.wealth_formula);
        csv.end_row();
    }
    return csv.text();
}

/// Full (omega, rho) sweep of both models. Each cell solves both
/// allocation problems and scores them on the same simulated paths; cells
/// are independent and keyed by their index, so outputs do not depend on
/// the thread count.
inline PortfolioExperimentResult run_portfolio_experiment(const PortfolioConfig& cfg) {
    cfg.validate();
    int cells = static_cast<int>(cfg.omega_grid.size() * cfg.rho_grid.size());
    PortfolioExperimentResult out;
    out.rows.assign(2 * cells, PortfolioRow{});
    parallel_for(cells, cfg.threads, [&](int ci) {
        double omega = cfg.omega_grid[ci / cfg.rho_grid.size()];
        double rho = cfg.rho_grid[ci % cfg.rho_grid.size()];
        PortfolioSolution cu = solve_portfolio(cfg, omega, rho, PortfolioModel::cu);
        PortfolioSolution dro = solve_portfolio(cfg, omega, rho, PortfolioModel::dro);
        uint64_t path_seed = rng_key(cfg.base_seed, {0xF0, static_cast<uint64_t>(ci)});
        WealthStats wcu = simulate_wealth(cfg, cu.x1, cu.x2, omega, rho, cfg.wealth_samples,
                                          path_seed);
        WealthStats wdro = simulate_wealth(cfg, dro.x1, dro.x2, omega, rho, cfg.wealth_samples,
                                           path_seed);
        const char* formula = cfg.net_wealth_formula ? "net" : "gross";
        PortfolioRow rc{omega, rho,       "CU",          cu.objective,
                        cu.x1[0], cu.x2[0], wcu.mean,    wcu.stddev,
                        wcu.worst, wcu.stddev - wdro.stddev, wcu.worst - wdro.worst, formula};
        PortfolioRow rd{omega, rho,       "DRO",         dro.objective,
                        dro.x1[0], dro.x2[0], wdro.mean, wdro.stddev,
                        wdro.worst, 0.0,      0.0,       formula};
        out.rows[2 * ci] = std::move(rc);
        out.rows[2 * ci + 1] = std::move(rd);
    });
    return out;
}

}  // namespace curo
