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

// End-to-end acceptance runner. Each numbered criterion prints exactly one
// PASS/FAIL line with its measured quantities; the process exits nonzero if
// the requested criterion fails. Usage: curo_acceptance <1..10|all> [cli].

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "curo/dro.hpp"
#include "curo/instance_gen.hpp"
#include "curo/knapsack.hpp"
#include "curo/lp.hpp"
#include "curo/portfolio.hpp"
#include "curo/ro.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace curo;
using namespace curo::testing;

namespace {

constexpr uint64_t kSeed = 20260809;

bool report(int criterion, bool pass, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    return pass;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

// --- criterion 1: exactness of the center counterpart in one dimension ----
bool criterion_1() {
    CounterRng rng(rng_key(kSeed, {1}));
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        int T = 1 + static_cast<int>(rng.below(4));
        auto proc = gen::random_ellipsoidal_process(rng, T, 1);
        std::vector<Vec> x;
        for (int t = 0; t < T; ++t) x.push_back(gen::random_vec(rng, 1, -1.5, 1.5));
        double lhs = center_cu_lhs(x, proc).lhs;
        double oracle = nested_worst_case_oracle(x, proc, Exact1d{});
        worst = std::max(worst, std::abs(lhs - oracle) / (1.0 + std::abs(lhs)));
    }
    return report(1, worst <= 1e-10,
                  fmt("max relative gap %.3e over 500 instances (tol 1e-10)", worst));
}

// --- criterion 2: Monte Carlo never exceeds the counterpart ----------------
bool criterion_2() {
    CounterRng rng(rng_key(kSeed, {2}));
    double worst = -kInf;
    for (int i = 0; i < 100; ++i) {
        int T = 1 + static_cast<int>(rng.below(3));
        int m = 1 + static_cast<int>(rng.below(3));
        auto proc = gen::random_ellipsoidal_process(rng, T, m);
        std::vector<Vec> x;
        for (int t = 0; t < T; ++t) x.push_back(gen::random_vec(rng, m, -1.5, 1.5));
        double lhs = center_cu_lhs(x, proc).lhs;
        double mc = nested_worst_case_oracle(
            x, proc, MonteCarlo{100000, rng_key(kSeed, {2, static_cast<uint64_t>(i)})});
        worst = std::max(worst, mc - lhs);
    }
    return report(2, worst <= 1e-9,
                  fmt("max (sampled - counterpart) = %.3e over 100 instances (tol 1e-9)", worst));
}

// --- criterion 3: conservativeness of the covariance counterpart -----------
bool criterion_3() {
    CounterRng rng(rng_key(kSeed, {3}));
    double worst_violation = -kInf, worst_eq = 0.0;
    for (int i = 0; i < 200; ++i) {
        int T = 2 + static_cast<int>(rng.below(2));
        auto proc = gen::random_matrix_process(rng, T, 1);
        std::vector<Vec> x;
        for (int t = 0; t < T; ++t) x.push_back(gen::random_vec(rng, 1, -1.5, 1.5));
        double lhs = matrix_cu_lhs(x, proc).lhs;
        double sampled = matrix_dynamics_grid_oracle(x, proc, 33);
        worst_violation = std::max(worst_violation, sampled - lhs);

        // Frozen dynamics must reduce to the fixed-covariance counterpart.
        auto frozen = proc;
        for (int t = 0; t + 1 < T; ++t) {
            frozen.a[t] = 1.0;
            frozen.f[t] = 0.0;
            frozen.c_mats[t] = Matrix(1, 1);
        }
        double froz = matrix_cu_lhs(x, frozen).lhs;
        Matrix l1 = cholesky(frozen.sigma1);
        double fixed = 0.0;
        for (int t = 0; t < T; ++t)
            fixed += dot(frozen.means[t], x[t]) +
                     frozen.radii[t] * two_norm(matvec_t(l1, x[t]));
        worst_eq = std::max(worst_eq, std::abs(froz - fixed) / (1.0 + std::abs(fixed)));
    }
    bool pass = worst_violation <= 1e-9 && worst_eq <= 1e-10;
    return report(3, pass,
                  fmt("max (sampled - lhs) = %.3e (tol 1e-9); frozen-case gap %.3e (tol 1e-10)",
                      worst_violation, worst_eq));
}

// --- criterion 4: polyhedral strong duality --------------------------------
bool criterion_4() {
    CounterRng rng(rng_key(kSeed, {4}));
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        int T = 1 + static_cast<int>(rng.below(3));
        int m = 1 + static_cast<int>(rng.below(4));
        auto proc = random_polyhedral_process(rng, T, m, static_cast<int>(rng.below(3)));
        std::vector<Vec> x;
        for (int t = 0; t < T; ++t) x.push_back(gen::random_vec(rng, m, -1.5, 1.5));
        double primal = polyhedral_worst_case(x, proc).value;
        ConstraintSystem cs = polyhedral_cu_dual_system(x, proc, 0.0);
        cs.linear.erase(cs.linear.begin());
        std::vector<std::pair<int, double>> obj;
        int col = 0;
        for (int t = 0; t < T; ++t)
            for (int r = 0; r < proc.g_mat[t].rows(); ++r)
                obj.emplace_back(col++, proc.g_vec[t][r]);
        LpSolution s = solve_lp(system_lp(cs, obj));
        double gap = s.status == LpStatus::optimal
                         ? std::abs(s.objective - primal) / (1.0 + std::abs(primal))
                         : kInf;
        worst = std::max(worst, gap);
    }
    return report(4, worst <= 1e-7,
                  fmt("max relative duality gap %.3e over 200 instances (tol 1e-7)", worst));
}

// --- criterion 5: adjustable two-period checks ------------------------------
bool criterion_5() {
    CounterRng rng(rng_key(kSeed, {5}));
    int mismatches = 0;
    for (int i = 0; i < 100; ++i) {
        int md1 = 1 + static_cast<int>(rng.below(3));
        int md2 = 1 + static_cast<int>(rng.below(3));
        int n2 = 1 + static_cast<int>(rng.below(3));
        auto inst = random_aro_polyhedral(rng, md1, md2, n2);
        Vec worst = aro_bilinear_worst_rows(inst);
        Vec lhs = matvec(inst.a21, inst.x1);
        double slack = i % 2 == 0 ? 0.5 : -0.5;
        for (int r = 0; r < inst.a21.rows(); ++r)
            inst.a21(r, 0) += (worst[r] + slack - lhs[r]) / inst.x1[0];
        bool feas = system_feasible(aro_polyhedral_system(inst));
        if (feas != (slack > 0)) ++mismatches;
    }
    double worst_residual = 0.0;
    for (int i = 0; i < 100; ++i) {
        int n2 = 1 + static_cast<int>(rng.below(3));
        auto inst = random_aro_ellipsoidal_1d(rng, n2);
        Vec rows = aro_ellipsoidal_rows(inst);
        Matrix coupled = matmul(inst.a22, inst.x2_rule);
        Vec lhs = matvec(inst.a21, inst.x1);
        for (int r = 0; r < n2; ++r) {
            double oracle = -kInf;
            for (double s1 : {-1.0, 1.0})
                for (double s2 : {-1.0, 1.0}) {
                    double d1 = inst.mu1[0] + s1 * inst.r1 * inst.l1(0, 0);
                    double center =
                        inst.a2(0, 0) * inst.mu1[0] + inst.f2(0, 0) * d1 + inst.c2[0];
                    double d2 = center + s2 * inst.r2 * inst.l2(0, 0);
                    oracle = std::max(oracle, inst.b2(r, 0) * d2 - coupled(r, 0) * d1);
                }
            worst_residual =
                std::max(worst_residual, std::abs(rows[r] - (oracle - lhs[r])));
        }
    }
    bool pass = mismatches == 0 && worst_residual <= 1e-9;
    return report(
        5, pass,
        fmt("feasibility mismatches %.0f / 100; endpoint-oracle residual %.3e (tol 1e-9)",
            static_cast<double>(mismatches), worst_residual));
}

// --- criterion 6: distributionally robust ordering chain -------------------
bool criterion_6() {
    CounterRng rng(rng_key(kSeed, {6}));
    double worst_primal_excess = -kInf, worst_cons_deficit = -kInf, worst_joint = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto proc = random_moment_process(rng, 2, 1, 2 + static_cast<int>(rng.below(4)));
        double kink = -0.5 + rng.uniform();
        double slope = -1.0 + 2.0 * rng.uniform();
        std::vector<StageCost> costs = {
            [slope](const Vec& d) { return slope * d[0]; },
            [kink](const Vec& d) { return std::max(0.0, d[0] - kink); }};
        auto nested = nested_dro_value(proc, costs, Direction::sup);
        double exact = exact_dual_value(proc, costs);
        double conservative = conservative_dual_value(proc, costs);
        double joint = composed_expectation(proc, costs, nested);
        double scale = 1.0 + std::abs(nested.value);
        worst_primal_excess = std::max(worst_primal_excess, (nested.value - exact) / scale);
        worst_cons_deficit = std::max(worst_cons_deficit, (exact - conservative) / scale);
        worst_joint = std::max(worst_joint, std::abs(joint - nested.value) / scale);
    }
    bool pass =
        worst_primal_excess <= 1e-4 && worst_cons_deficit <= 1e-7 && worst_joint <= 1e-8;
    return report(6, pass,
                  fmt("primal-exact %.3e (tol 1e-4); exact-conservative %.3e (tol 1e-7); "
                      "joint %.3e (tol 1e-8)",
                      worst_primal_excess, worst_cons_deficit, worst_joint));
}

// --- criterion 7: knapsack sweep trends -------------------------------------
bool criterion_7() {
    KnapsackExperimentConfig cfg;
    cfg.items1 = cfg.items2 = 10;
    cfg.budget = 20.0;
    cfg.replications = 10;
    cfg.estimation_samples = 500;
    cfg.evaluation_samples = 500;
    for (int i = 0; i < 8; ++i) cfg.r_grid.push_back(4.0 * i / 7);
    cfg.lambda_grid = {-0.2, 0.0};  // companion variant and the decoupled check
    cfg.base_seed = kSeed;
    auto res = run_knapsack_experiment(cfg);

    const double paths = static_cast<double>(cfg.replications) * cfg.evaluation_samples;
    auto z_gap = [&](double pa, double pb) {
        // one-sided 95% comparison slack for two satisfaction fractions
        double se = std::sqrt(pa * (1.0 - pa) / paths + pb * (1.0 - pb) / paths);
        return 1.645 * se;
    };

    std::vector<const KnapsackRow*> cu_r, nc_r;
    const KnapsackRow *cu_neg = nullptr, *nc_neg = nullptr, *cu_zero = nullptr,
                      *nc_zero = nullptr;
    for (const auto& row : res.rows) {
        if (row.sweep == "r") {
            (row.model == "CU" ? cu_r : nc_r).push_back(&row);
        } else if (row.sweep_value == -0.2) {
            (row.model == "CU" ? cu_neg : nc_neg) = &row;
        } else {
            (row.model == "CU" ? cu_zero : nc_zero) = &row;
        }
    }

    std::string fail;
    for (size_t i = 0; i < cu_r.size(); ++i) {
        if (cu_r[i]->satisfaction <
            nc_r[i]->satisfaction - z_gap(cu_r[i]->satisfaction, nc_r[i]->satisfaction))
            fail += " cu-sat<nc-sat@r" + std::to_string(i);
        if (cu_r[i]->avg_objective > nc_r[i]->avg_objective)
            fail += " cu-obj>nc-obj@r" + std::to_string(i);
        if (i > 0) {
            if (cu_r[i]->satisfaction <
                cu_r[i - 1]->satisfaction -
                    z_gap(cu_r[i]->satisfaction, cu_r[i - 1]->satisfaction))
                fail += " cu-sat-drop@r" + std::to_string(i);
            if (nc_r[i]->satisfaction <
                nc_r[i - 1]->satisfaction -
                    z_gap(nc_r[i]->satisfaction, nc_r[i - 1]->satisfaction))
                fail += " nc-sat-drop@r" + std::to_string(i);
        }
    }
    if (cu_zero->satisfaction != nc_zero->satisfaction ||
        cu_zero->avg_objective != nc_zero->avg_objective)
        fail += " lambda0-mismatch";
    if (cu_neg->avg_objective < nc_neg->avg_objective) fail += " neg-obj";
    if (cu_neg->satisfaction >
        nc_neg->satisfaction + z_gap(cu_neg->satisfaction, nc_neg->satisfaction))
        fail += " neg-sat";

    bool pass = fail.empty();
    std::ostringstream detail;
    detail << "r-sweep sat CU " << cu_r.front()->satisfaction << "->" << cu_r.back()->satisfaction
           << ", NC " << nc_r.front()->satisfaction << "->" << nc_r.back()->satisfaction;
    if (!pass) detail << "; violations:" << fail;
    return report(7, pass, detail.str());
}

// --- criterion 8: portfolio grid trends --------------------------------------
bool criterion_8() {
    PortfolioConfig cfg;  // defaults: 9x9 grid, 2000 samples, 1/100 allocations
    cfg.base_seed = kSeed;
    auto res = run_portfolio_experiment(cfg);

    int cells = 0, std_ok = 0;
    bool rho0_ok = true;
    std::vector<double> omegas, advantage;
    for (size_t i = 0; i + 1 < res.rows.size(); i += 2) {
        const PortfolioRow& cu = res.rows[i];
        const PortfolioRow& dro = res.rows[i + 1];
        ++cells;
        if (cu.wealth_std <= 1.05 * dro.wealth_std) ++std_ok;
        omegas.push_back(cu.omega);
        advantage.push_back(cu.wealth_worst - dro.wealth_worst);
        if (cu.rho == 0.0 && (cu.x1_asset1 > 0.5 || cu.x2_asset1 > 0.5 ||
                              dro.x1_asset1 > 0.5 || dro.x2_asset1 > 0.5))
            rho0_ok = false;
    }
    // Spearman rank correlation between the worst-case advantage and omega.
    auto ranks = [](const std::vector<double>& v) {
        std::vector<int> idx(v.size());
        for (size_t i = 0; i < v.size(); ++i) idx[i] = static_cast<int>(i);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (size_t pos = 0; pos < idx.size(); ++pos) r[idx[pos]] = static_cast<double>(pos);
        return r;
    };
    auto ra = ranks(advantage), rb = ranks(omegas);
    double ma = 0.0, mb = 0.0;
    for (size_t i = 0; i < ra.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= ra.size();
    mb /= rb.size();
    double num = 0.0, va = 0.0, vb = 0.0;
    for (size_t i = 0; i < ra.size(); ++i) {
        num += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    double spearman = num / std::sqrt(va * vb);

    bool std_pass = std_ok >= static_cast<int>(std::ceil(0.95 * cells));
    bool pass = std_pass && rho0_ok && spearman > 0.0;
    return report(8, pass,
                  fmt("std ok %g/81 cells; rho0 dominance %g; spearman %.3f",
                      static_cast<double>(std_ok), rho0_ok ? 1.0 : 0.0, spearman));
}

// --- criterion 9: linear programming certification ---------------------------
bool criterion_9() {
    CounterRng rng(rng_key(kSeed, {9}));
    double worst_gap = 0.0, worst_cs = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        int n = 2 + static_cast<int>(rng.below(5));
        int rows = 1 + static_cast<int>(rng.below(6));
        LpProblem p;
        p.sense = rng.uniform() < 0.5 ? LpSense::minimize : LpSense::maximize;
        for (int j = 0; j < n; ++j)
            p.add_var(-2.0 + 4.0 * rng.uniform(), -1.0 - rng.uniform(), 1.0 + rng.uniform());
        Vec x0(n);
        for (int j = 0; j < n; ++j)
            x0[j] = p.lower[j] + (p.upper[j] - p.lower[j]) * (0.3 + 0.4 * rng.uniform());
        for (int i = 0; i < rows; ++i) {
            Vec a(n);
            for (double& v : a) v = -1.0 + 2.0 * rng.uniform();
            double margin = 0.1 + rng.uniform();
            if (rng.uniform() < 0.5)
                p.add_row(a, RowSense::le, dot(a, x0) + margin);
            else
                p.add_row(a, RowSense::ge, dot(a, x0) - margin);
        }
        LpSolution s = solve_lp(p);
        auto brute = lp_vertex_enumeration(p);
        if (s.status != LpStatus::optimal || !brute.found) {
            worst_gap = kInf;
            break;
        }
        worst_gap = std::max(
            worst_gap, std::abs(s.objective - brute.value) / (1.0 + std::abs(brute.value)));
        for (int i = 0; i < p.num_rows(); ++i) {
            double slack = dot(p.row_coeffs[i], s.primal) - p.row_rhs[i];
            worst_cs = std::max(worst_cs, std::abs(s.row_dual[i] * slack) /
                                              (1.0 + std::abs(s.objective)));
        }
    }
    // Cut loop on the pinned-off-diagonal trace problem: optimum 2.
    LpProblem trace;
    int a = trace.add_var(1.0, -kInf, kInf);
    int b = trace.add_var(0.0, -kInf, kInf);
    int c = trace.add_var(1.0, -kInf, kInf);
    trace.add_terms({{b, 1.0}}, RowSense::eq, 1.0);
    auto psd = solve_with_psd_cuts(trace, {PsdBlock{2, {a, b, c}}});
    double trace_err = std::abs(psd.solution.objective - 2.0);

    bool pass = worst_gap <= 1e-8 && worst_cs <= 1e-7 && trace_err <= 1e-5;
    return report(9, pass,
                  fmt("max value gap %.3e (tol 1e-8); slackness %.3e (tol 1e-7); cut-loop "
                      "error %.3e (tol 1e-5)",
                      worst_gap, worst_cs, trace_err));
}

// --- criterion 10: byte determinism of every CLI verb ------------------------
std::string g_cli_path;
std::string g_fixture_dir;

bool criterion_10() {
    if (g_cli_path.empty())
        return report(10, false, "cli binary path not provided");
    const std::string& fix = g_fixture_dir;
    const std::string tmp = "/tmp/curo_acc";
    struct Case {
        std::string name;
        std::string args;
        bool threaded;
    };
    std::vector<Case> cases = {
        {"reformulate", "reformulate " + fix + "/polyhedral_small.json", false},
        {"worst-case",
         "worst-case " + fix + "/ellipsoidal_small.json --seed 5 --samples 20000", false},
        {"solve-knapsack", "solve-knapsack " + fix + "/knapsack_instance_small.json", false},
        {"run-knapsack", "run-knapsack " + fix + "/knapsack_config_small.json --seed 5", true},
        {"solve-portfolio",
         "solve-portfolio " + fix + "/portfolio_config_small.json --seed 5 omega=0.5 rho=0.5",
         false},
        {"run-portfolio", "run-portfolio " + fix + "/portfolio_config_small.json --seed 5",
         true},
        {"verify", "verify --suite duality --seed 5", false},
        {"export", "export " + fix + "/polyhedral_small.json", false},
    };
    auto slurp = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    std::string failures;
    for (const Case& c : cases) {
        std::vector<std::string> variants = {" "};
        if (c.threaded) variants = {" --threads 1 ", " --threads 4 "};
        std::string reference;
        bool ok = true;
        int run_idx = 0;
        for (const std::string& extra : variants)
            for (int rep = 0; rep < 2; ++rep, ++run_idx) {
                std::string out = tmp + "_" + c.name + std::to_string(run_idx);
                std::string command =
                    g_cli_path + " " + c.args + extra + "--out " + out + " > /dev/null 2>&1";
                if (std::system(command.c_str()) != 0) ok = false;
                std::string bytes = slurp(out);
                if (bytes.empty()) ok = false;
                if (run_idx == 0)
                    reference = bytes;
                else if (bytes != reference)
                    ok = false;
            }
        if (!ok) failures += " " + c.name;
    }
    bool pass = failures.empty();
    return report(10, pass,
                  pass ? "8 verbs byte-identical across reruns and thread counts"
                       : "non-deterministic or failing verbs:" + failures);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: curo_acceptance <1..10|all> [cli-binary] [fixtures]\n");
        return 2;
    }
    std::string which = argv[1];
    if (argc >= 3) g_cli_path = argv[2];
    if (argc >= 4)
        g_fixture_dir = argv[3];
    else if (const char* env = std::getenv("CURO_FIXTURES"))
        g_fixture_dir = env;

    std::vector<std::function<bool()>> criteria = {
        criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
        criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
    bool all = which == "all";
    bool ok = true;
    for (int i = 1; i <= 10; ++i) {
        if (!all && which != std::to_string(i)) continue;
        ok = criteria[i - 1]() && ok;
    }
    return ok ? 0 : 1;
}
