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
#include <vector>

#include "curo/dro.hpp"
#include "curo/instance_gen.hpp"
#include "curo/ro.hpp"

// Built-in oracle-equivalence suites: each one replays a reformulation
// against an independent evaluation route over seeded random instances and
// reports the largest observed gap next to its tolerance.

namespace curo {

struct VerifyReport {
    std::string suite;
    int instances = 0;
    double max_gap = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Center-connected counterpart against the one-dimensional endpoint
/// enumeration: the reformulation is exact, so relative gaps stay at
/// rounding level.
inline VerifyReport verify_center_suite(uint64_t seed, int instances = 500) {
    CounterRng rng(rng_key(seed, {0x10}));
    VerifyReport rep{"center", instances, 0.0, 1e-10, false};
    for (int i = 0; i < instances; ++i) {
        int T = 1 + static_cast<int>(rng.below(4));
        auto proc = gen::random_ellipsoidal_process(rng, T, 1);
        std::vector<Vec> x;
        for (int t = 0; t < T; ++t) x.push_back(gen::random_vec(rng, 1, -1.5, 1.5));
        double lhs = center_cu_lhs(x, proc).lhs;
        double oracle = nested_worst_case_oracle(x, proc, Exact1d{});
        rep.max_gap = std::max(rep.max_gap, std::abs(lhs - oracle) / (1.0 + std::abs(lhs)));
    }
    rep.pass = rep.max_gap <= rep.tolerance;
    return rep;
}

/// Polyhedral dual system against the joint primal worst case: minimizing
/// the dual objective over the stationarity rows must close the duality gap.
inline VerifyReport verify_duality_suite(uint64_t seed, int instances = 200) {
    CounterRng rng(rng_key(seed, {0x20}));
    VerifyReport rep{"duality", instances, 0.0, 1e-7, false};
    for (int i = 0; i < instances; ++i) {
        int T = 1 + static_cast<int>(rng.below(3));
        int m = 1 + static_cast<int>(rng.below(4));
        auto proc = gen::random_polyhedral_process(rng, T, m, static_cast<int>(rng.below(3)));
        std::vector<Vec> x;
        for (int t = 0; t < T; ++t) x.push_back(gen::random_vec(rng, m, -1.5, 1.5));
        double primal = polyhedral_worst_case(x, proc).value;
        ConstraintSystem cs = polyhedral_cu_dual_system(x, proc, 0.0);
        cs.linear.erase(cs.linear.begin());  // keep stationarity rows only
        std::vector<std::pair<int, double>> obj;
        int col = 0;
        for (int t = 0; t < T; ++t)
            for (int r = 0; r < proc.g_mat[t].rows(); ++r)
                obj.emplace_back(col++, proc.g_vec[t][r]);
        LpSolution s = solve_lp(system_lp(cs, obj));
        double gap = s.status == LpStatus::optimal
                         ? std::abs(s.objective - primal) / (1.0 + std::abs(primal))
                         : kInf;
        rep.max_gap = std::max(rep.max_gap, gap);
    }
    rep.pass = rep.max_gap <= rep.tolerance;
    return rep;
}

/// Ordering chain of the distributionally robust values: nested primal,
/// per-realization dual, shared-multiplier dual, plus the composed-joint
/// consistency of the primal recursion. The reported gap is the largest
/// violation of any link relative to its own tolerance.
inline VerifyReport verify_dro_suite(uint64_t seed, int instances = 100) {
    CounterRng rng(rng_key(seed, {0x30}));
    VerifyReport rep{"dro", instances, 0.0, 1.0, false};
    for (int i = 0; i < instances; ++i) {
        auto proc = gen::random_moment_process(rng, 2, 1, 2 + static_cast<int>(rng.below(4)));
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
        double worst = std::max(
            {(nested.value - exact) / scale / 1e-4, (exact - conservative) / scale / 1e-7,
             std::abs(joint - nested.value) / scale / 1e-8});
        rep.max_gap = std::max(rep.max_gap, worst);
    }
    rep.pass = rep.max_gap <= rep.tolerance;
    return rep;
}

inline std::vector<VerifyReport> run_verify_suites(const std::string& suite, uint64_t seed) {
    std::vector<VerifyReport> out;
    if (suite == "center" || suite == "all") out.push_back(verify_center_suite(seed));
    if (suite == "duality" || suite == "all") out.push_back(verify_duality_suite(seed));
    if (suite == "dro" || suite == "all") out.push_back(verify_dro_suite(seed));
    if (out.empty()) throw BadInput("verify: unknown suite '" + suite + "'");
    return out;
}

}  // namespace curo
