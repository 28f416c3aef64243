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

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "curo/dro.hpp"
#include "curo/json_io.hpp"
#include "curo/knapsack.hpp"
#include "curo/lp_text.hpp"
#include "curo/portfolio.hpp"
#include "curo/reformulate.hpp"
#include "curo/ro.hpp"
#include "curo/verify.hpp"

// Command-line surface. Exit codes partition into 0 (success), 1 (domain
// error, machine-readable JSON on stderr), 2 (usage error). All outputs are
// deterministic for a fixed seed and invariant to --threads.

namespace curo::cli {

class UsageError : public Error {
public:
    explicit UsageError(const std::string& msg) : Error("usage", msg) {}
};

struct Command {
    std::string verb;
    std::string input;
    std::string output;       // empty: stdout
    std::string format = "csv";
    std::string suite = "all";
    uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;
    int samples = 100000;
    std::vector<std::pair<std::string, std::string>> overrides;  // dotted key, raw value
    std::string help_text;  // set when --help was requested
};

namespace clidetail {

inline void add_common(CLI::App* sub, Command& cmd, bool with_input) {
    if (with_input)
        sub->add_option("input", cmd.input, "instance or config JSON")
            ->required()
            ->check(CLI::ExistingFile);
    sub->add_option("--out", cmd.output, "write output to this path instead of stdout");
    sub->add_option("--seed", cmd.seed, "seed override")->each([&cmd](const std::string&) {
        cmd.seed_set = true;
    });
    sub->add_option("--threads", cmd.threads, "worker cap; never changes results")
        ->check(CLI::PositiveNumber);
    sub->add_option("--format", cmd.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->allow_extras();
}

inline void collect_overrides(CLI::App* sub, Command& cmd) {
    for (const std::string& extra : sub->remaining()) {
        auto eq = extra.find('=');
        if (eq == std::string::npos || eq == 0)
            throw UsageError("override must be key=value, got '" + extra + "'");
        cmd.overrides.emplace_back(extra.substr(0, eq), extra.substr(eq + 1));
    }
}

inline void apply_overrides(Json& j, const Command& cmd) {
    for (const auto& [key, raw] : cmd.overrides) {
        Json value;
        try {
            value = Json::parse(raw);
        } catch (const Json::parse_error&) {
            value = raw;  // bare strings pass through
        }
        Json* cur = &j;
        size_t start = 0;
        for (;;) {
            size_t dotpos = key.find('.', start);
            std::string seg = key.substr(start, dotpos - start);
            if (seg.empty()) throw UsageError("bad override path '" + key + "'");
            if (dotpos == std::string::npos) {
                (*cur)[seg] = value;
                break;
            }
            cur = &((*cur)[seg]);
            start = dotpos + 1;
        }
    }
}

inline void emit(const Command& cmd, const std::string& text) {
    if (cmd.output.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
    } else {
        write_text_file(cmd.output, text);
    }
}

inline Json load_input(const Command& cmd) {
    Json j = load_json_file(cmd.input);
    apply_overrides(j, cmd);
    return j;
}

}  // namespace clidetail

/// Builds the validated Command. Throws UsageError on unknown verbs, missing
/// inputs, or malformed overrides; a help request returns verb "help" with
/// the text filled in.
inline Command parse_args(const std::vector<std::string>& args) {
    Command cmd;
    CLI::App app{"connected-uncertainty robust optimization toolkit"};
    app.name("curo");
    app.require_subcommand(1);

    struct SubSpec {
        const char* verb;
        const char* blurb;
        bool with_input;
    };
    const SubSpec specs[] = {
        {"reformulate", "emit the constraint system of an instance", true},
        {"worst-case", "evaluate counterparts and oracles on an instance", true},
        {"solve-knapsack", "solve one robust knapsack instance", true},
        {"run-knapsack", "run the knapsack sweep experiment", true},
        {"solve-portfolio", "solve one portfolio cell", true},
        {"run-portfolio", "run the portfolio grid experiment", true},
        {"verify", "run the oracle-equivalence suites", false},
        {"export", "write the instance's LP in text form", true},
    };
    std::vector<CLI::App*> subs;
    for (const SubSpec& s : specs) {
        CLI::App* sub = app.add_subcommand(s.verb, s.blurb);
        clidetail::add_common(sub, cmd, s.with_input);
        subs.push_back(sub);
    }
    subs[1]->add_option("--samples", cmd.samples, "Monte Carlo sample count")
        ->check(CLI::PositiveNumber);
    subs[6]->add_option("--suite", cmd.suite, "center, duality, dro, or all")
        ->check(CLI::IsMember({"center", "duality", "dro", "all"}));

    std::vector<const char*> argv;
    argv.push_back("curo");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        cmd.verb = "help";
        cmd.help_text = app.help();
        return cmd;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    for (size_t i = 0; i < subs.size(); ++i)
        if (subs[i]->parsed()) {
            cmd.verb = specs[i].verb;
            clidetail::collect_overrides(subs[i], cmd);
        }
    return cmd;
}

namespace clidetail {

inline Json vec_json(const Vec& v) {
    Json j = Json::array();
    for (double x : v) j.push_back(x);
    return j;
}

inline int run_reformulate(const Command& cmd) {
    Json j = load_input(cmd);
    std::string kind = instance_kind(j);
    ConstraintSystem cs;
    if (kind == "ellipsoidal_center") {
        double budget = jsondetail::field(j, "budget").get<double>();
        cs = reformulate_center(parse_ellipsoidal_center(j), budget);
    } else if (kind == "ellipsoidal_matrix") {
        double budget = jsondetail::field(j, "budget").get<double>();
        cs = reformulate_matrix(parse_ellipsoidal_matrix(j), budget);
    } else if (kind == "polyhedral_rhs") {
        double budget = jsondetail::field(j, "budget").get<double>();
        cs = polyhedral_cu_dual_system(parse_decisions(j), parse_polyhedral_rhs(j), budget);
    } else if (kind == "aro_polyhedral") {
        cs = aro_polyhedral_system(parse_aro_polyhedral(j));
    } else {
        throw BadInput("reformulate: unsupported kind '" + kind +
                       "' (moment instances are evaluated via worst-case)");
    }
    emit(cmd, canonical_json(cs.to_json()));
    return 0;
}

inline int run_worst_case(const Command& cmd) {
    Json j = load_input(cmd);
    std::string kind = instance_kind(j);
    Json out{{"schema_version", 1}, {"kind", kind}};
    uint64_t seed = cmd.seed_set ? cmd.seed : 2026;
    if (kind == "ellipsoidal_center") {
        auto proc = parse_ellipsoidal_center(j);
        auto x = parse_decisions(j);
        auto res = center_cu_lhs(x, proc);
        out["counterpart_lhs"] = res.lhs;
        double mc = nested_worst_case_oracle(x, proc, MonteCarlo{cmd.samples, seed});
        out["monte_carlo_lower_bound"] = mc;
        out["samples"] = cmd.samples;
        if (proc.dim == 1) {
            double exact = nested_worst_case_oracle(x, proc, Exact1d{});
            out["exact_1d"] = exact;
            out["gap_exact_1d"] = res.lhs - exact;
        }
    } else if (kind == "ellipsoidal_matrix") {
        auto proc = parse_ellipsoidal_matrix(j);
        auto res = matrix_cu_lhs(parse_decisions(j), proc);
        out["counterpart_lhs"] = res.lhs;
        Json sign = Json::array();
        for (int v : res.worst_sign) sign.push_back(v);
        out["worst_sign"] = sign;
    } else if (kind == "polyhedral_rhs") {
        auto res = polyhedral_worst_case(parse_decisions(j), parse_polyhedral_rhs(j));
        out["value"] = res.value;
        Json path = Json::array();
        for (const Vec& d : res.path) path.push_back(vec_json(d));
        out["worst_path"] = path;
    } else if (kind == "moment") {
        auto proc = parse_moment(j);
        check_moment_feasibility(proc);
        auto x = parse_decisions(j);
        if (static_cast<int>(x.size()) != proc.periods)
            throw BadInput("moment worst-case: need one decision vector per period");
        std::vector<StageCost> costs;
        for (const Vec& xt : x)
            costs.push_back([xt](const Vec& d) { return dot(xt, d); });
        DroReport rep = dro_report(proc, costs);
        out["primal"] = rep.primal;
        out["exact_dual"] = rep.exact_dual;
        out["conservative_dual"] = rep.conservative_dual;
        out["composed_joint"] = rep.composed_joint;
        out["gaps"] = Json{{"exact_minus_primal", rep.exact_dual - rep.primal},
                           {"conservative_minus_exact",
                            rep.conservative_dual - rep.exact_dual},
                           {"joint_minus_primal", rep.composed_joint - rep.primal}};
        out["cut_counts"] = Json{{"exact", rep.exact_cuts},
                                 {"conservative", rep.conservative_cuts}};
    } else if (kind == "aro_ellipsoidal") {
        Vec rows = aro_ellipsoidal_rows(parse_aro_ellipsoidal(j));
        out["row_violations"] = vec_json(rows);
        bool feasible = true;
        for (double r : rows) feasible = feasible && r <= 1e-9;
        out["feasible"] = feasible;
    } else {
        throw BadInput("worst-case: unsupported kind '" + kind + "'");
    }
    emit(cmd, canonical_json(out));
    return 0;
}

inline int run_solve_knapsack(const Command& cmd) {
    Json j = load_input(cmd);
    KnapsackInstance inst = parse_knapsack_instance(j);
    KnapsackSolution sol = solve_robust_knapsack(inst);
    Vec x1(sol.x1.begin(), sol.x1.end()), x2(sol.x2.begin(), sol.x2.end());
    double lhs = inst.mode == KnapsackInstance::Mode::cu ? cu_knapsack_lhs(x1, x2, inst.model)
                                                         : nc_knapsack_lhs(x1, x2, inst.model);
    Json out{{"schema_version", 1},
             {"objective", sol.objective},
             {"constraint_lhs", lhs},
             {"budget", inst.budget},
             {"mode", inst.mode == KnapsackInstance::Mode::cu ? "cu" : "nc"},
             {"x1", Json(sol.x1)},
             {"x2", Json(sol.x2)},
             {"nodes", sol.nodes}};
    emit(cmd, canonical_json(out));
    return 0;
}

inline int run_knapsack_sweep(const Command& cmd) {
    Json j = load_input(cmd);
    KnapsackExperimentConfig cfg = parse_knapsack_config(j);
    if (cmd.seed_set) cfg.base_seed = cmd.seed;
    cfg.threads = cmd.threads;
    KnapsackExperimentResult res = run_knapsack_experiment(cfg);
    if (cmd.format == "csv") {
        emit(cmd, to_csv(res));
    } else {
        Json rows = Json::array();
        for (const KnapsackRow& r : res.rows)
            rows.push_back(Json{{"sweep", r.sweep},
                                {"sweep_value", r.sweep_value},
                                {"model", r.model},
                                {"avg_objective", r.avg_objective},
                                {"satisfaction", r.satisfaction},
                                {"excluded_replications", r.excluded_replications},
                                {"failed_replications", r.failed_replications},
                                {"avg_selected_period1", r.avg_selected_period1},
                                {"avg_selected_period2", r.avg_selected_period2}});
        emit(cmd, canonical_json(Json{{"schema_version", 1}, {"rows", rows}}));
    }
    return 0;
}

inline int run_solve_portfolio(const Command& cmd) {
    Json j = load_input(cmd);
    double omega = j.contains("omega") ? j["omega"].get<double>() : 0.0;
    double rho = j.contains("rho") ? j["rho"].get<double>() : 0.0;
    PortfolioConfig cfg = parse_portfolio_config(j);
    if (cmd.seed_set) cfg.base_seed = cmd.seed;
    Json out{{"schema_version", 1}, {"omega", omega}, {"rho", rho}};
    for (auto model : {PortfolioModel::cu, PortfolioModel::dro}) {
        PortfolioSolution sol = solve_portfolio(cfg, omega, rho, model);
        WealthStats w = simulate_wealth(cfg, sol.x1, sol.x2, omega, rho, cfg.wealth_samples,
                                        rng_key(cfg.base_seed, {0xF0}));
        Json rec{{"objective", sol.objective},
                 {"x1", vec_json(sol.x1)},
                 {"x2", vec_json(sol.x2)},
                 {"wealth_mean", w.mean},
                 {"wealth_std", w.stddev},
                 {"wealth_worst", w.worst}};
        out[model == PortfolioModel::cu ? "cu" : "dro"] = std::move(rec);
    }
    emit(cmd, canonical_json(out));
    return 0;
}

inline int run_portfolio_sweep(const Command& cmd) {
    Json j = load_input(cmd);
    PortfolioConfig cfg = parse_portfolio_config(j);
    if (cmd.seed_set) cfg.base_seed = cmd.seed;
    cfg.threads = cmd.threads;
    PortfolioExperimentResult res = run_portfolio_experiment(cfg);
    if (cmd.format == "csv") {
        emit(cmd, to_csv(res));
    } else {
        Json rows = Json::array();
        for (const PortfolioRow& r : res.rows)
            rows.push_back(Json{{"omega", r.omega},
                                {"rho", r.rho},
                                {"model", r.model},
                                {"objective", r.objective},
                                {"x1_asset1", r.x1_asset1},
                                {"x2_asset1", r.x2_asset1},
                                {"wealth_mean", r.wealth_mean},
                                {"wealth_std", r.wealth_std},
                                {"wealth_worst", r.wealth_worst},
                                {"std_minus_dro", r.std_minus_dro},
                                {"worst_minus_dro", r.worst_minus_dro},
                                {"wealth_formula", r.wealth_formula}});
        emit(cmd, canonical_json(Json{{"schema_version", 1}, {"rows", rows}}));
    }
    return 0;
}

inline int run_verify(const Command& cmd) {
    uint64_t seed = cmd.seed_set ? cmd.seed : 2026;
    auto reports = run_verify_suites(cmd.suite, seed);
    bool all_pass = true;
    std::string text;
    Json rows = Json::array();
    for (const VerifyReport& r : reports) {
        all_pass = all_pass && r.pass;
        text += "suite " + r.suite + ": instances=" + std::to_string(r.instances) +
                " max_gap=" + to_shortest(r.max_gap) + " tolerance=" + to_shortest(r.tolerance) +
                (r.pass ? " PASS" : " FAIL") + "\n";
        rows.push_back(Json{{"suite", r.suite},
                            {"instances", r.instances},
                            {"max_gap", r.max_gap},
                            {"tolerance", r.tolerance},
                            {"pass", r.pass}});
    }
    if (cmd.format == "json")
        emit(cmd, canonical_json(Json{{"schema_version", 1}, {"suites", rows}}));
    else
        emit(cmd, text);
    return all_pass ? 0 : 1;
}

inline int run_export(const Command& cmd) {
    Json j = load_input(cmd);
    std::string kind = instance_kind(j);
    if (kind == "polyhedral_rhs") {
        emit(cmd, lp_to_text(polyhedral_joint_lp(parse_decisions(j), parse_polyhedral_rhs(j))));
    } else if (kind == "moment") {
        auto proc = parse_moment(j);
        auto x = parse_decisions(j);
        if (x.empty()) throw BadInput("export: moment instance needs decision vectors");
        StageMomentSet set = drodetail::stage_set(proc, 1, {});
        Vec cost(set.support.size());
        for (size_t i = 0; i < set.support.size(); ++i) cost[i] = dot(x[0], set.support[i]);
        emit(cmd, lp_to_text(moment_base_lp(cost, set, Direction::sup)));
    } else {
        throw BadInput("export: unsupported kind '" + kind + "'");
    }
    return 0;
}

}  // namespace clidetail

/// Dispatches a parsed command. Domain failures surface as curo::Error.
inline int run(const Command& cmd) {
    if (cmd.verb == "help") {
        std::fwrite(cmd.help_text.data(), 1, cmd.help_text.size(), stdout);
        return 0;
    }
    if (cmd.verb == "reformulate") return clidetail::run_reformulate(cmd);
    if (cmd.verb == "worst-case") return clidetail::run_worst_case(cmd);
    if (cmd.verb == "solve-knapsack") return clidetail::run_solve_knapsack(cmd);
    if (cmd.verb == "run-knapsack") return clidetail::run_knapsack_sweep(cmd);
    if (cmd.verb == "solve-portfolio") return clidetail::run_solve_portfolio(cmd);
    if (cmd.verb == "run-portfolio") return clidetail::run_portfolio_sweep(cmd);
    if (cmd.verb == "verify") return clidetail::run_verify(cmd);
    if (cmd.verb == "export") return clidetail::run_export(cmd);
    throw UsageError("unknown verb '" + cmd.verb + "'");
}

/// Full entry point with the documented exit-code contract.
inline int main_entry(const std::vector<std::string>& args) {
    try {
        Command cmd = parse_args(args);
        return run(cmd);
    } catch (const UsageError& e) {
        std::string msg = std::string(e.what()) + "\nrun 'curo --help' for usage\n";
        std::fwrite(msg.data(), 1, msg.size(), stderr);
        return 2;
    } catch (const Error& e) {
        Json err{{"error", e.code()}, {"message", e.what()}};
        std::string msg = err.dump() + "\n";
        std::fwrite(msg.data(), 1, msg.size(), stderr);
        return 1;
    } catch (const std::exception& e) {
        Json err{{"error", "internal"}, {"message", e.what()}};
        std::string msg = err.dump() + "\n";
        std::fwrite(msg.data(), 1, msg.size(), stderr);
        return 1;
    }
}

}  // namespace curo::cli
