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

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "curo/errors.hpp"
#include "curo/lp.hpp"

// Interchange form for reformulated constraint systems: named variables with
// sign restrictions, linear rows, and second-order-cone rows head >= |body|.
// Serialization is canonical (declaration order, sorted JSON keys) so equal
// systems serialize to equal bytes.

namespace curo {

enum class VarSign { free_var, nonneg, nonpos };

struct AffineExpr {
    double constant = 0.0;
    std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)

    void add(int var, double coeff) {
        if (coeff != 0.0) terms.emplace_back(var, coeff);
    }
};

struct LinearRow {
    std::vector<std::pair<int, double>> terms;
    RowSense sense = RowSense::le;
    double rhs = 0.0;
};

struct SocRow {
    AffineExpr head;
    std::vector<AffineExpr> body;
};

struct ConstraintSystem {
    std::vector<std::string> variables;
    std::vector<VarSign> signs;
    std::vector<LinearRow> linear;
    std::vector<SocRow> soc;

    int add_variable(const std::string& name, VarSign sign = VarSign::free_var) {
        variables.push_back(name);
        signs.push_back(sign);
        return static_cast<int>(variables.size()) - 1;
    }

    void add_linear(std::vector<std::pair<int, double>> terms, RowSense sense, double rhs) {
        for (auto& [v, c] : terms)
            if (v < 0 || v >= static_cast<int>(variables.size()))
                throw BadInput("constraint system: undeclared column");
        linear.push_back({std::move(terms), sense, rhs});
    }

    nlohmann::json to_json() const;
};

namespace csdetail {

inline nlohmann::json affine_json(const ConstraintSystem& cs, const AffineExpr& e) {
    nlohmann::json coeffs = nlohmann::json::object();
    for (auto& [v, c] : e.terms) coeffs[cs.variables[v]] = c;
    return nlohmann::json{{"const", e.constant}, {"coeffs", std::move(coeffs)}};
}

}  // namespace csdetail

inline nlohmann::json ConstraintSystem::to_json() const {
    nlohmann::json vars = nlohmann::json::array();
    nlohmann::json sign_map = nlohmann::json::object();
    for (size_t i = 0; i < variables.size(); ++i) {
        vars.push_back(variables[i]);
        const char* s = signs[i] == VarSign::nonneg   ? ">=0"
                        : signs[i] == VarSign::nonpos ? "<=0"
                                                      : "free";
        sign_map[variables[i]] = s;
    }
    nlohmann::json lin = nlohmann::json::array();
    for (const LinearRow& r : linear) {
        nlohmann::json coeffs = nlohmann::json::object();
        for (auto& [v, c] : r.terms) coeffs[variables[v]] = c;
        const char* s = r.sense == RowSense::le ? "<=" : r.sense == RowSense::ge ? ">=" : "==";
        lin.push_back({{"coeffs", std::move(coeffs)}, {"sense", s}, {"rhs", r.rhs}});
    }
    nlohmann::json cones = nlohmann::json::array();
    for (const SocRow& r : soc) {
        nlohmann::json body = nlohmann::json::array();
        for (const AffineExpr& e : r.body) body.push_back(csdetail::affine_json(*this, e));
        cones.push_back({{"head", csdetail::affine_json(*this, r.head)}, {"body", std::move(body)}});
    }
    return nlohmann::json{{"schema_version", 1},
                          {"variables", std::move(vars)},
                          {"signs", std::move(sign_map)},
                          {"linear", std::move(lin)},
                          {"soc", std::move(cones)}};
}

/// LP over the linear part of the system (SOC rows must be absent).
/// `objective` maps columns to costs; omitted columns cost zero.
inline LpProblem system_lp(const ConstraintSystem& cs,
                           const std::vector<std::pair<int, double>>& objective,
                           LpSense sense = LpSense::minimize) {
    if (!cs.soc.empty())
        throw BadInput("system_lp: system has second-order-cone rows");
    LpProblem p;
    p.sense = sense;
    for (size_t i = 0; i < cs.variables.size(); ++i) {
        double lb = cs.signs[i] == VarSign::nonneg ? 0.0 : -kInf;
        double ub = cs.signs[i] == VarSign::nonpos ? 0.0 : kInf;
        p.add_var(0.0, lb, ub);
    }
    for (auto& [v, c] : objective) p.objective[v] = c;
    for (const LinearRow& r : cs.linear) p.add_terms(r.terms, r.sense, r.rhs);
    return p;
}

/// Phase-1 feasibility of the linear system.
inline bool system_feasible(const ConstraintSystem& cs) {
    LpSolution s = solve_lp(system_lp(cs, {}));
    return s.status != LpStatus::infeasible;
}

}  // namespace curo
