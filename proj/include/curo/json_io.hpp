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

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "curo/cu_sets.hpp"
#include "curo/errors.hpp"
#include "curo/knapsack.hpp"
#include "curo/matrix.hpp"
#include "curo/portfolio.hpp"
#include "curo/ro.hpp"

// JSON instance and config formats. Field names are fixed by
// schemas/instance.schema.json; matrices are nested row-major arrays.
// Serialization is canonical (two-space indent, keys sorted, shortest float
// repr, trailing newline), so parse -> serialize is byte-stable.

namespace curo {

using Json = nlohmann::json;

inline std::string canonical_json(const Json& j) { return j.dump(2) + "\n"; }

namespace jsondetail {

inline const Json& field(const Json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) throw BadInput(std::string("missing field: ") + name);
    return *it;
}

inline Vec to_vec(const Json& j) {
    if (!j.is_array()) throw BadInput("expected an array of numbers");
    Vec v;
    for (const auto& e : j) v.push_back(e.get<double>());
    return v;
}

inline Matrix to_matrix(const Json& j) {
    if (!j.is_array() || j.empty()) throw BadInput("expected a nested array matrix");
    int rows = static_cast<int>(j.size());
    int cols = static_cast<int>(j[0].size());
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(j[i].size()) != cols) throw BadInput("ragged matrix rows");
        for (int c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    }
    return m;
}

inline Json from_vec(const Vec& v) {
    Json j = Json::array();
    for (double x : v) j.push_back(x);
    return j;
}

inline Json from_matrix(const Matrix& m) {
    Json j = Json::array();
    for (int i = 0; i < m.rows(); ++i) j.push_back(from_vec(m.row(i)));
    return j;
}

template <typename T, typename F>
std::vector<T> to_list(const Json& j, F&& convert) {
    std::vector<T> out;
    for (const auto& e : j) out.push_back(convert(e));
    return out;
}

}  // namespace jsondetail

inline std::string instance_kind(const Json& j) {
    return jsondetail::field(j, "kind").get<std::string>();
}

inline EllipsoidalCuProcess parse_ellipsoidal_center(const Json& j) {
    using namespace jsondetail;
    EllipsoidalCuProcess p;
    p.periods = field(j, "periods").get<int>();
    p.dim = field(j, "dim").get<int>();
    p.mu1 = to_vec(field(j, "mu1"));
    p.radii = to_vec(field(j, "radii"));
    p.chol = to_list<Matrix>(field(j, "cholesky"), to_matrix);
    p.center_a = to_list<Matrix>(field(j, "center_a"), to_matrix);
    p.center_f = to_list<Matrix>(field(j, "center_f"), to_matrix);
    p.center_c = to_list<Vec>(field(j, "center_c"), to_vec);
    p.validate();
    return p;
}

inline Json to_json(const EllipsoidalCuProcess& p) {
    using namespace jsondetail;
    Json chol = Json::array(), ca = Json::array(), cf = Json::array(), cc = Json::array();
    for (const auto& l : p.chol) chol.push_back(from_matrix(l));
    for (const auto& a : p.center_a) ca.push_back(from_matrix(a));
    for (const auto& f : p.center_f) cf.push_back(from_matrix(f));
    for (const auto& c : p.center_c) cc.push_back(from_vec(c));
    return Json{{"schema_version", 1}, {"kind", "ellipsoidal_center"},
                {"periods", p.periods}, {"dim", p.dim},
                {"mu1", from_vec(p.mu1)}, {"radii", from_vec(p.radii)},
                {"cholesky", chol},      {"center_a", ca},
                {"center_f", cf},        {"center_c", cc}};
}

inline MatrixCuProcess parse_ellipsoidal_matrix(const Json& j) {
    using namespace jsondetail;
    MatrixCuProcess p;
    p.periods = field(j, "periods").get<int>();
    p.dim = field(j, "dim").get<int>();
    p.means = to_list<Vec>(field(j, "means"), to_vec);
    p.radii = to_vec(field(j, "radii"));
    p.sigma1 = to_matrix(field(j, "sigma1"));
    p.a = to_vec(field(j, "update_a"));
    p.f = to_vec(field(j, "update_f"));
    p.c_mats = to_list<Matrix>(field(j, "update_c"), to_matrix);
    p.validate();
    return p;
}

inline Json to_json(const MatrixCuProcess& p) {
    using namespace jsondetail;
    Json means = Json::array(), cmats = Json::array();
    for (const auto& m : p.means) means.push_back(from_vec(m));
    for (const auto& c : p.c_mats) cmats.push_back(from_matrix(c));
    return Json{{"schema_version", 1}, {"kind", "ellipsoidal_matrix"},
                {"periods", p.periods}, {"dim", p.dim},
                {"means", means},       {"radii", from_vec(p.radii)},
                {"sigma1", from_matrix(p.sigma1)},
                {"update_a", from_vec(p.a)},
                {"update_f", from_vec(p.f)},
                {"update_c", cmats}};
}

inline PolyhedralCuProcess parse_polyhedral_rhs(const Json& j) {
    using namespace jsondetail;
    PolyhedralCuProcess p;
    p.periods = field(j, "periods").get<int>();
    p.dim = field(j, "dim").get<int>();
    p.g_mat = to_list<Matrix>(field(j, "g_mat"), to_matrix);
    p.g_vec = to_list<Vec>(field(j, "g_vec"), to_vec);
    p.delta = to_list<Matrix>(field(j, "delta"), to_matrix);
    p.validate();
    return p;
}

inline Json to_json(const PolyhedralCuProcess& p) {
    using namespace jsondetail;
    Json gm = Json::array(), gv = Json::array(), dl = Json::array();
    for (const auto& g : p.g_mat) gm.push_back(from_matrix(g));
    for (const auto& g : p.g_vec) gv.push_back(from_vec(g));
    for (const auto& d : p.delta) dl.push_back(from_matrix(d));
    return Json{{"schema_version", 1}, {"kind", "polyhedral_rhs"},
                {"periods", p.periods}, {"dim", p.dim},
                {"g_mat", gm},          {"g_vec", gv},
                {"delta", dl}};
}

inline MomentAmbiguityProcess parse_moment(const Json& j) {
    using namespace jsondetail;
    MomentAmbiguityProcess p;
    p.periods = field(j, "periods").get<int>();
    p.dim = field(j, "dim").get<int>();
    for (const auto& stage : field(j, "support"))
        p.support.push_back(to_list<Vec>(stage, to_vec));
    p.mu1 = to_vec(field(j, "mu1"));
    p.mean_a = to_list<Matrix>(field(j, "mean_a"), to_matrix);
    p.mean_b = to_list<Vec>(field(j, "mean_b"), to_vec);
    p.delta = to_list<Vec>(field(j, "delta"), to_vec);
    p.anchor = to_list<Vec>(field(j, "anchor"), to_vec);
    p.sigma_cap = to_list<Matrix>(field(j, "sigma_cap"), to_matrix);
    p.validate();
    return p;
}

inline Json to_json(const MomentAmbiguityProcess& p) {
    using namespace jsondetail;
    Json support = Json::array();
    for (const auto& stage : p.support) {
        Json pts = Json::array();
        for (const auto& pt : stage) pts.push_back(from_vec(pt));
        support.push_back(std::move(pts));
    }
    Json ma = Json::array(), mb = Json::array(), dl = Json::array(), an = Json::array(),
         sc = Json::array();
    for (const auto& a : p.mean_a) ma.push_back(from_matrix(a));
    for (const auto& b : p.mean_b) mb.push_back(from_vec(b));
    for (const auto& d : p.delta) dl.push_back(from_vec(d));
    for (const auto& a : p.anchor) an.push_back(from_vec(a));
    for (const auto& s : p.sigma_cap) sc.push_back(from_matrix(s));
    return Json{{"schema_version", 1}, {"kind", "moment"},
                {"periods", p.periods}, {"dim", p.dim},
                {"support", support},   {"mu1", from_vec(p.mu1)},
                {"mean_a", ma},         {"mean_b", mb},
                {"delta", dl},          {"anchor", an},
                {"sigma_cap", sc}};
}

inline AroPolyhedralInstance parse_aro_polyhedral(const Json& j) {
    using namespace jsondetail;
    AroPolyhedralInstance inst;
    inst.a21 = to_matrix(field(j, "a21"));
    inst.a22 = to_matrix(field(j, "a22"));
    inst.b2 = to_matrix(field(j, "b2"));
    inst.g1_mat = to_matrix(field(j, "g1_mat"));
    inst.g1_vec = to_vec(field(j, "g1_vec"));
    inst.g2_mat = to_matrix(field(j, "g2_mat"));
    inst.g2_vec = to_vec(field(j, "g2_vec"));
    inst.delta1 = to_matrix(field(j, "delta1"));
    inst.x2_rule = to_matrix(field(j, "x2_rule"));
    inst.x1 = to_vec(field(j, "x1"));
    return inst;
}

inline AroEllipsoidalInstance parse_aro_ellipsoidal(const Json& j) {
    using namespace jsondetail;
    AroEllipsoidalInstance inst;
    inst.a21 = to_matrix(field(j, "a21"));
    inst.a22 = to_matrix(field(j, "a22"));
    inst.b2 = to_matrix(field(j, "b2"));
    inst.x2_rule = to_matrix(field(j, "x2_rule"));
    inst.x1 = to_vec(field(j, "x1"));
    inst.mu1 = to_vec(field(j, "mu1"));
    inst.l1 = to_matrix(field(j, "l1"));
    inst.l2 = to_matrix(field(j, "l2"));
    inst.r1 = field(j, "r1").get<double>();
    inst.r2 = field(j, "r2").get<double>();
    inst.a2 = to_matrix(field(j, "a2"));
    inst.f2 = to_matrix(field(j, "f2"));
    inst.c2 = to_vec(field(j, "c2"));
    return inst;
}

/// Optional per-period decision vectors attached to an instance file.
inline std::vector<Vec> parse_decisions(const Json& j) {
    using namespace jsondetail;
    return to_list<Vec>(field(j, "x"), to_vec);
}

inline KnapsackUncertaintyModel parse_knapsack_model(const Json& j) {
    using namespace jsondetail;
    KnapsackUncertaintyModel model;
    model.mu1 = to_vec(field(j, "mu1"));
    model.phi = to_matrix(field(j, "phi"));
    model.psi = to_matrix(field(j, "psi"));
    model.chol = to_matrix(field(j, "cholesky"));
    model.r1 = field(j, "r1").get<double>();
    model.r2 = field(j, "r2").get<double>();
    model.validate();
    return model;
}

inline KnapsackInstance parse_knapsack_instance(const Json& j) {
    using namespace jsondetail;
    KnapsackInstance inst;
    inst.c1 = to_vec(field(j, "c1"));
    inst.c2 = to_vec(field(j, "c2"));
    inst.budget = field(j, "budget").get<double>();
    std::string mode = field(j, "mode").get<std::string>();
    if (mode == "cu")
        inst.mode = KnapsackInstance::Mode::cu;
    else if (mode == "nc")
        inst.mode = KnapsackInstance::Mode::nc;
    else
        throw BadInput("knapsack instance: mode must be cu or nc");
    inst.model = parse_knapsack_model(j);
    return inst;
}

inline KnapsackExperimentConfig parse_knapsack_config(const Json& j) {
    using namespace jsondetail;
    KnapsackExperimentConfig cfg;
    cfg.items1 = field(j, "items1").get<int>();
    cfg.items2 = field(j, "items2").get<int>();
    cfg.budget = field(j, "budget").get<double>();
    cfg.replications = field(j, "replications").get<int>();
    cfg.estimation_samples = field(j, "estimation_samples").get<int>();
    cfg.evaluation_samples = field(j, "evaluation_samples").get<int>();
    cfg.r_grid = to_vec(field(j, "r_grid"));
    cfg.lambda_grid = to_vec(field(j, "lambda_grid"));
    if (j.contains("lambda_for_r_sweep"))
        cfg.lambda_for_r_sweep = j["lambda_for_r_sweep"].get<double>();
    if (j.contains("r_for_lambda_sweep"))
        cfg.r_for_lambda_sweep = j["r_for_lambda_sweep"].get<double>();
    if (j.contains("noise_scale")) cfg.noise_scale = j["noise_scale"].get<double>();
    if (j.contains("base_seed")) cfg.base_seed = j["base_seed"].get<uint64_t>();
    cfg.validate();
    return cfg;
}

inline PortfolioConfig parse_portfolio_config(const Json& j) {
    using namespace jsondetail;
    PortfolioConfig cfg;
    if (j.contains("mu1")) cfg.mu1 = to_vec(j["mu1"]);
    if (j.contains("delta")) cfg.delta = to_vec(j["delta"]);
    if (j.contains("variance")) cfg.variance = j["variance"].get<double>();
    if (j.contains("utility_pieces")) {
        cfg.utility_pieces.clear();
        for (const auto& piece : j["utility_pieces"]) {
            if (!piece.is_array() || piece.size() != 2)
                throw BadInput("portfolio config: utility pieces are [slope, intercept]");
            cfg.utility_pieces.emplace_back(piece[0].get<double>(), piece[1].get<double>());
        }
    }
    if (j.contains("allocation_steps")) cfg.allocation_steps = j["allocation_steps"].get<int>();
    if (j.contains("support_points_per_axis"))
        cfg.support_points_per_axis = j["support_points_per_axis"].get<int>();
    if (j.contains("wealth_samples")) cfg.wealth_samples = j["wealth_samples"].get<int>();
    if (j.contains("initial_wealth")) cfg.initial_wealth = j["initial_wealth"].get<double>();
    if (j.contains("omega_grid")) cfg.omega_grid = to_vec(j["omega_grid"]);
    if (j.contains("rho_grid")) cfg.rho_grid = to_vec(j["rho_grid"]);
    if (j.contains("base_seed")) cfg.base_seed = j["base_seed"].get<uint64_t>();
    if (j.contains("net_wealth_formula"))
        cfg.net_wealth_formula = j["net_wealth_formula"].get<bool>();
    cfg.validate();
    return cfg;
}

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadInput("cannot open " + path);
    Json j;
    try {
        in >> j;
    } catch (const Json::parse_error& e) {
        throw BadInput("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw BadInput("cannot open " + path + " for writing");
    out << text;
}

}  // namespace curo
