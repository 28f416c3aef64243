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

#include "curo/lp.hpp"
#include "curo/textio.hpp"

namespace curo {

/// Plain-text export of a linear program for external cross-checks. The
/// grammar is documented in docs/lp_format.md; numbers use the shortest
/// exact representation, so the file round-trips the doubles.
inline std::string lp_to_text(const LpProblem& p) {
    std::string out = "curo-lp 1\n";
    out += p.sense == LpSense::minimize ? "minimize\n" : "maximize\n";
    out += "vars " + std::to_string(p.num_vars()) + "\n";
    out += "obj";
    for (double c : p.objective) out += " " + to_shortest(c);
    out += "\nbounds\n";
    for (int j = 0; j < p.num_vars(); ++j)
        out += to_shortest(p.lower[j]) + " " + to_shortest(p.upper[j]) + "\n";
    out += "rows " + std::to_string(p.num_rows()) + "\n";
    for (int i = 0; i < p.num_rows(); ++i) {
        out += p.row_rel[i] == RowSense::le ? "le" : p.row_rel[i] == RowSense::ge ? "ge" : "eq";
        out += " " + to_shortest(p.row_rhs[i]);
        for (double a : p.row_coeffs[i]) out += " " + to_shortest(a);
        out += "\n";
    }
    out += "end\n";
    return out;
}

}  // namespace curo
