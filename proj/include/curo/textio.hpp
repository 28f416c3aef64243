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

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

// Locale-independent number formatting (std::to_chars) so that CSV and text
// exports are byte-identical across runs and environments.

namespace curo {

/// Shortest representation that round-trips the double exactly.
inline std::string to_shortest(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Nine significant digits, general format; experiment CSV output.
inline std::string to_sig9(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

class CsvBuilder {
public:
    explicit CsvBuilder(std::vector<std::string> header) {
        for (size_t i = 0; i < header.size(); ++i) {
            if (i) text_ += ',';
            text_ += header[i];
        }
        text_ += '\n';
        columns_ = header.size();
    }

    CsvBuilder& cell(const std::string& s) {
        if (cells_in_row_) text_ += ',';
        text_ += s;
        ++cells_in_row_;
        return *this;
    }
    CsvBuilder& cell(double v) { return cell(to_sig9(v)); }
    CsvBuilder& cell(int v) { return cell(std::to_string(v)); }
    CsvBuilder& cell(int64_t v) { return cell(std::to_string(v)); }

    void end_row() {
        text_ += '\n';
        cells_in_row_ = 0;
    }

    const std::string& text() const { return text_; }
    size_t columns() const { return columns_; }

private:
    std::string text_;
    size_t columns_ = 0;
    size_t cells_in_row_ = 0;
};

}  // namespace curo
