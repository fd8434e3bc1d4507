// Copyright 2026 The jointgap Authors
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

#include "jointgap/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <system_error>
#include <vector>

#include "jointgap/errors.hpp"

namespace jointgap {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

std::string line_label(std::size_t line_number) {
    return "line " + std::to_string(line_number);
}

// Header is either t,q1..qN or t,q1..qN,qd1..qdN with exact labels.
struct HeaderInfo {
    std::size_t dof = 0;
    bool has_velocities = false;
};

HeaderInfo parse_trajectory_header(const std::string& line, const std::string& path) {
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.empty() || fields[0] != "t") {
        throw ValidationError(path + ": line 1: header must start with 't'");
    }
    const std::size_t columns = fields.size() - 1;
    if (columns == 0) {
        throw ValidationError(path + ": line 1: header has no joint columns");
    }

    auto matches = [&](std::size_t dof) {
        for (std::size_t i = 0; i < dof; ++i) {
            if (fields[1 + i] != "q" + std::to_string(i + 1)) {
                return false;
            }
        }
        for (std::size_t i = dof; i < columns; ++i) {
            if (fields[1 + i] != "qd" + std::to_string(i - dof + 1)) {
                return false;
            }
        }
        return true;
    };

    HeaderInfo info;
    if (columns % 2 == 0 && matches(columns / 2)) {
        info.dof = columns / 2;
        info.has_velocities = true;
        return info;
    }
    if (matches(columns)) {
        info.dof = columns;
        info.has_velocities = false;
        return info;
    }
    throw ValidationError(path + ": line 1: expected header t,q1,...,qN[,qd1,...,qdN]");
}

// qd reconstruction for position-only files: central differences inside,
// one-sided at the ends.
void fill_velocities_by_finite_difference(Trajectory& traj) {
    const std::size_t n = traj.size();
    const std::size_t dof = traj.dof;
    traj.qd.assign(n * dof, 0.0);
    if (n < 2) {
        return;
    }
    for (std::size_t d = 0; d < dof; ++d) {
        traj.qd[0 * dof + d] =
            (traj.q[1 * dof + d] - traj.q[0 * dof + d]) / (traj.t[1] - traj.t[0]);
        traj.qd[(n - 1) * dof + d] = (traj.q[(n - 1) * dof + d] - traj.q[(n - 2) * dof + d]) /
                                     (traj.t[n - 1] - traj.t[n - 2]);
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        for (std::size_t d = 0; d < dof; ++d) {
            traj.qd[k * dof + d] = (traj.q[(k + 1) * dof + d] - traj.q[(k - 1) * dof + d]) /
                                   (traj.t[k + 1] - traj.t[k - 1]);
        }
    }
}

}  // namespace

std::string format_full(double value) {
    char buffer[64];
    const auto result =
        std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
    return std::string(buffer, result.ptr);
}

std::string format_sig(double value, int significant_digits) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value,
                                      std::chars_format::general, significant_digits);
    return std::string(buffer, result.ptr);
}

double parse_double(const std::string& field, const std::string& where) {
    // Trim spaces so hand-edited files with padding still parse.
    std::string_view view(field);
    while (!view.empty() && (view.front() == ' ' || view.front() == '\t')) {
        view.remove_prefix(1);
    }
    while (!view.empty() && (view.back() == ' ' || view.back() == '\t' ||
                             view.back() == '\r')) {
        view.remove_suffix(1);
    }
    double value = 0.0;
    const auto result = std::from_chars(view.data(), view.data() + view.size(), value);
    if (result.ec != std::errc() || result.ptr != view.data() + view.size() ||
        view.empty()) {
        throw ValidationError(where + ": cannot parse number '" + std::string(view) + "'");
    }
    return value;
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open trajectory file '" + path + "'");
    }

    std::string line;
    if (!std::getline(in, line)) {
        throw ValidationError(path + ": empty file");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    const HeaderInfo header = parse_trajectory_header(line, path);

    Trajectory traj;
    traj.dof = header.dof;
    const std::size_t expected_fields =
        1 + header.dof + (header.has_velocities ? header.dof : 0);

    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const std::vector<std::string> fields = split_csv_line(line);
        const std::string where = path + ": " + line_label(line_number);
        if (fields.size() != expected_fields) {
            throw ValidationError(where + ": expected " + std::to_string(expected_fields) +
                                  " fields, got " + std::to_string(fields.size()));
        }
        const double time = parse_double(fields[0], where);
        if (!std::isfinite(time)) {
            throw ValidationError(where + ": non-finite timestamp");
        }
        if (!traj.t.empty() && !(time > traj.t.back())) {
            throw ValidationError(where + ": timestamp not strictly increasing");
        }
        traj.t.push_back(time);
        for (std::size_t i = 0; i < header.dof; ++i) {
            const double v = parse_double(fields[1 + i], where);
            if (!std::isfinite(v)) {
                throw ValidationError(where + ": non-finite value in column q" +
                                      std::to_string(i + 1));
            }
            traj.q.push_back(v);
        }
        if (header.has_velocities) {
            for (std::size_t i = 0; i < header.dof; ++i) {
                const double v = parse_double(fields[1 + header.dof + i], where);
                if (!std::isfinite(v)) {
                    throw ValidationError(where + ": non-finite value in column qd" +
                                          std::to_string(i + 1));
                }
                traj.qd.push_back(v);
            }
        }
    }

    if (traj.t.empty()) {
        throw ValidationError(path + ": no samples");
    }
    if (!header.has_velocities) {
        fill_velocities_by_finite_difference(traj);
    }
    return traj;
}

namespace {

void write_csv_or_throw(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write file '" + path + "'");
    }
    out << content;
    if (!out) {
        throw IoError("failed writing file '" + path + "'");
    }
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    validate_trajectory(traj);
    std::ostringstream os;
    os << "t";
    for (std::size_t i = 0; i < traj.dof; ++i) {
        os << ",q" << (i + 1);
    }
    for (std::size_t i = 0; i < traj.dof; ++i) {
        os << ",qd" << (i + 1);
    }
    os << "\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        os << format_full(traj.t[k]);
        for (std::size_t d = 0; d < traj.dof; ++d) {
            os << "," << format_full(traj.position(k, d));
        }
        for (std::size_t d = 0; d < traj.dof; ++d) {
            os << "," << format_full(traj.velocity(k, d));
        }
        os << "\n";
    }
    write_csv_or_throw(path, os.str());
}

void write_velocities_csv(const Trajectory& traj, const std::string& path) {
    validate_trajectory(traj);
    std::ostringstream os;
    os << "t";
    for (std::size_t i = 0; i < traj.dof; ++i) {
        os << ",qd" << (i + 1);
    }
    os << "\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        os << format_full(traj.t[k]);
        for (std::size_t d = 0; d < traj.dof; ++d) {
            os << "," << format_full(traj.velocity(k, d));
        }
        os << "\n";
    }
    write_csv_or_throw(path, os.str());
}

}  // namespace jointgap
