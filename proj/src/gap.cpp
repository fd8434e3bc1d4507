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

#include "jointgap/gap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "jointgap/csv.hpp"
#include "jointgap/errors.hpp"
#include "jointgap/kernels.hpp"

namespace jointgap {

namespace {

using nlohmann::json;

// Absolute slack for timestamp comparisons; samples are never closer than
// microseconds in practice.
constexpr double kTimeSlack = 1e-9;

void validate_experiment(const RobotModel& model, const StepExperiment& experiment) {
    if (experiment.targets.size() != model.dof()) {
        throw ValidationError("experiment target dimension does not match model DOF");
    }
    if (!(experiment.dt > 0.0) || !std::isfinite(experiment.dt)) {
        throw ValidationError("experiment dt must be a positive finite number");
    }
    if (!(experiment.duration >= experiment.dt) || !std::isfinite(experiment.duration)) {
        throw ValidationError("experiment duration must be >= dt");
    }
    for (std::size_t i = 0; i < model.dof(); ++i) {
        const JointSpec& j = model.joints[i];
        const double target = experiment.targets[i];
        if (!std::isfinite(target)) {
            throw ValidationError("non-finite target on joint " + std::to_string(i + 1));
        }
        if (target < j.q_min || target > j.q_max) {
            throw ValidationError("target outside joint limits on joint " +
                                  std::to_string(i + 1));
        }
    }
    if (experiment.initial.has_value()) {
        if (experiment.initial->q.size() != model.dof() ||
            experiment.initial->qd.size() != model.dof()) {
            throw ValidationError("experiment initial state dimension mismatch");
        }
    }
}

std::size_t step_count(double duration, double dt) {
    // ceil with a relative guard so 10 s at 1/60 s gives exactly 600 steps.
    return static_cast<std::size_t>(std::ceil(duration / dt * (1.0 - 1e-12)));
}

// No-throw settle detection used inside accumulated_error, where a window
// longer than the overlap counts as "not settled" instead of an error.
SteadyState detect_steady_state_or_unsettled(const Trajectory& traj,
                                             std::span<const double> reference, double eps,
                                             double window) {
    const std::size_t n = traj.size();
    if (n == 0 || window > traj.t.back() - traj.t.front() + kTimeSlack) {
        return {false, 0.0};
    }

    std::vector<char> in_band(n, 1);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t d = 0; d < traj.dof; ++d) {
            if (std::fabs(traj.position(k, d) - reference[d]) > eps) {
                in_band[k] = 0;
                break;
            }
        }
    }

    // next_out[k]: first sample >= k outside the band (n if none).
    std::vector<std::size_t> next_out(n + 1, n);
    for (std::size_t k = n; k-- > 0;) {
        next_out[k] = in_band[k] ? next_out[k + 1] : k;
    }

    for (std::size_t k = 0; k < n; ++k) {
        const double window_end = traj.t[k] + window;
        if (window_end > traj.t.back() + kTimeSlack) {
            break;  // later starts only make the window stick out further
        }
        const auto it = std::upper_bound(traj.t.begin(), traj.t.end(),
                                         window_end + kTimeSlack);
        const std::size_t last = static_cast<std::size_t>(it - traj.t.begin()) - 1;
        if (next_out[k] > last) {
            return {true, traj.t[k]};
        }
    }
    return {false, 0.0};
}

json dof_violation_to_json(const DofViolation& v) {
    json entry;
    entry["count"] = v.count;
    entry["max_abs_qd"] = v.max_abs_qd;
    entry["qd_max"] = v.qd_max;
    return entry;
}

}  // namespace

Trajectory run_step_response(const RobotModel& model, ControllerVariant variant,
                             const StepExperiment& experiment,
                             const std::optional<PidGains>& gains) {
    validate_experiment(model, experiment);

    JointState state = experiment.initial.value_or(home_state(model));
    std::optional<PidGains> effective = gains;
    if (variant == ControllerVariant::RosPid && !effective.has_value()) {
        effective = default_pid_gains(model);
    }
    ControllerState controller = make_controller(variant, model, effective);

    const std::size_t steps = step_count(experiment.duration, experiment.dt);
    Trajectory traj;
    traj.dof = model.dof();
    traj.append(0.0, state);
    for (std::size_t k = 1; k <= steps; ++k) {
        ControlResult control =
            controller_step(variant, controller, experiment.targets, state, model,
                            experiment.dt);
        controller = std::move(control.state);
        state = step_dynamics(state, control.effort, model, experiment.dt);
        traj.append(static_cast<double>(k) * experiment.dt, state);
    }
    return traj;
}

SteadyState detect_steady_state(const Trajectory& traj, std::span<const double> reference,
                                double eps, double window) {
    if (traj.size() == 0) {
        throw ValidationError("empty trajectory");
    }
    if (reference.size() != traj.dof) {
        throw ValidationError("settle reference dimension does not match trajectory DOF");
    }
    if (!(eps > 0.0) || !(window > 0.0)) {
        throw ValidationError("settle eps and window must be > 0");
    }
    if (window > traj.t.back() - traj.t.front() + kTimeSlack) {
        throw ValidationError("settle window longer than trajectory span");
    }
    return detect_steady_state_or_unsettled(traj, reference, eps, window);
}

Trajectory interpolate_onto(const Trajectory& traj, std::span<const double> grid_t) {
    const std::size_t n = traj.size();
    if (n < 2) {
        throw ValidationError("interpolation needs at least 2 samples");
    }

    std::vector<std::uint64_t> segment(grid_t.size());
    std::vector<double> weight(grid_t.size());
    for (std::size_t k = 0; k < grid_t.size(); ++k) {
        double g = grid_t[k];
        if (g < traj.t.front() - kTimeSlack || g > traj.t.back() + kTimeSlack) {
            throw ValidationError("interpolation time outside trajectory span");
        }
        g = std::clamp(g, traj.t.front(), traj.t.back());
        auto it = std::upper_bound(traj.t.begin(), traj.t.end(), g);
        std::size_t seg = static_cast<std::size_t>(it - traj.t.begin());
        seg = seg == 0 ? 0 : seg - 1;
        seg = std::min(seg, n - 2);
        segment[k] = seg;
        weight[k] = (g - traj.t[seg]) / (traj.t[seg + 1] - traj.t[seg]);
    }

    Trajectory out;
    out.dof = traj.dof;
    out.t.assign(grid_t.begin(), grid_t.end());
    out.q.resize(grid_t.size() * traj.dof);
    out.qd.resize(grid_t.size() * traj.dof);

    std::vector<double> out_column(grid_t.size());
    for (std::size_t d = 0; d < traj.dof; ++d) {
        const std::vector<double> q_column = traj.position_column(d);
        kernels::lerp_gather(q_column.data(), segment.data(), weight.data(),
                             out_column.data(), grid_t.size());
        for (std::size_t k = 0; k < grid_t.size(); ++k) {
            out.q[k * traj.dof + d] = out_column[k];
        }
        const std::vector<double> qd_column = traj.velocity_column(d);
        kernels::lerp_gather(qd_column.data(), segment.data(), weight.data(),
                             out_column.data(), grid_t.size());
        for (std::size_t k = 0; k < grid_t.size(); ++k) {
            out.qd[k * traj.dof + d] = out_column[k];
        }
    }
    return out;
}

Trajectory resample(const Trajectory& traj, double rate_hz) {
    if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) {
        throw ValidationError("resample rate must be a positive finite number");
    }
    if (traj.size() < 2) {
        throw ValidationError("resample needs at least 2 samples");
    }
    const double step = 1.0 / rate_hz;
    const double span = traj.t.back() - traj.t.front();
    const std::size_t count =
        static_cast<std::size_t>(std::floor(span * rate_hz + kTimeSlack)) + 1;
    std::vector<double> grid(count);
    for (std::size_t k = 0; k < count; ++k) {
        grid[k] = traj.t.front() + static_cast<double>(k) * step;
    }
    return interpolate_onto(traj, grid);
}

GapReport accumulated_error(const Trajectory& reference, const Trajectory& test,
                            const SettleParams& settle) {
    if (reference.dof != test.dof) {
        throw ValidationError("trajectories have different DOF counts");
    }
    if (settle.reference.size() != reference.dof) {
        throw ValidationError("settle reference dimension does not match DOF count");
    }
    if (reference.size() < 2 || test.size() < 2) {
        throw ValidationError("accumulated_error needs at least 2 samples per trajectory");
    }

    const double t_start = std::max(reference.t.front(), test.t.front());
    const double t_end = std::min(reference.t.back(), test.t.back());
    if (t_end < t_start) {
        throw ValidationError("trajectories have no time overlap");
    }

    const double step = 1.0 / kComparisonRateHz;
    const std::size_t count = static_cast<std::size_t>(
                                  std::floor((t_end - t_start) * kComparisonRateHz +
                                             kTimeSlack)) +
                              1;
    std::vector<double> grid(count);
    for (std::size_t k = 0; k < count; ++k) {
        grid[k] = t_start + static_cast<double>(k) * step;
    }

    const Trajectory ref_grid = interpolate_onto(reference, grid);
    const Trajectory test_grid = interpolate_onto(test, grid);

    GapReport report;
    report.curve_t = grid;
    report.per_dof.resize(reference.dof);
    report.error_curves.resize(reference.dof);

    std::vector<double> diff(count);
    for (std::size_t d = 0; d < reference.dof; ++d) {
        const std::vector<double> a = ref_grid.position_column(d);
        const std::vector<double> b = test_grid.position_column(d);
        kernels::abs_diff(a.data(), b.data(), diff.data(), count);

        std::vector<double>& curve = report.error_curves[d];
        curve.resize(count);
        double running = 0.0;
        for (std::size_t k = 0; k < count; ++k) {
            running += diff[k];
            curve[k] = running;
        }
        report.per_dof[d] = curve.back();
    }

    report.total = 0.0;
    for (double v : report.per_dof) {
        report.total += v;
    }

    const SteadyState ref_settle =
        detect_steady_state_or_unsettled(ref_grid, settle.reference, settle.eps,
                                         settle.window);
    const SteadyState test_settle =
        detect_steady_state_or_unsettled(test_grid, settle.reference, settle.eps,
                                         settle.window);
    report.settled = ref_settle.settled && test_settle.settled;
    if (report.settled) {
        // Both systems must have settled; the later time governs.
        report.steady_state_time = std::max(ref_settle.time, test_settle.time);
    } else {
        report.steady_state_time = grid.back();
    }
    return report;
}

ViolationReport velocity_violations(const Trajectory& traj, const RobotModel& model) {
    if (traj.dof != model.dof()) {
        throw ValidationError("trajectory DOF does not match model DOF");
    }
    ViolationReport report;
    report.per_dof.resize(model.dof());
    for (std::size_t d = 0; d < model.dof(); ++d) {
        const std::vector<double> column = traj.velocity_column(d);
        DofViolation& v = report.per_dof[d];
        v.qd_max = model.joints[d].qd_max;
        v.count = kernels::count_above(column.data(), column.size(), v.qd_max);
        v.max_abs_qd = kernels::max_abs(column.data(), column.size());
        if (v.count > 0) {
            report.any_violation = true;
        }
    }
    return report;
}

std::string render_gap_table(const GapReport& report, std::string_view label) {
    const std::size_t dof = report.per_dof.size();
    std::vector<std::string> headers;
    std::vector<std::string> values;
    headers.reserve(dof + 1);
    values.reserve(dof + 1);
    for (std::size_t d = 0; d < dof; ++d) {
        headers.push_back("DOF " + std::to_string(d + 1));
        values.push_back(format_sig(report.per_dof[d], 7));
    }
    headers.push_back("Σ");
    values.push_back(format_sig(report.total, 7));

    const std::size_t label_width = std::max<std::size_t>(label.size(), 9);
    std::ostringstream os;
    os << std::string(label_width, ' ');
    std::vector<std::size_t> widths(headers.size());
    for (std::size_t c = 0; c < headers.size(); ++c) {
        // The Σ header is multi-byte UTF-8 but one display column wide.
        const std::size_t header_display = c == dof ? 1 : headers[c].size();
        widths[c] = std::max(header_display, values[c].size()) + 2;
        os << std::string(widths[c] - header_display, ' ') << headers[c];
    }
    os << "\n" << label << std::string(label_width - label.size(), ' ');
    for (std::size_t c = 0; c < headers.size(); ++c) {
        os << std::string(widths[c] - values[c].size(), ' ') << values[c];
    }
    os << "\n";
    return os.str();
}

std::string gap_report_to_json(const GapReport& report) {
    json doc;
    doc["per_dof"] = report.per_dof;
    doc["total"] = report.total;
    doc["steady_state_time"] = report.steady_state_time;
    doc["settled"] = report.settled;
    return doc.dump(2) + "\n";
}

GapReport gap_report_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("gap report is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ValidationError("gap report must be a JSON object");
    }
    static const std::set<std::string> kKeys = {"per_dof", "total", "steady_state_time",
                                                "settled"};
    for (const auto& item : doc.items()) {
        if (kKeys.find(item.key()) == kKeys.end()) {
            throw ValidationError("unknown field '" + item.key() + "' in gap report");
        }
    }
    GapReport report;
    if (!doc.contains("per_dof") || !doc.at("per_dof").is_array()) {
        throw ValidationError("gap report needs a 'per_dof' array");
    }
    for (const json& v : doc.at("per_dof")) {
        if (!v.is_number()) {
            throw ValidationError("per_dof entries must be numbers");
        }
        const double d = v.get<double>();
        if (!std::isfinite(d) || d < 0.0) {
            throw ValidationError("per_dof entries must be finite and >= 0");
        }
        report.per_dof.push_back(d);
    }
    if (!doc.contains("total") || !doc.at("total").is_number()) {
        throw ValidationError("gap report needs a numeric 'total'");
    }
    report.total = doc.at("total").get<double>();
    if (!std::isfinite(report.total)) {
        throw ValidationError("gap report total must be finite");
    }
    if (!doc.contains("steady_state_time") || !doc.at("steady_state_time").is_number()) {
        throw ValidationError("gap report needs a numeric 'steady_state_time'");
    }
    report.steady_state_time = doc.at("steady_state_time").get<double>();
    if (!doc.contains("settled") || !doc.at("settled").is_boolean()) {
        throw ValidationError("gap report needs a boolean 'settled'");
    }
    report.settled = doc.at("settled").get<bool>();
    return report;
}

GapReport read_gap_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open gap report '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return gap_report_from_json(buffer.str());
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

void write_gap_report(const GapReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write gap report '" + path + "'");
    }
    out << gap_report_to_json(report);
    if (!out) {
        throw IoError("failed writing gap report '" + path + "'");
    }
}

std::string violation_report_to_json(const ViolationReport& report) {
    json doc;
    doc["any_violation"] = report.any_violation;
    json per_dof = json::array();
    for (const DofViolation& v : report.per_dof) {
        per_dof.push_back(dof_violation_to_json(v));
    }
    doc["per_dof"] = std::move(per_dof);
    return doc.dump(2) + "\n";
}

void write_violation_report(const ViolationReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write violation report '" + path + "'");
    }
    out << violation_report_to_json(report);
    if (!out) {
        throw IoError("failed writing violation report '" + path + "'");
    }
}

void write_error_curves_csv(const GapReport& report, const std::string& path) {
    std::ostringstream os;
    os << "t";
    for (std::size_t d = 0; d < report.per_dof.size(); ++d) {
        os << ",e" << (d + 1);
    }
    os << "\n";
    for (std::size_t k = 0; k < report.curve_t.size(); ++k) {
        os << format_full(report.curve_t[k]);
        for (const std::vector<double>& curve : report.error_curves) {
            os << "," << format_full(curve[k]);
        }
        os << "\n";
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write error curves '" + path + "'");
    }
    out << os.str();
    if (!out) {
        throw IoError("failed writing error curves '" + path + "'");
    }
}

}  // namespace jointgap
