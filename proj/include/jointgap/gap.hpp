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

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jointgap/control.hpp"
#include "jointgap/dynamics.hpp"
#include "jointgap/model.hpp"

namespace jointgap {

/// Trajectories from different sources are compared on a common uniform
/// grid at this rate. Per-sample error sums are rate-dependent, so the
/// rate is fixed rather than inherited from the inputs.
inline constexpr double kComparisonRateHz = 60.0;

inline constexpr double kDefaultSettleEps = 1e-3;    // rad
inline constexpr double kDefaultSettleWindow = 0.5;  // s

/// A single simultaneous step on every joint at t = 0, held for `duration`.
struct StepExperiment {
    std::vector<double> targets;  // rad, within joint limits
    double duration = 10.0;       // s, >= dt
    double dt = 1.0 / 60.0;       // s, > 0
    std::optional<JointState> initial;  // default: home, zero velocity
};

struct SettleParams {
    std::vector<double> reference;  // rad, per joint
    double eps = kDefaultSettleEps;
    double window = kDefaultSettleWindow;
};

struct SteadyState {
    bool settled = false;
    double time = 0.0;  // meaningful only when settled
};

/// Per-DOF accumulated |Δq| between two trajectories on the 60 Hz grid.
/// per_dof[i] is the final value of error_curves[i]; total = Σ per_dof.
/// steady_state_time is the later of the two trajectories' settle times
/// (settled == false when either never settles; per_dof then still carries
/// the full-horizon sum, flagged by the bool).
struct GapReport {
    std::vector<double> per_dof;  // rad
    double total = 0.0;           // rad
    double steady_state_time = 0.0;
    bool settled = false;
    std::vector<double> curve_t;
    std::vector<std::vector<double>> error_curves;  // per DOF, running sums
};

struct DofViolation {
    std::size_t count = 0;    // samples with |qd| > qd_max
    double max_abs_qd = 0.0;  // rad/s
    double qd_max = 0.0;      // rad/s, the limit itself
};

struct ViolationReport {
    std::vector<DofViolation> per_dof;
    bool any_violation = false;
};

/// Closed-loop response to the step experiment: ⌈duration/dt⌉ controller
/// ticks plus the t = 0 sample, target held constant throughout.
Trajectory run_step_response(const RobotModel& model, ControllerVariant variant,
                             const StepExperiment& experiment,
                             const std::optional<PidGains>& gains = std::nullopt);

/// Earliest t* with every DOF of every sample in [t*, t* + window] inside
/// the eps band around `reference`. Throws ValidationError when the window
/// is longer than the trajectory span.
SteadyState detect_steady_state(const Trajectory& traj, std::span<const double> reference,
                                double eps, double window);

GapReport accumulated_error(const Trajectory& reference, const Trajectory& test,
                            const SettleParams& settle);

ViolationReport velocity_violations(const Trajectory& traj, const RobotModel& model);

/// Linear interpolation of q and qd onto a uniform grid spanning the
/// trajectory's own [t0, t_end]. Needs >= 2 samples. Idempotent on
/// trajectories already on the grid.
Trajectory resample(const Trajectory& traj, double rate_hz);

/// Interpolation onto caller-supplied times (each must lie within the
/// trajectory's span). Building block for resample/accumulated_error.
Trajectory interpolate_onto(const Trajectory& traj, std::span<const double> grid_t);

/// Text table in the per-DOF accumulated-error layout: DOF 1..N columns
/// plus a Σ column, cells printed to 7 significant digits.
std::string render_gap_table(const GapReport& report, std::string_view label);

/// Serialization of the report's summary fields:
/// { "per_dof": [...], "total": x, "steady_state_time": t, "settled": b }.
/// Parsing validates finiteness and per_dof >= 0 but keeps the stored
/// total verbatim (externally produced tables may carry a Σ computed from
/// unrounded data).
std::string gap_report_to_json(const GapReport& report);
GapReport gap_report_from_json(const std::string& text);
GapReport read_gap_report(const std::string& path);
void write_gap_report(const GapReport& report, const std::string& path);

std::string violation_report_to_json(const ViolationReport& report);
void write_violation_report(const ViolationReport& report, const std::string& path);

/// error_curves.csv: header t,e1,...,eN then the running sums per DOF.
void write_error_curves_csv(const GapReport& report, const std::string& path);

}  // namespace jointgap
