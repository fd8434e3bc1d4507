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
#include <vector>

#include "jointgap/dynamics.hpp"
#include "jointgap/model.hpp"

namespace jointgap {

/// The three controller architectures under comparison. They share the
/// reference-clamping and effort-saturation stages; they differ in the
/// effort law (PD vs PID) and in whether joint velocity limits are
/// enforced (SimPd deliberately skips that stage).
enum class ControllerVariant { GymPd, SimPd, RosPid };

const char* variant_name(ControllerVariant variant);
ControllerVariant variant_from_name(const std::string& name);

/// Per-joint PID gains. GymPd/SimPd read k_p = stiffness and k_d = damping
/// from the model with k_i = 0; RosPid takes explicit gains.
struct PidGains {
    std::vector<double> k_p;
    std::vector<double> k_i;
    std::vector<double> k_d;
};

/// k_p = stiffness, k_d = damping, k_i = 0 — the RosPid gains that make it
/// degenerate to the engine PD.
PidGains default_pid_gains(const RobotModel& model);

/// Mutable controller state, consumed and returned by value each step.
struct ControllerState {
    std::vector<double> integral;     // rad·s, RosPid only, zero otherwise
    std::vector<double> last_target;  // rad, last clamped position reference
    PidGains gains;                   // used by RosPid; empty for PD variants
};

/// Zeroed integral, last_target = home. Gains are required iff
/// variant == RosPid (callers wanting the engine-PD defaults pass
/// default_pid_gains explicitly).
ControllerState make_controller(ControllerVariant variant, const RobotModel& model,
                                const std::optional<PidGains>& gains = std::nullopt);

/// Raw PD law: k_p q_err + k_d qd_err, unsaturated.
double pd_effort(double q_err, double qd_err, double k_p, double k_d);

/// One joint of the PID law with anti-windup:
///   integral' = clamp(integral + q_err dt, ±effort_max / k_i)   (k_i > 0)
///   effort    = k_p q_err + k_d qd_err + k_i integral'
/// With k_i = 0 the integral stays pinned at zero and the result is
/// bit-identical to pd_effort.
struct PidJointResult {
    double effort = 0.0;
    double integral = 0.0;
};
PidJointResult pid_effort_joint(double q_err, double qd_err, double integral, double k_p,
                                double k_i, double k_d, double dt, double effort_max);

/// Vector form over the whole arm; returns the efforts and the updated state.
struct PidResult {
    std::vector<double> effort;
    ControllerState state;
};
PidResult pid_effort(std::span<const double> q_err, std::span<const double> qd_err,
                     const ControllerState& state, const PidGains& gains, double dt,
                     std::span<const double> effort_max);

struct ControlResult {
    std::vector<double> effort;
    ControllerState state;
};

/// One controller tick. Per joint:
///   1. clamp the position reference into [q_min, q_max]   (all variants)
///   2. raw effort via PD (GymPd/SimPd, gains from the model) or PID
///      (RosPid, gains from the state), velocity reference 0
///   3. saturate to ±effort_max                             (all variants)
///   4. GymPd/RosPid only: if the effort would drive |qd| past qd_max on
///      the next plant step, reduce it so |qd'| lands exactly on qd_max.
///      SimPd skips this — the source of its velocity-limit violations.
ControlResult controller_step(ControllerVariant variant, const ControllerState& state,
                              std::span<const double> target_q, const JointState& measured,
                              const RobotModel& model, double dt);

/// Velocity-mode entry point: tracks a velocity reference with the k_p term
/// off (effort = k_d (target_qd - qd)), then shares stages 3-4 above.
ControlResult controller_step_velocity(ControllerVariant variant,
                                       const ControllerState& state,
                                       std::span<const double> target_qd,
                                       const JointState& measured, const RobotModel& model,
                                       double dt);

/// Effort-mode entry point: raw effort pass-through sharing stages 3-4.
ControlResult controller_step_effort(ControllerVariant variant, const ControllerState& state,
                                     std::span<const double> effort,
                                     const JointState& measured, const RobotModel& model,
                                     double dt);

}  // namespace jointgap
