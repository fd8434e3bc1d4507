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

#include <cstddef>
#include <string>
#include <vector>

namespace jointgap {

/// Per-joint limits, PD gains, and plant parameters. The plant is a set of
/// decoupled joints: I q̈ = τ - b q̇, with hard stops at [q_min, q_max].
struct JointSpec {
    std::string name;
    double q_min = 0.0;             // rad
    double q_max = 0.0;             // rad
    double qd_max = 0.0;            // rad/s, > 0
    double effort_max = 0.0;        // N·m, > 0
    double stiffness = 0.0;         // PD k_p, N·m/rad, >= 0
    double damping = 0.0;           // PD k_d, N·m·s/rad, >= 0
    double inertia = 0.0;           // kg·m², > 0
    double viscous_friction = 0.0;  // plant damping b, N·m·s/rad, >= 0
};

/// The simulated plant definition. Immutable after load; safe to share
/// across concurrent readers. DOF index = position in `joints` (0-based
/// internally, 1-based in human-facing reports).
struct RobotModel {
    std::vector<JointSpec> joints;
    std::vector<double> home;  // rad, one entry per joint, within limits
    double dt_default = 0.0;   // s, > 0

    std::size_t dof() const { return joints.size(); }
};

/// Throws ValidationError naming the offending joint/field on any broken
/// invariant (q_min < q_max, positive qd_max/effort_max/inertia,
/// non-negative gains/friction, distinct names, home within limits,
/// dt_default > 0, all values finite).
void validate_robot_model(const RobotModel& model);

/// Loads and validates a model JSON file. Unknown keys are a hard error.
/// Throws IoError if the file cannot be read, ValidationError otherwise.
RobotModel load_robot_model(const std::string& path);

/// Writes the model back out; load(save(m)) == m field for field.
void save_robot_model(const RobotModel& model, const std::string& path);

/// The all-joints-at-zero configuration (the fully extended arm pose).
/// Throws ValidationError naming the joint if 0 is outside its limits.
std::vector<double> zero_configuration(const RobotModel& model);

}  // namespace jointgap
