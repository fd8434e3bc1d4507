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
#include <span>
#include <vector>

#include "jointgap/model.hpp"

namespace jointgap {

/// Joint positions and velocities at one instant.
struct JointState {
    std::vector<double> q;   // rad
    std::vector<double> qd;  // rad/s
};

/// Timestamped joint states; the exchange currency between the simulator,
/// the gap metrics, and the CSV wire format. Row-major storage: sample k,
/// joint d lives at k * dof + d.
struct Trajectory {
    std::size_t dof = 0;
    std::vector<double> t;   // strictly increasing, seconds
    std::vector<double> q;   // t.size() * dof
    std::vector<double> qd;  // t.size() * dof

    std::size_t size() const { return t.size(); }
    double position(std::size_t sample, std::size_t joint) const {
        return q[sample * dof + joint];
    }
    double velocity(std::size_t sample, std::size_t joint) const {
        return qd[sample * dof + joint];
    }
    void append(double time, const JointState& state);

    /// One joint's positions over all samples (contiguous copy for kernels).
    std::vector<double> position_column(std::size_t joint) const;
    std::vector<double> velocity_column(std::size_t joint) const;
};

/// Throws ValidationError on non-monotone t, length mismatches, or
/// non-finite entries.
void validate_trajectory(const Trajectory& traj);

JointState home_state(const RobotModel& model);

/// One semi-implicit Euler step of the decoupled plant, per joint:
///   qd' = qd + dt (τ - b qd) / I,  q' = q + dt qd'
/// q' is clamped to [q_min, q_max]; on clamp qd' is zeroed (hard stop).
/// Pure function of its inputs. Throws ValidationError on non-finite effort
/// or dimension mismatch.
JointState step_dynamics(const JointState& state, std::span<const double> effort,
                         const RobotModel& model, double dt);

}  // namespace jointgap
