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

#include "jointgap/dynamics.hpp"

#include <cmath>
#include <string>

#include "jointgap/errors.hpp"

namespace jointgap {

void Trajectory::append(double time, const JointState& state) {
    t.push_back(time);
    q.insert(q.end(), state.q.begin(), state.q.end());
    qd.insert(qd.end(), state.qd.begin(), state.qd.end());
}

std::vector<double> Trajectory::position_column(std::size_t joint) const {
    std::vector<double> column(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        column[k] = q[k * dof + joint];
    }
    return column;
}

std::vector<double> Trajectory::velocity_column(std::size_t joint) const {
    std::vector<double> column(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        column[k] = qd[k * dof + joint];
    }
    return column;
}

void validate_trajectory(const Trajectory& traj) {
    if (traj.dof == 0) {
        throw ValidationError("trajectory has zero DOF");
    }
    if (traj.q.size() != traj.t.size() * traj.dof ||
        traj.qd.size() != traj.t.size() * traj.dof) {
        throw ValidationError("trajectory sample count does not match timestamps");
    }
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        if (!std::isfinite(traj.t[k])) {
            throw ValidationError("non-finite timestamp at sample " + std::to_string(k));
        }
        if (k > 0 && !(traj.t[k] > traj.t[k - 1])) {
            throw ValidationError("timestamps not strictly increasing at sample " +
                                  std::to_string(k));
        }
    }
    for (double v : traj.q) {
        if (!std::isfinite(v)) {
            throw ValidationError("non-finite position in trajectory");
        }
    }
    for (double v : traj.qd) {
        if (!std::isfinite(v)) {
            throw ValidationError("non-finite velocity in trajectory");
        }
    }
}

JointState home_state(const RobotModel& model) {
    JointState state;
    state.q = model.home;
    state.qd.assign(model.dof(), 0.0);
    return state;
}

JointState step_dynamics(const JointState& state, std::span<const double> effort,
                         const RobotModel& model, double dt) {
    const std::size_t dof = model.dof();
    if (state.q.size() != dof || state.qd.size() != dof) {
        throw ValidationError("state dimension does not match model DOF");
    }
    if (effort.size() != dof) {
        throw ValidationError("effort dimension does not match model DOF");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ValidationError("dt must be a positive finite number");
    }

    JointState next;
    next.q.resize(dof);
    next.qd.resize(dof);
    for (std::size_t i = 0; i < dof; ++i) {
        if (!std::isfinite(effort[i])) {
            throw ValidationError("non-finite effort on joint " + std::to_string(i + 1));
        }
        const JointSpec& j = model.joints[i];
        double qd = state.qd[i] +
                    dt * (effort[i] - j.viscous_friction * state.qd[i]) / j.inertia;
        double q = state.q[i] + dt * qd;
        if (q < j.q_min) {
            q = j.q_min;
            qd = 0.0;
        } else if (q > j.q_max) {
            q = j.q_max;
            qd = 0.0;
        }
        next.q[i] = q;
        next.qd[i] = qd;
    }
    return next;
}

}  // namespace jointgap
