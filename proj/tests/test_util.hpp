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

#include <random>
#include <string>
#include <vector>

#include "jointgap/dynamics.hpp"
#include "jointgap/model.hpp"

namespace testutil {

inline std::string source_path(const std::string& relative) {
    return std::string(JOINTGAP_SOURCE_DIR) + "/" + relative;
}

inline std::string example_model_path() {
    return source_path("models/example_7dof.json");
}

// Single-joint model with wide limits for oracle checks.
inline jointgap::RobotModel single_joint_model(double inertia = 1.0, double friction = 0.0,
                                               double q_limit = 100.0, double qd_max = 1e6,
                                               double effort_max = 1e6) {
    jointgap::RobotModel model;
    jointgap::JointSpec joint;
    joint.name = "j1";
    joint.q_min = -q_limit;
    joint.q_max = q_limit;
    joint.qd_max = qd_max;
    joint.effort_max = effort_max;
    joint.stiffness = 100.0;
    joint.damping = 20.0;
    joint.inertia = inertia;
    joint.viscous_friction = friction;
    model.joints.push_back(joint);
    model.home.push_back(0.0);
    model.dt_default = 1.0 / 60.0;
    return model;
}

inline std::vector<double> random_times(std::mt19937_64& rng, std::size_t samples,
                                        double t0 = 0.0) {
    std::uniform_real_distribution<double> gap(1e-3, 0.05);
    std::vector<double> times;
    times.reserve(samples);
    double t = t0;
    for (std::size_t k = 0; k < samples; ++k) {
        times.push_back(t);
        t += gap(rng);
    }
    return times;
}

inline jointgap::Trajectory random_trajectory_on(std::mt19937_64& rng,
                                                 const std::vector<double>& times,
                                                 std::size_t dof) {
    std::uniform_real_distribution<double> value(-3.0, 3.0);
    jointgap::Trajectory traj;
    traj.dof = dof;
    traj.t = times;
    for (std::size_t k = 0; k < times.size(); ++k) {
        for (std::size_t d = 0; d < dof; ++d) {
            traj.q.push_back(value(rng));
        }
        for (std::size_t d = 0; d < dof; ++d) {
            traj.qd.push_back(value(rng));
        }
    }
    return traj;
}

inline jointgap::Trajectory random_trajectory(std::mt19937_64& rng, std::size_t dof,
                                              std::size_t samples, double t0 = 0.0) {
    return random_trajectory_on(rng, random_times(rng, samples, t0), dof);
}

}  // namespace testutil
