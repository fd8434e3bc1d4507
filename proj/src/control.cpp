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

#include "jointgap/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "jointgap/errors.hpp"

namespace jointgap {

namespace {

double clamp(double v, double lo, double hi) {
    return std::min(std::max(v, lo), hi);
}

double predict_velocity(double qd, double effort, const JointSpec& joint, double dt) {
    return qd + dt * (effort - joint.viscous_friction * qd) / joint.inertia;
}

// Stage 4: one-step-lookahead velocity-limit enforcement. Solves the plant
// update for the effort that lands |qd'| exactly on qd_max, then walks the
// result down by ulps until the re-predicted velocity is inside the limit
// in floating point as well (the inversion can round one ulp past it).
double cap_effort_to_velocity_limit(double effort, double qd, const JointSpec& joint,
                                    double dt) {
    const double predicted = predict_velocity(qd, effort, joint, dt);
    if (std::fabs(predicted) <= joint.qd_max) {
        return effort;
    }
    const double target_qd = std::copysign(joint.qd_max, predicted);
    double capped = (target_qd - qd) * joint.inertia / dt + joint.viscous_friction * qd;
    for (int i = 0; i < 64; ++i) {
        const double repredicted = predict_velocity(qd, capped, joint, dt);
        if (std::fabs(repredicted) <= joint.qd_max) {
            break;
        }
        capped = std::nextafter(capped, repredicted > 0.0
                                            ? -std::numeric_limits<double>::infinity()
                                            : std::numeric_limits<double>::infinity());
    }
    return capped;
}

// Stages 3-4 for one joint. The final clamp keeps the effort bound absolute
// even if the caller starts with |qd| already beyond qd_max, where the
// capping effort can exceed what the actuator has.
double finalize_effort(ControllerVariant variant, double raw, double qd,
                       const JointSpec& joint, double dt) {
    double effort = clamp(raw, -joint.effort_max, joint.effort_max);
    if (variant != ControllerVariant::SimPd) {
        effort = cap_effort_to_velocity_limit(effort, qd, joint, dt);
        effort = clamp(effort, -joint.effort_max, joint.effort_max);
    }
    return effort;
}

void check_step_inputs(std::span<const double> target, const JointState& measured,
                       const RobotModel& model, double dt, const char* what) {
    if (target.size() != model.dof()) {
        throw ValidationError(std::string(what) + " dimension does not match model DOF");
    }
    if (measured.q.size() != model.dof() || measured.qd.size() != model.dof()) {
        throw ValidationError("measured state dimension does not match model DOF");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ValidationError("dt must be a positive finite number");
    }
    for (double v : target) {
        if (!std::isfinite(v)) {
            throw ValidationError(std::string(what) + " contains a non-finite value");
        }
    }
}

}  // namespace

const char* variant_name(ControllerVariant variant) {
    switch (variant) {
        case ControllerVariant::GymPd:
            return "gym_pd";
        case ControllerVariant::SimPd:
            return "sim_pd";
        case ControllerVariant::RosPid:
            return "ros_pid";
    }
    return "unknown";
}

ControllerVariant variant_from_name(const std::string& name) {
    if (name == "gym_pd") {
        return ControllerVariant::GymPd;
    }
    if (name == "sim_pd") {
        return ControllerVariant::SimPd;
    }
    if (name == "ros_pid") {
        return ControllerVariant::RosPid;
    }
    throw ValidationError("unknown controller variant '" + name +
                          "' (expected gym_pd, sim_pd, or ros_pid)");
}

PidGains default_pid_gains(const RobotModel& model) {
    PidGains gains;
    gains.k_p.reserve(model.dof());
    gains.k_i.assign(model.dof(), 0.0);
    gains.k_d.reserve(model.dof());
    for (const JointSpec& j : model.joints) {
        gains.k_p.push_back(j.stiffness);
        gains.k_d.push_back(j.damping);
    }
    return gains;
}

ControllerState make_controller(ControllerVariant variant, const RobotModel& model,
                                const std::optional<PidGains>& gains) {
    ControllerState state;
    state.integral.assign(model.dof(), 0.0);
    state.last_target = model.home;
    if (variant == ControllerVariant::RosPid) {
        if (!gains.has_value()) {
            throw ValidationError("RosPid controller requires PID gains");
        }
        const PidGains& g = *gains;
        if (g.k_p.size() != model.dof() || g.k_i.size() != model.dof() ||
            g.k_d.size() != model.dof()) {
            throw ValidationError("PID gain dimensions do not match model DOF");
        }
        for (std::size_t i = 0; i < model.dof(); ++i) {
            if (g.k_p[i] < 0.0 || g.k_i[i] < 0.0 || g.k_d[i] < 0.0 ||
                !std::isfinite(g.k_p[i]) || !std::isfinite(g.k_i[i]) ||
                !std::isfinite(g.k_d[i])) {
                throw ValidationError("PID gains must be finite and >= 0 (joint " +
                                      std::to_string(i + 1) + ")");
            }
        }
        state.gains = g;
    } else if (gains.has_value()) {
        throw ValidationError("PID gains are only accepted for the ros_pid variant");
    }
    return state;
}

double pd_effort(double q_err, double qd_err, double k_p, double k_d) {
    if (!std::isfinite(q_err) || !std::isfinite(qd_err)) {
        throw ValidationError("pd_effort: non-finite error input");
    }
    if (k_p < 0.0 || k_d < 0.0 || !std::isfinite(k_p) || !std::isfinite(k_d)) {
        throw ValidationError("pd_effort: gains must be finite and >= 0");
    }
    return k_p * q_err + k_d * qd_err;
}

PidJointResult pid_effort_joint(double q_err, double qd_err, double integral, double k_p,
                                double k_i, double k_d, double dt, double effort_max) {
    if (!(dt > 0.0)) {
        throw ValidationError("pid_effort: dt must be > 0");
    }
    PidJointResult result;
    if (k_i > 0.0) {
        const double limit = effort_max / k_i;
        result.integral = clamp(integral + q_err * dt, -limit, limit);
    } else {
        result.integral = 0.0;
    }
    // PD term first, identical expression to pd_effort, so k_i = 0 is
    // bit-for-bit the PD controller.
    result.effort = pd_effort(q_err, qd_err, k_p, k_d) + k_i * result.integral;
    return result;
}

PidResult pid_effort(std::span<const double> q_err, std::span<const double> qd_err,
                     const ControllerState& state, const PidGains& gains, double dt,
                     std::span<const double> effort_max) {
    const std::size_t dof = state.integral.size();
    if (q_err.size() != dof || qd_err.size() != dof || gains.k_p.size() != dof ||
        effort_max.size() != dof) {
        throw ValidationError("pid_effort: dimension mismatch");
    }
    PidResult result;
    result.effort.resize(dof);
    result.state = state;
    for (std::size_t i = 0; i < dof; ++i) {
        const PidJointResult r =
            pid_effort_joint(q_err[i], qd_err[i], state.integral[i], gains.k_p[i],
                             gains.k_i[i], gains.k_d[i], dt, effort_max[i]);
        result.effort[i] = r.effort;
        result.state.integral[i] = r.integral;
    }
    return result;
}

ControlResult controller_step(ControllerVariant variant, const ControllerState& state,
                              std::span<const double> target_q, const JointState& measured,
                              const RobotModel& model, double dt) {
    check_step_inputs(target_q, measured, model, dt, "target");

    ControlResult result;
    result.effort.resize(model.dof());
    result.state = state;

    for (std::size_t i = 0; i < model.dof(); ++i) {
        const JointSpec& joint = model.joints[i];
        const double target = clamp(target_q[i], joint.q_min, joint.q_max);
        result.state.last_target[i] = target;

        const double q_err = target - measured.q[i];
        const double qd_err = 0.0 - measured.qd[i];

        double raw;
        if (variant == ControllerVariant::RosPid) {
            const PidGains& g = state.gains;
            const PidJointResult r =
                pid_effort_joint(q_err, qd_err, state.integral[i], g.k_p[i], g.k_i[i],
                                 g.k_d[i], dt, joint.effort_max);
            result.state.integral[i] = r.integral;
            raw = r.effort;
        } else {
            raw = pd_effort(q_err, qd_err, joint.stiffness, joint.damping);
        }
        result.effort[i] = finalize_effort(variant, raw, measured.qd[i], joint, dt);
    }
    return result;
}

ControlResult controller_step_velocity(ControllerVariant variant,
                                       const ControllerState& state,
                                       std::span<const double> target_qd,
                                       const JointState& measured, const RobotModel& model,
                                       double dt) {
    check_step_inputs(target_qd, measured, model, dt, "velocity target");

    ControlResult result;
    result.effort.resize(model.dof());
    result.state = state;
    for (std::size_t i = 0; i < model.dof(); ++i) {
        const JointSpec& joint = model.joints[i];
        const double k_d = variant == ControllerVariant::RosPid ? state.gains.k_d[i]
                                                                : joint.damping;
        const double raw = k_d * (target_qd[i] - measured.qd[i]);
        result.effort[i] = finalize_effort(variant, raw, measured.qd[i], joint, dt);
    }
    return result;
}

ControlResult controller_step_effort(ControllerVariant variant, const ControllerState& state,
                                     std::span<const double> effort,
                                     const JointState& measured, const RobotModel& model,
                                     double dt) {
    check_step_inputs(effort, measured, model, dt, "effort");

    ControlResult result;
    result.effort.resize(model.dof());
    result.state = state;
    for (std::size_t i = 0; i < model.dof(); ++i) {
        result.effort[i] =
            finalize_effort(variant, effort[i], measured.qd[i], model.joints[i], dt);
    }
    return result;
}

}  // namespace jointgap
