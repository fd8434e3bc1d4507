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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jointgap/control.hpp"
#include "jointgap/dynamics.hpp"
#include "jointgap/gap.hpp"
#include "jointgap/model.hpp"

namespace jointgap {

inline constexpr std::size_t kDefaultHorizon = 150;
inline constexpr double kDefaultActionScaling = 0.05;  // rad per step

/// Per-step reward: -Σ|q_i|. Zero (the maximum) exactly at the fully
/// extended all-joints-at-zero pose.
double reward(std::span<const double> q);

/// Linear policy with a tanh squash into [-1, 1]. Observation layout:
/// q normalized to [-1, 1] by the joint limits, then qd normalized by
/// qd_max; action dim = DOF, so weights is dof x 2·dof row-major.
struct Policy {
    std::size_t dof = 0;
    std::vector<double> weights;  // row-major, dof rows, 2*dof columns
    std::vector<double> bias;     // dof

    std::size_t obs_dim() const { return 2 * dof; }
};

Policy zero_policy(std::size_t dof);
std::vector<double> policy_act(const Policy& policy, std::span<const double> observation);

std::string policy_to_json(const Policy& policy);
Policy policy_from_json(const std::string& text);
Policy read_policy(const std::string& path);
void write_policy(const Policy& policy, const std::string& path);

/// Reset/step environment around the simulator: actions are bounded
/// position-reference deltas, one controller tick + one plant step each
/// call. Deterministic for a fixed seed (reset puts the arm exactly at
/// home with zero velocity).
class Env {
public:
    Env(RobotModel model, ControllerVariant variant, std::size_t horizon, double dt,
        double action_scaling, std::optional<PidGains> gains = std::nullopt);

    std::vector<double> reset(std::uint64_t seed);

    struct StepResult {
        std::vector<double> observation;
        double reward = 0.0;
        bool done = false;
    };
    /// Throws ValidationError when stepping a finished episode. Action
    /// entries are clamped into [-1, 1] before scaling.
    StepResult step(std::span<const double> action);

    std::vector<double> observation() const;
    const JointState& state() const { return state_; }
    const RobotModel& model() const { return model_; }
    ControllerVariant variant() const { return variant_; }
    std::size_t dof() const { return model_.dof(); }
    std::size_t obs_dim() const { return 2 * model_.dof(); }
    std::size_t horizon() const { return horizon_; }
    double dt() const { return dt_; }
    double action_scaling() const { return action_scaling_; }
    std::size_t steps_taken() const { return steps_taken_; }
    bool done() const { return steps_taken_ >= horizon_; }

private:
    RobotModel model_;
    ControllerVariant variant_;
    std::size_t horizon_;
    double dt_;
    double action_scaling_;
    ControllerState controller_;
    JointState state_;
    std::size_t steps_taken_ = 0;
    std::optional<PidGains> gains_;
};

/// Mean episode return over deterministic seeded resets.
double evaluate_policy(const Policy& policy, Env& env, std::size_t episodes,
                       std::uint64_t seed);

struct TrainConfig {
    std::size_t iterations = 200;
    std::size_t population = 64;   // >= 2
    double elite_fraction = 0.1;   // in (0, 1), ceil(elite·population) >= 1
    double initial_stddev = 0.5;
    double stddev_floor = 0.01;    // > 0
    std::size_t episodes = 1;      // per evaluation
    std::uint64_t seed = 0;
};

void validate_train_config(const TrainConfig& config);

struct TrainRecord {
    double best = 0.0;        // best return seen so far (non-decreasing)
    double elite_mean = 0.0;  // this iteration's elite mean
    double pop_mean = 0.0;    // this iteration's population mean
};

struct TrainHistory {
    std::vector<TrainRecord> records;
};

void write_history_csv(const TrainHistory& history, const std::string& path);

struct TrainResult {
    Policy policy;  // best-ever sampled policy (initial mean if iterations == 0)
    TrainHistory history;
};

/// Cross-entropy method over the flattened policy parameters: sample a
/// population from a diagonal Gaussian, evaluate, refit mean/stddev to the
/// elites (stddev floored), repeat. Fully deterministic for a fixed seed;
/// candidates are evaluated and reduced in population order.
TrainResult cem_train(Env& env, const TrainConfig& config);

/// Rolls the same policy out closed-loop under both variants from home and
/// returns the accumulated error between the two trajectories — the
/// transfer gap for a trained behavior. Identical variants give exactly 0.
GapReport transfer_gap(const Policy& policy, const RobotModel& model,
                       ControllerVariant variant_a, ControllerVariant variant_b,
                       std::size_t horizon, double dt = 1.0 / 60.0,
                       double action_scaling = kDefaultActionScaling,
                       const std::optional<PidGains>& gains = std::nullopt);

/// Closed-loop rollout of a policy from home; the trajectory feeds the
/// DOF-vs-time plots and the transfer gap.
Trajectory rollout_policy(const Policy& policy, const RobotModel& model,
                          ControllerVariant variant, std::size_t horizon, double dt,
                          double action_scaling,
                          const std::optional<PidGains>& gains = std::nullopt,
                          std::uint64_t seed = 0);

}  // namespace jointgap
