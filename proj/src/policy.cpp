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

#include "jointgap/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "jointgap/csv.hpp"
#include "jointgap/errors.hpp"

namespace jointgap {

namespace {

using nlohmann::json;

double clamp(double v, double lo, double hi) {
    return std::min(std::max(v, lo), hi);
}

std::vector<double> normalize_observation(const JointState& state, const RobotModel& model) {
    const std::size_t dof = model.dof();
    std::vector<double> obs(2 * dof);
    for (std::size_t i = 0; i < dof; ++i) {
        const JointSpec& j = model.joints[i];
        obs[i] = 2.0 * (state.q[i] - j.q_min) / (j.q_max - j.q_min) - 1.0;
        obs[dof + i] = state.qd[i] / j.qd_max;
    }
    return obs;
}

}  // namespace

double reward(std::span<const double> q) {
    double sum = 0.0;
    for (double v : q) {
        if (!std::isfinite(v)) {
            throw ValidationError("reward: non-finite position");
        }
        sum += std::fabs(v);
    }
    return -sum;
}

Policy zero_policy(std::size_t dof) {
    Policy policy;
    policy.dof = dof;
    policy.weights.assign(dof * 2 * dof, 0.0);
    policy.bias.assign(dof, 0.0);
    return policy;
}

std::vector<double> policy_act(const Policy& policy, std::span<const double> observation) {
    if (observation.size() != policy.obs_dim() ||
        policy.weights.size() != policy.dof * policy.obs_dim() ||
        policy.bias.size() != policy.dof) {
        throw ValidationError("policy_act: dimension mismatch");
    }
    std::vector<double> action(policy.dof);
    for (std::size_t row = 0; row < policy.dof; ++row) {
        double acc = policy.bias[row];
        const double* w = policy.weights.data() + row * policy.obs_dim();
        for (std::size_t c = 0; c < policy.obs_dim(); ++c) {
            acc += w[c] * observation[c];
        }
        action[row] = std::tanh(acc);
    }
    return action;
}

std::string policy_to_json(const Policy& policy) {
    json doc;
    doc["dof"] = policy.dof;
    doc["weights"] = policy.weights;
    doc["bias"] = policy.bias;
    return doc.dump(2) + "\n";
}

Policy policy_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("policy file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ValidationError("policy file must hold a JSON object");
    }
    static const std::set<std::string> kKeys = {"dof", "weights", "bias"};
    for (const auto& item : doc.items()) {
        if (kKeys.find(item.key()) == kKeys.end()) {
            throw ValidationError("unknown field '" + item.key() + "' in policy file");
        }
    }
    if (!doc.contains("dof") || !doc.at("dof").is_number_unsigned()) {
        throw ValidationError("policy file needs an unsigned 'dof'");
    }
    Policy policy;
    policy.dof = doc.at("dof").get<std::size_t>();
    if (policy.dof == 0) {
        throw ValidationError("policy dof must be >= 1");
    }
    if (!doc.contains("weights") || !doc.at("weights").is_array() ||
        !doc.contains("bias") || !doc.at("bias").is_array()) {
        throw ValidationError("policy file needs 'weights' and 'bias' arrays");
    }
    for (const json& v : doc.at("weights")) {
        if (!v.is_number() || !std::isfinite(v.get<double>())) {
            throw ValidationError("policy weights must be finite numbers");
        }
        policy.weights.push_back(v.get<double>());
    }
    for (const json& v : doc.at("bias")) {
        if (!v.is_number() || !std::isfinite(v.get<double>())) {
            throw ValidationError("policy bias must be finite numbers");
        }
        policy.bias.push_back(v.get<double>());
    }
    if (policy.weights.size() != policy.dof * 2 * policy.dof ||
        policy.bias.size() != policy.dof) {
        throw ValidationError("policy weight/bias sizes do not match dof");
    }
    return policy;
}

Policy read_policy(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open policy file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return policy_from_json(buffer.str());
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

void write_policy(const Policy& policy, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write policy file '" + path + "'");
    }
    out << policy_to_json(policy);
    if (!out) {
        throw IoError("failed writing policy file '" + path + "'");
    }
}

Env::Env(RobotModel model, ControllerVariant variant, std::size_t horizon, double dt,
         double action_scaling, std::optional<PidGains> gains)
    : model_(std::move(model)),
      variant_(variant),
      horizon_(horizon),
      dt_(dt),
      action_scaling_(action_scaling),
      gains_(std::move(gains)) {
    validate_robot_model(model_);
    if (horizon_ < 1) {
        throw ValidationError("env horizon must be >= 1");
    }
    if (!(dt_ > 0.0) || !std::isfinite(dt_)) {
        throw ValidationError("env dt must be a positive finite number");
    }
    if (!(action_scaling_ > 0.0) || !std::isfinite(action_scaling_)) {
        throw ValidationError("env action scaling must be > 0");
    }
    if (variant_ == ControllerVariant::RosPid && !gains_.has_value()) {
        gains_ = default_pid_gains(model_);
    }
    controller_ = make_controller(variant_, model_, gains_);
    state_ = home_state(model_);
}

std::vector<double> Env::reset(std::uint64_t /*seed*/) {
    // The start state is exactly (home, zero velocity); the seed parameter
    // exists for interface parity and future randomized resets.
    state_ = home_state(model_);
    controller_ = make_controller(variant_, model_, gains_);
    steps_taken_ = 0;
    return observation();
}

std::vector<double> Env::observation() const {
    return normalize_observation(state_, model_);
}

Env::StepResult Env::step(std::span<const double> action) {
    if (done()) {
        throw ValidationError("env step called after episode end");
    }
    if (action.size() != model_.dof()) {
        throw ValidationError("action dimension does not match model DOF");
    }

    std::vector<double> target(model_.dof());
    for (std::size_t i = 0; i < model_.dof(); ++i) {
        if (!std::isfinite(action[i])) {
            throw ValidationError("non-finite action entry");
        }
        const double bounded = clamp(action[i], -1.0, 1.0);
        const JointSpec& j = model_.joints[i];
        target[i] = clamp(state_.q[i] + bounded * action_scaling_, j.q_min, j.q_max);
    }

    ControlResult control = controller_step(variant_, controller_, target, state_, model_, dt_);
    controller_ = std::move(control.state);
    state_ = step_dynamics(state_, control.effort, model_, dt_);
    ++steps_taken_;

    StepResult result;
    result.observation = observation();
    result.reward = reward(state_.q);
    result.done = done();
    return result;
}

double evaluate_policy(const Policy& policy, Env& env, std::size_t episodes,
                       std::uint64_t seed) {
    if (episodes < 1) {
        throw ValidationError("evaluate_policy needs episodes >= 1");
    }
    double total = 0.0;
    for (std::size_t episode = 0; episode < episodes; ++episode) {
        std::vector<double> obs = env.reset(seed + episode);
        double episode_return = 0.0;
        bool done = false;
        while (!done) {
            const std::vector<double> action = policy_act(policy, obs);
            Env::StepResult step = env.step(action);
            episode_return += step.reward;
            obs = std::move(step.observation);
            done = step.done;
        }
        total += episode_return;
    }
    return total / static_cast<double>(episodes);
}

void validate_train_config(const TrainConfig& config) {
    if (config.population < 2) {
        throw ValidationError("train population must be >= 2");
    }
    if (!(config.elite_fraction > 0.0) || !(config.elite_fraction < 1.0)) {
        throw ValidationError("elite fraction must be in (0, 1)");
    }
    const std::size_t elites = static_cast<std::size_t>(
        std::ceil(config.elite_fraction * static_cast<double>(config.population)));
    if (elites < 1) {
        throw ValidationError("elite count must be >= 1");
    }
    if (!(config.initial_stddev > 0.0) || !std::isfinite(config.initial_stddev)) {
        throw ValidationError("initial stddev must be > 0");
    }
    if (!(config.stddev_floor > 0.0) || !std::isfinite(config.stddev_floor)) {
        throw ValidationError("stddev floor must be > 0");
    }
    if (config.episodes < 1) {
        throw ValidationError("episodes per evaluation must be >= 1");
    }
}

namespace {

Policy policy_from_params(std::span<const double> params, std::size_t dof) {
    Policy policy;
    policy.dof = dof;
    const std::size_t weight_count = dof * 2 * dof;
    policy.weights.assign(params.begin(), params.begin() + weight_count);
    policy.bias.assign(params.begin() + weight_count, params.end());
    return policy;
}

}  // namespace

TrainResult cem_train(Env& env, const TrainConfig& config) {
    validate_train_config(config);

    const std::size_t dof = env.dof();
    const std::size_t param_count = dof * 2 * dof + dof;
    const std::size_t elite_count = static_cast<std::size_t>(
        std::ceil(config.elite_fraction * static_cast<double>(config.population)));

    std::vector<double> mean(param_count, 0.0);
    std::vector<double> stddev(param_count, config.initial_stddev);

    TrainResult result;
    result.policy = policy_from_params(mean, dof);
    if (config.iterations == 0) {
        return result;
    }

    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    double best_return = -std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> population(config.population,
                                                std::vector<double>(param_count));
    std::vector<double> returns(config.population);
    std::vector<std::size_t> order(config.population);

    for (std::size_t iter = 0; iter < config.iterations; ++iter) {
        for (std::size_t member = 0; member < config.population; ++member) {
            std::vector<double>& params = population[member];
            for (std::size_t p = 0; p < param_count; ++p) {
                params[p] = mean[p] + stddev[p] * normal(rng);
            }
        }

        // Independent evaluations, reduced in population order; a parallel
        // map into the indexed slots would produce identical results.
        for (std::size_t member = 0; member < config.population; ++member) {
            const Policy candidate = policy_from_params(population[member], dof);
            returns[member] = evaluate_policy(candidate, env, config.episodes, config.seed);
        }

        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (returns[a] != returns[b]) {
                return returns[a] > returns[b];
            }
            return a < b;  // deterministic tie-break
        });

        if (returns[order[0]] > best_return) {
            best_return = returns[order[0]];
            result.policy = policy_from_params(population[order[0]], dof);
        }

        for (std::size_t p = 0; p < param_count; ++p) {
            double m = 0.0;
            for (std::size_t e = 0; e < elite_count; ++e) {
                m += population[order[e]][p];
            }
            m /= static_cast<double>(elite_count);
            double var = 0.0;
            for (std::size_t e = 0; e < elite_count; ++e) {
                const double d = population[order[e]][p] - m;
                var += d * d;
            }
            var /= static_cast<double>(elite_count);
            mean[p] = m;
            stddev[p] = std::max(std::sqrt(var), config.stddev_floor);
        }

        TrainRecord record;
        record.best = best_return;
        double elite_mean = 0.0;
        for (std::size_t e = 0; e < elite_count; ++e) {
            elite_mean += returns[order[e]];
        }
        record.elite_mean = elite_mean / static_cast<double>(elite_count);
        record.pop_mean = std::accumulate(returns.begin(), returns.end(), 0.0) /
                          static_cast<double>(config.population);
        result.history.records.push_back(record);
    }
    return result;
}

void write_history_csv(const TrainHistory& history, const std::string& path) {
    std::ostringstream os;
    os << "iter,best,elite_mean,pop_mean\n";
    for (std::size_t i = 0; i < history.records.size(); ++i) {
        const TrainRecord& r = history.records[i];
        os << i << "," << format_full(r.best) << "," << format_full(r.elite_mean) << ","
           << format_full(r.pop_mean) << "\n";
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write history file '" + path + "'");
    }
    out << os.str();
    if (!out) {
        throw IoError("failed writing history file '" + path + "'");
    }
}

Trajectory rollout_policy(const Policy& policy, const RobotModel& model,
                          ControllerVariant variant, std::size_t horizon, double dt,
                          double action_scaling, const std::optional<PidGains>& gains,
                          std::uint64_t seed) {
    if (policy.dof != model.dof()) {
        throw ValidationError("policy dimensions do not match model DOF");
    }
    Env env(model, variant, horizon, dt, action_scaling, gains);
    std::vector<double> obs = env.reset(seed);

    Trajectory traj;
    traj.dof = model.dof();
    traj.append(0.0, env.state());
    for (std::size_t k = 1; k <= horizon; ++k) {
        const std::vector<double> action = policy_act(policy, obs);
        Env::StepResult step = env.step(action);
        obs = std::move(step.observation);
        traj.append(static_cast<double>(k) * dt, env.state());
    }
    return traj;
}

GapReport transfer_gap(const Policy& policy, const RobotModel& model,
                       ControllerVariant variant_a, ControllerVariant variant_b,
                       std::size_t horizon, double dt, double action_scaling,
                       const std::optional<PidGains>& gains) {
    const Trajectory traj_a =
        rollout_policy(policy, model, variant_a, horizon, dt, action_scaling, gains);
    const Trajectory traj_b =
        rollout_policy(policy, model, variant_b, horizon, dt, action_scaling, gains);

    // Settle reference = the reference rollout's final pose, the same rule
    // the gap CLI applies, so file-level and library results agree exactly.
    SettleParams settle;
    settle.reference.resize(model.dof());
    for (std::size_t d = 0; d < model.dof(); ++d) {
        settle.reference[d] = traj_a.position(traj_a.size() - 1, d);
    }
    return accumulated_error(traj_a, traj_b, settle);
}

}  // namespace jointgap
