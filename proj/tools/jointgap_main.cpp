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

// Batch front end: step experiments, gap/violation reports, policy
// training, and rollouts, all as pure functions of (flags, config file,
// input files, seed) so re-running a command reproduces its outputs byte
// for byte.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jointgap/control.hpp"
#include "jointgap/csv.hpp"
#include "jointgap/errors.hpp"
#include "jointgap/gap.hpp"
#include "jointgap/model.hpp"
#include "jointgap/policy.hpp"

namespace {

using jointgap::ControllerVariant;
using jointgap::IoError;
using jointgap::PidGains;
using jointgap::RobotModel;
using jointgap::ValidationError;
using nlohmann::json;

std::vector<double> parse_double_list(const std::string& text, const std::string& where) {
    std::vector<double> values;
    std::string::size_type start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        const std::string field =
            comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start);
        values.push_back(jointgap::parse_double(field, where));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return values;
}

// Everything a command run depends on, resolved from the config file with
// command-line flags taking precedence.
struct RunConfig {
    std::string model_path;
    std::string variant = "gym_pd";
    std::optional<PidGains> pid_gains;

    std::vector<double> targets;  // empty = zero configuration
    double duration = 10.0;
    std::optional<double> dt;  // default: model dt_default

    jointgap::TrainConfig train;
    std::size_t horizon = jointgap::kDefaultHorizon;
    double action_scaling = jointgap::kDefaultActionScaling;

    std::string output_dir = ".";
    std::uint64_t seed = 0;
    bool seed_from_config = false;
};

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& item : obj.items()) {
        if (allowed.find(item.key()) == allowed.end()) {
            throw ValidationError("unknown field '" + item.key() + "' in " + where);
        }
    }
}

double config_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.at(key).is_number()) {
        throw ValidationError("field '" + std::string(key) + "' in " + where +
                              " must be a number");
    }
    const double v = obj.at(key).get<double>();
    if (!std::isfinite(v)) {
        throw ValidationError("field '" + std::string(key) + "' in " + where +
                              " must be finite");
    }
    return v;
}

std::vector<double> config_array(const json& obj, const char* key, const std::string& where) {
    if (!obj.at(key).is_array()) {
        throw ValidationError("field '" + std::string(key) + "' in " + where +
                              " must be an array");
    }
    std::vector<double> values;
    for (const json& v : obj.at(key)) {
        if (!v.is_number() || !std::isfinite(v.get<double>())) {
            throw ValidationError("entries of '" + std::string(key) + "' in " + where +
                                  " must be finite numbers");
        }
        values.push_back(v.get<double>());
    }
    return values;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file '" + path + "'");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) {
        throw ValidationError("config file '" + path + "' must hold a JSON object");
    }
    reject_unknown_keys(
        doc, {"model", "variant", "pid_gains", "experiment", "train", "output_dir", "seed"},
        "config");

    RunConfig config;
    if (doc.contains("model")) {
        config.model_path = doc.at("model").get<std::string>();
    }
    if (doc.contains("variant")) {
        config.variant = doc.at("variant").get<std::string>();
    }
    if (doc.contains("output_dir")) {
        config.output_dir = doc.at("output_dir").get<std::string>();
    }
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned()) {
            throw ValidationError("config seed must be a non-negative integer");
        }
        config.seed = doc.at("seed").get<std::uint64_t>();
        config.seed_from_config = true;
    }
    if (doc.contains("pid_gains")) {
        const json& g = doc.at("pid_gains");
        reject_unknown_keys(g, {"k_p", "k_i", "k_d"}, "pid_gains");
        PidGains gains;
        gains.k_p = config_array(g, "k_p", "pid_gains");
        gains.k_i = config_array(g, "k_i", "pid_gains");
        gains.k_d = config_array(g, "k_d", "pid_gains");
        config.pid_gains = std::move(gains);
    }
    if (doc.contains("experiment")) {
        const json& e = doc.at("experiment");
        reject_unknown_keys(e, {"targets", "duration", "dt"}, "experiment");
        if (e.contains("targets")) {
            config.targets = config_array(e, "targets", "experiment");
        }
        if (e.contains("duration")) {
            config.duration = config_number(e, "duration", "experiment");
        }
        if (e.contains("dt")) {
            config.dt = config_number(e, "dt", "experiment");
        }
    }
    if (doc.contains("train")) {
        const json& t = doc.at("train");
        reject_unknown_keys(t,
                            {"iterations", "population", "elite_fraction", "initial_stddev",
                             "stddev_floor", "episodes", "horizon", "action_scaling"},
                            "train");
        if (t.contains("iterations")) {
            config.train.iterations = t.at("iterations").get<std::size_t>();
        }
        if (t.contains("population")) {
            config.train.population = t.at("population").get<std::size_t>();
        }
        if (t.contains("elite_fraction")) {
            config.train.elite_fraction = config_number(t, "elite_fraction", "train");
        }
        if (t.contains("initial_stddev")) {
            config.train.initial_stddev = config_number(t, "initial_stddev", "train");
        }
        if (t.contains("stddev_floor")) {
            config.train.stddev_floor = config_number(t, "stddev_floor", "train");
        }
        if (t.contains("episodes")) {
            config.train.episodes = t.at("episodes").get<std::size_t>();
        }
        if (t.contains("horizon")) {
            config.horizon = t.at("horizon").get<std::size_t>();
        }
        if (t.contains("action_scaling")) {
            config.action_scaling = config_number(t, "action_scaling", "train");
        }
    }
    return config;
}

std::uint64_t parse_seed(const std::string& text, const std::string& where) {
    std::uint64_t value = 0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
        throw ValidationError(where + " is not a valid non-negative seed: '" + text + "'");
    }
    return value;
}

// Flag > config file > JOINTGAP_SEED > 0.
void resolve_seed(RunConfig& config, bool seed_flag_given, std::uint64_t flag_seed) {
    if (seed_flag_given) {
        config.seed = flag_seed;
        return;
    }
    if (config.seed_from_config) {
        return;
    }
    if (const char* env = std::getenv("JOINTGAP_SEED")) {
        config.seed = parse_seed(env, "JOINTGAP_SEED");
    }
}

std::filesystem::path ensure_output_dir(const std::string& dir) {
    std::filesystem::path path(dir);
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    }
    return path;
}

RobotModel load_model_or_fail(const RunConfig& config) {
    if (config.model_path.empty()) {
        throw ValidationError("no model file given (use --model or the config file)");
    }
    return jointgap::load_robot_model(config.model_path);
}

std::vector<double> resolve_targets(const RunConfig& config, const RobotModel& model) {
    if (config.targets.empty()) {
        return jointgap::zero_configuration(model);  // the home-to-zero step
    }
    return config.targets;
}

int cmd_step(const RunConfig& config) {
    const RobotModel model = load_model_or_fail(config);
    jointgap::StepExperiment experiment;
    experiment.targets = resolve_targets(config, model);
    experiment.duration = config.duration;
    experiment.dt = config.dt.value_or(model.dt_default);

    const ControllerVariant variant = jointgap::variant_from_name(config.variant);
    const jointgap::Trajectory traj =
        jointgap::run_step_response(model, variant, experiment, config.pid_gains);

    const auto out = ensure_output_dir(config.output_dir);
    jointgap::write_trajectory_csv(traj, (out / "trajectory.csv").string());
    jointgap::write_velocities_csv(traj, (out / "velocities.csv").string());
    std::cout << "wrote " << (out / "trajectory.csv").string() << " and "
              << (out / "velocities.csv").string() << " (" << traj.size() << " samples)\n";
    return 0;
}

struct GapArgs {
    std::string reference_csv;
    std::string test_csv;
    std::string render_path;
    std::string target_list;
    double eps = jointgap::kDefaultSettleEps;
    double window = jointgap::kDefaultSettleWindow;
    std::string label = "test";
    std::string output_dir = ".";
};

int cmd_gap(const GapArgs& args) {
    if (!args.render_path.empty()) {
        const jointgap::GapReport report = jointgap::read_gap_report(args.render_path);
        std::cout << jointgap::render_gap_table(report, args.label);
        return 0;
    }
    if (args.reference_csv.empty() || args.test_csv.empty()) {
        throw ValidationError("gap needs a reference and a test trajectory CSV");
    }
    const jointgap::Trajectory reference = jointgap::read_trajectory_csv(args.reference_csv);
    const jointgap::Trajectory test = jointgap::read_trajectory_csv(args.test_csv);

    jointgap::SettleParams settle;
    settle.eps = args.eps;
    settle.window = args.window;
    if (!args.target_list.empty()) {
        settle.reference = parse_double_list(args.target_list, "--target");
    } else {
        // Default settle reference: where the reference trajectory ended.
        settle.reference.resize(reference.dof);
        for (std::size_t d = 0; d < reference.dof; ++d) {
            settle.reference[d] = reference.position(reference.size() - 1, d);
        }
    }

    const jointgap::GapReport report = jointgap::accumulated_error(reference, test, settle);
    const auto out = ensure_output_dir(args.output_dir);
    jointgap::write_gap_report(report, (out / "gap_report.json").string());
    jointgap::write_error_curves_csv(report, (out / "error_curves.csv").string());
    std::cout << jointgap::render_gap_table(report, args.label);
    return 0;
}

int cmd_violations(const std::string& trajectory_csv, const RunConfig& config) {
    const RobotModel model = load_model_or_fail(config);
    const jointgap::Trajectory traj = jointgap::read_trajectory_csv(trajectory_csv);
    const jointgap::ViolationReport report = jointgap::velocity_violations(traj, model);

    const auto out = ensure_output_dir(config.output_dir);
    jointgap::write_violation_report(report, (out / "violations.json").string());
    // Violations are findings, not errors: always exit 0 here.
    std::size_t total = 0;
    for (const auto& v : report.per_dof) {
        total += v.count;
    }
    std::cout << (report.any_violation ? "violations found" : "no violations") << " ("
              << total << " samples over limit)\n";
    return 0;
}

int cmd_train(const RunConfig& config) {
    const RobotModel model = load_model_or_fail(config);
    const ControllerVariant variant = jointgap::variant_from_name(config.variant);

    jointgap::TrainConfig train = config.train;
    train.seed = config.seed;
    jointgap::Env env(model, variant, config.horizon, config.dt.value_or(model.dt_default),
                      config.action_scaling, config.pid_gains);
    const jointgap::TrainResult result = jointgap::cem_train(env, train);

    const auto out = ensure_output_dir(config.output_dir);
    jointgap::write_policy(result.policy, (out / "policy.json").string());
    jointgap::write_history_csv(result.history, (out / "history.csv").string());

    const double final_best = result.history.records.empty()
                                  ? jointgap::evaluate_policy(result.policy, env, 1, train.seed)
                                  : result.history.records.back().best;
    std::cout << "final best return: " << jointgap::format_full(final_best) << "\n";

    // Endpoint of the deterministic rollout of the best policy; the rollout
    // command reports the same quantity for cross-checking.
    const jointgap::Trajectory traj = jointgap::rollout_policy(
        result.policy, model, variant, config.horizon, config.dt.value_or(model.dt_default),
        config.action_scaling, config.pid_gains, config.seed);
    double end_abs_sum = 0.0;
    for (std::size_t d = 0; d < traj.dof; ++d) {
        end_abs_sum += std::fabs(traj.position(traj.size() - 1, d));
    }
    std::cout << "final sum |q|: " << jointgap::format_full(end_abs_sum) << "\n";
    return 0;
}

int cmd_rollout(const std::string& policy_path, const RunConfig& config) {
    const RobotModel model = load_model_or_fail(config);
    const ControllerVariant variant = jointgap::variant_from_name(config.variant);
    const jointgap::Policy policy = jointgap::read_policy(policy_path);

    const jointgap::Trajectory traj = jointgap::rollout_policy(
        policy, model, variant, config.horizon, config.dt.value_or(model.dt_default),
        config.action_scaling, config.pid_gains, config.seed);

    const auto out = ensure_output_dir(config.output_dir);
    jointgap::write_trajectory_csv(traj, (out / "trajectory.csv").string());

    double end_abs_sum = 0.0;
    for (std::size_t d = 0; d < traj.dof; ++d) {
        end_abs_sum += std::fabs(traj.position(traj.size() - 1, d));
    }
    std::cout << "final sum |q|: " << jointgap::format_full(end_abs_sum) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint-space control pipelines and sim-to-real gap evaluation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string model_path;
    std::string variant;
    std::string output_dir;
    std::uint64_t seed = 0;
    std::string kp_list, ki_list, kd_list;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run configuration JSON");
        cmd->add_option("--model", model_path, "robot model JSON");
        cmd->add_option("--variant", variant, "controller pipeline: gym_pd, sim_pd, ros_pid");
        cmd->add_option("--out", output_dir, "output directory");
        cmd->add_option("--seed", seed, "RNG seed (overrides config and JOINTGAP_SEED)");
        cmd->add_option("--kp", kp_list, "PID k_p, comma-separated per joint");
        cmd->add_option("--ki", ki_list, "PID k_i, comma-separated per joint");
        cmd->add_option("--kd", kd_list, "PID k_d, comma-separated per joint");
    };

    // step
    CLI::App* step = app.add_subcommand("step", "run a simultaneous step-input experiment");
    std::string targets_list;
    double duration = 0.0;
    double dt = 0.0;
    add_common(step);
    step->add_option("--targets", targets_list, "step targets, comma-separated rad");
    step->add_option("--duration", duration, "experiment duration, s");
    step->add_option("--dt", dt, "simulation timestep, s");

    // gap
    CLI::App* gap = app.add_subcommand("gap", "accumulated error between two trajectories");
    GapArgs gap_args;
    gap->add_option("reference", gap_args.reference_csv, "reference trajectory CSV");
    gap->add_option("test", gap_args.test_csv, "test trajectory CSV");
    gap->add_option("--render", gap_args.render_path,
                    "render a stored gap_report.json instead of computing");
    gap->add_option("--eps", gap_args.eps, "settle band, rad");
    gap->add_option("--window", gap_args.window, "settle window, s");
    gap->add_option("--target", gap_args.target_list,
                    "settle reference, comma-separated rad (default: last reference sample)");
    gap->add_option("--label", gap_args.label, "row label for the rendered table");
    gap->add_option("--out", gap_args.output_dir, "output directory");

    // violations
    CLI::App* violations =
        app.add_subcommand("violations", "velocity-limit violation report for a trajectory");
    std::string violations_csv;
    violations->add_option("trajectory", violations_csv, "trajectory CSV")->required();
    add_common(violations);

    // train
    CLI::App* train = app.add_subcommand("train", "train the home-to-zero policy with CEM");
    std::size_t iterations = 0, population = 0, episodes = 0, horizon = 0;
    double elite_fraction = 0.0, sigma0 = 0.0, sigma_floor = 0.0, action_scaling = 0.0;
    add_common(train);
    train->add_option("--iterations", iterations, "CEM iterations");
    train->add_option("--population", population, "population size");
    train->add_option("--elite-fraction", elite_fraction, "elite fraction in (0,1)");
    train->add_option("--sigma0", sigma0, "initial sampling stddev");
    train->add_option("--sigma-floor", sigma_floor, "stddev floor");
    train->add_option("--episodes", episodes, "episodes per evaluation");
    train->add_option("--horizon", horizon, "episode length, steps");
    train->add_option("--action-scaling", action_scaling, "max per-step target delta, rad");
    train->add_option("--dt", dt, "simulation timestep, s");

    // rollout
    CLI::App* rollout = app.add_subcommand("rollout", "closed-loop rollout of a saved policy");
    std::string policy_path;
    rollout->add_option("policy", policy_path, "policy JSON")->required();
    add_common(rollout);
    rollout->add_option("--horizon", horizon, "episode length, steps");
    rollout->add_option("--action-scaling", action_scaling, "max per-step target delta, rad");
    rollout->add_option("--dt", dt, "simulation timestep, s");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        CLI::App* active = app.get_subcommands().front();
        if (active == gap) {
            // gap works purely on its input files; no config merging.
            return cmd_gap(gap_args);
        }

        RunConfig config;
        if (!config_path.empty()) {
            config = load_run_config(config_path);
        }
        auto given = [&](const char* flag) { return active->count(flag) > 0; };

        if (given("--model")) {
            config.model_path = model_path;
        }
        if (given("--variant")) {
            config.variant = variant;
        }
        if (given("--out")) {
            config.output_dir = output_dir;
        }
        resolve_seed(config, given("--seed"), seed);
        if (given("--kp") || given("--ki") || given("--kd")) {
            if (!(given("--kp") && given("--ki") && given("--kd"))) {
                throw ValidationError("--kp, --ki, and --kd must be given together");
            }
            PidGains gains;
            gains.k_p = parse_double_list(kp_list, "--kp");
            gains.k_i = parse_double_list(ki_list, "--ki");
            gains.k_d = parse_double_list(kd_list, "--kd");
            config.pid_gains = std::move(gains);
        }

        if (active == step) {
            if (given("--targets")) {
                config.targets = parse_double_list(targets_list, "--targets");
            }
            if (given("--duration")) {
                config.duration = duration;
            }
            if (given("--dt")) {
                config.dt = dt;
            }
            return cmd_step(config);
        }
        if (active == violations) {
            return cmd_violations(violations_csv, config);
        }
        if (active == train) {
            if (given("--iterations")) {
                config.train.iterations = iterations;
            }
            if (given("--population")) {
                config.train.population = population;
            }
            if (given("--elite-fraction")) {
                config.train.elite_fraction = elite_fraction;
            }
            if (given("--sigma0")) {
                config.train.initial_stddev = sigma0;
            }
            if (given("--sigma-floor")) {
                config.train.stddev_floor = sigma_floor;
            }
            if (given("--episodes")) {
                config.train.episodes = episodes;
            }
            if (given("--horizon")) {
                config.horizon = horizon;
            }
            if (given("--action-scaling")) {
                config.action_scaling = action_scaling;
            }
            if (given("--dt")) {
                config.dt = dt;
            }
            return cmd_train(config);
        }
        if (active == rollout) {
            if (given("--horizon")) {
                config.horizon = horizon;
            }
            if (given("--action-scaling")) {
                config.action_scaling = action_scaling;
            }
            if (given("--dt")) {
                config.dt = dt;
            }
            return cmd_rollout(policy_path, config);
        }
        throw ValidationError("no subcommand selected");
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
