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

#include "jointgap/model.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "jointgap/errors.hpp"

namespace jointgap {

namespace {

using nlohmann::json;

// 1-based in messages to match the report convention.
std::string joint_label(std::size_t index, const std::string& name) {
    std::ostringstream os;
    os << "joint " << (index + 1);
    if (!name.empty()) {
        os << " ('" << name << "')";
    }
    return os.str();
}

void require_finite(double value, const std::string& where) {
    if (!std::isfinite(value)) {
        throw ValidationError("non-finite value in " + where);
    }
}

double get_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) {
        throw ValidationError("missing field '" + std::string(key) + "' in " + where);
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
        throw ValidationError("field '" + std::string(key) + "' in " + where +
                              " must be a number");
    }
    const double d = v.get<double>();
    require_finite(d, where + "." + key);
    return d;
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& item : obj.items()) {
        if (allowed.find(item.key()) == allowed.end()) {
            throw ValidationError("unknown field '" + item.key() + "' in " + where);
        }
    }
}

}  // namespace

void validate_robot_model(const RobotModel& model) {
    if (model.joints.empty()) {
        throw ValidationError("model has no joints");
    }
    if (model.home.size() != model.joints.size()) {
        throw ValidationError("home has " + std::to_string(model.home.size()) +
                              " entries for " + std::to_string(model.joints.size()) +
                              " joints");
    }
    if (!(model.dt_default > 0.0) || !std::isfinite(model.dt_default)) {
        throw ValidationError("dt_default must be a positive finite number");
    }

    std::set<std::string> names;
    for (std::size_t i = 0; i < model.joints.size(); ++i) {
        const JointSpec& j = model.joints[i];
        const std::string label = joint_label(i, j.name);
        if (j.name.empty()) {
            throw ValidationError(label + ": empty name");
        }
        if (!names.insert(j.name).second) {
            throw ValidationError(label + ": duplicate name");
        }
        for (double v : {j.q_min, j.q_max, j.qd_max, j.effort_max, j.stiffness, j.damping,
                         j.inertia, j.viscous_friction, model.home[i]}) {
            require_finite(v, label);
        }
        if (!(j.q_min < j.q_max)) {
            throw ValidationError(label + ": q_min must be < q_max");
        }
        if (!(j.qd_max > 0.0)) {
            throw ValidationError(label + ": qd_max must be > 0");
        }
        if (!(j.effort_max > 0.0)) {
            throw ValidationError(label + ": effort_max must be > 0");
        }
        if (!(j.inertia > 0.0)) {
            throw ValidationError(label + ": inertia must be > 0");
        }
        if (j.stiffness < 0.0) {
            throw ValidationError(label + ": stiffness must be >= 0");
        }
        if (j.damping < 0.0) {
            throw ValidationError(label + ": damping must be >= 0");
        }
        if (j.viscous_friction < 0.0) {
            throw ValidationError(label + ": viscous_friction must be >= 0");
        }
        if (model.home[i] < j.q_min || model.home[i] > j.q_max) {
            throw ValidationError(label + ": home outside [q_min, q_max]");
        }
    }
}

RobotModel load_robot_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open model file '" + path + "'");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("model file '" + path + "' is not valid JSON: " + e.what());
    }

    if (!doc.is_object()) {
        throw ValidationError("model file '" + path + "' must hold a JSON object");
    }
    reject_unknown_keys(doc, {"dt_default", "joints"}, "model");
    if (!doc.contains("joints") || !doc.at("joints").is_array()) {
        throw ValidationError("model file '" + path + "' needs a 'joints' array");
    }

    RobotModel model;
    model.dt_default = get_number(doc, "dt_default", "model");

    static const std::set<std::string> kJointKeys = {
        "name",      "q_min",   "q_max",   "qd_max",           "effort_max",
        "stiffness", "damping", "inertia", "viscous_friction", "home"};

    std::size_t index = 0;
    for (const json& entry : doc.at("joints")) {
        const std::string where = "joint " + std::to_string(index + 1);
        if (!entry.is_object()) {
            throw ValidationError(where + ": must be an object");
        }
        reject_unknown_keys(entry, kJointKeys, where);
        if (!entry.contains("name") || !entry.at("name").is_string()) {
            throw ValidationError(where + ": needs a string 'name'");
        }
        JointSpec j;
        j.name = entry.at("name").get<std::string>();
        j.q_min = get_number(entry, "q_min", where);
        j.q_max = get_number(entry, "q_max", where);
        j.qd_max = get_number(entry, "qd_max", where);
        j.effort_max = get_number(entry, "effort_max", where);
        j.stiffness = get_number(entry, "stiffness", where);
        j.damping = get_number(entry, "damping", where);
        j.inertia = get_number(entry, "inertia", where);
        j.viscous_friction = get_number(entry, "viscous_friction", where);
        model.home.push_back(get_number(entry, "home", where));
        model.joints.push_back(std::move(j));
        ++index;
    }

    validate_robot_model(model);
    return model;
}

void save_robot_model(const RobotModel& model, const std::string& path) {
    validate_robot_model(model);
    json doc;
    doc["dt_default"] = model.dt_default;
    json joints = json::array();
    for (std::size_t i = 0; i < model.joints.size(); ++i) {
        const JointSpec& j = model.joints[i];
        json entry;
        entry["name"] = j.name;
        entry["q_min"] = j.q_min;
        entry["q_max"] = j.q_max;
        entry["qd_max"] = j.qd_max;
        entry["effort_max"] = j.effort_max;
        entry["stiffness"] = j.stiffness;
        entry["damping"] = j.damping;
        entry["inertia"] = j.inertia;
        entry["viscous_friction"] = j.viscous_friction;
        entry["home"] = model.home[i];
        joints.push_back(std::move(entry));
    }
    doc["joints"] = std::move(joints);

    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write model file '" + path + "'");
    }
    out << doc.dump(2) << "\n";
    if (!out) {
        throw IoError("failed writing model file '" + path + "'");
    }
}

std::vector<double> zero_configuration(const RobotModel& model) {
    for (std::size_t i = 0; i < model.joints.size(); ++i) {
        const JointSpec& j = model.joints[i];
        if (j.q_min > 0.0 || j.q_max < 0.0) {
            throw ValidationError(joint_label(i, j.name) +
                                  ": zero position outside [q_min, q_max]");
        }
    }
    return std::vector<double>(model.joints.size(), 0.0);
}

}  // namespace jointgap
