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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <doctest.h>

#include "jointgap/errors.hpp"
#include "test_util.hpp"

using namespace jointgap;

namespace {

RobotModel small_model(std::size_t dof) {
    RobotModel model;
    for (std::size_t i = 0; i < dof; ++i) {
        JointSpec j;
        j.name = "j" + std::to_string(i + 1);
        j.q_min = -1.0;
        j.q_max = 1.0;
        j.qd_max = 2.0;
        j.effort_max = 10.0;
        j.stiffness = 50.0;
        j.damping = 5.0;
        j.inertia = 1.0;
        j.viscous_friction = 0.1;
        model.joints.push_back(j);
        model.home.push_back(0.0);
    }
    model.dt_default = 1.0 / 60.0;
    return model;
}

std::string write_temp_model(const std::string& content, const std::string& name) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

}  // namespace

TEST_CASE("bundled example model loads with 7 joints named arm_1..arm_7") {
    const RobotModel model = load_robot_model(testutil::example_model_path());
    REQUIRE(model.dof() == 7);
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(model.joints[i].name == "arm_" + std::to_string(i + 1));
        CHECK(model.home[i] >= model.joints[i].q_min);
        CHECK(model.home[i] <= model.joints[i].q_max);
    }
    CHECK(model.dt_default == doctest::Approx(1.0 / 60.0));
}

TEST_CASE("inverted limits on joint 3 are rejected naming the joint") {
    RobotModel model = small_model(4);
    model.joints[2].q_min = 1.0;
    model.joints[2].q_max = -1.0;
    try {
        validate_robot_model(model);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("joint 3") != std::string::npos);
    }
}

TEST_CASE("home outside limits is rejected naming home and the joint") {
    RobotModel model = small_model(3);
    model.home[1] = model.joints[1].q_max + 0.1;
    try {
        validate_robot_model(model);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        CHECK(what.find("home") != std::string::npos);
        CHECK(what.find("joint 2") != std::string::npos);
    }
}

TEST_CASE("zero_configuration") {
    SUBCASE("7-joint model spanning zero") {
        const RobotModel model = load_robot_model(testutil::example_model_path());
        const std::vector<double> zero = zero_configuration(model);
        CHECK(zero == std::vector<double>(7, 0.0));
    }
    SUBCASE("2-joint model") {
        CHECK(zero_configuration(small_model(2)) == std::vector<double>{0.0, 0.0});
    }
    SUBCASE("joint 5 not spanning zero") {
        RobotModel model = small_model(6);
        model.joints[4].q_min = 0.2;
        model.home[4] = 0.5;
        try {
            zero_configuration(model);
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("joint 5") != std::string::npos);
        }
    }
}

TEST_CASE("save/load round-trip is exact field for field") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.01, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        RobotModel model;
        const std::size_t dof = 1 + rng() % 8;
        for (std::size_t i = 0; i < dof; ++i) {
            JointSpec j;
            j.name = "joint_" + std::to_string(i + 1);
            j.q_max = u(rng);
            j.q_min = -u(rng);
            j.qd_max = u(rng);
            j.effort_max = u(rng) * 10.0;
            j.stiffness = u(rng) * 30.0;
            j.damping = u(rng) * 3.0;
            j.inertia = u(rng);
            j.viscous_friction = u(rng) * 0.1;
            model.joints.push_back(j);
            std::uniform_real_distribution<double> h(model.joints[i].q_min,
                                                     model.joints[i].q_max);
            model.home.push_back(h(rng));
        }
        model.dt_default = u(rng) * 0.01;

        const std::string path = write_temp_model("", "jointgap_roundtrip.json");
        save_robot_model(model, path);
        const RobotModel loaded = load_robot_model(path);

        REQUIRE(loaded.dof() == model.dof());
        CHECK(loaded.dt_default == model.dt_default);
        CHECK(loaded.home == model.home);
        for (std::size_t i = 0; i < dof; ++i) {
            CHECK(loaded.joints[i].name == model.joints[i].name);
            CHECK(loaded.joints[i].q_min == model.joints[i].q_min);
            CHECK(loaded.joints[i].q_max == model.joints[i].q_max);
            CHECK(loaded.joints[i].qd_max == model.joints[i].qd_max);
            CHECK(loaded.joints[i].effort_max == model.joints[i].effort_max);
            CHECK(loaded.joints[i].stiffness == model.joints[i].stiffness);
            CHECK(loaded.joints[i].damping == model.joints[i].damping);
            CHECK(loaded.joints[i].inertia == model.joints[i].inertia);
            CHECK(loaded.joints[i].viscous_friction == model.joints[i].viscous_friction);
        }
        std::remove(path.c_str());
    }
}

TEST_CASE("schema violations are hard errors") {
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_robot_model("/nonexistent/model.json"), IoError);
    }
    SUBCASE("unknown top-level key") {
        const std::string path = write_temp_model(
            R"({"dt_default": 0.01, "joints": [], "extra": 1})", "jointgap_unknown.json");
        CHECK_THROWS_AS(load_robot_model(path), ValidationError);
        std::remove(path.c_str());
    }
    SUBCASE("unknown joint key") {
        const std::string path = write_temp_model(
            R"({"dt_default": 0.01, "joints": [{"name": "a", "q_min": -1, "q_max": 1,
                "qd_max": 1, "effort_max": 1, "stiffness": 1, "damping": 1,
                "inertia": 1, "viscous_friction": 0, "home": 0, "typo": 3}]})",
            "jointgap_unknown_joint.json");
        try {
            load_robot_model(path);
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("typo") != std::string::npos);
        }
        std::remove(path.c_str());
    }
    SUBCASE("missing joint field") {
        const std::string path = write_temp_model(
            R"({"dt_default": 0.01, "joints": [{"name": "a", "q_min": -1, "q_max": 1,
                "qd_max": 1, "effort_max": 1, "stiffness": 1, "damping": 1,
                "inertia": 1, "home": 0}]})",
            "jointgap_missing_field.json");
        try {
            load_robot_model(path);
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("viscous_friction") != std::string::npos);
        }
        std::remove(path.c_str());
    }
    SUBCASE("wrong type") {
        const std::string path = write_temp_model(
            R"({"dt_default": "fast", "joints": []})", "jointgap_wrong_type.json");
        CHECK_THROWS_AS(load_robot_model(path), ValidationError);
        std::remove(path.c_str());
    }
}

TEST_CASE("randomized invariant fuzzing rejects each broken field") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        RobotModel model = small_model(1 + rng() % 5);
        const std::size_t joint = rng() % model.dof();
        switch (rng() % 7) {
            case 0:
                model.joints[joint].qd_max = 0.0;
                break;
            case 1:
                model.joints[joint].effort_max = -1.0;
                break;
            case 2:
                model.joints[joint].inertia = 0.0;
                break;
            case 3:
                model.joints[joint].stiffness = -0.5;
                break;
            case 4:
                model.joints[joint].q_min = model.joints[joint].q_max;
                break;
            case 5:
                model.home[joint] = model.joints[joint].q_min - 1.0;
                break;
            default:
                model.dt_default = 0.0;
                break;
        }
        CHECK_THROWS_AS(validate_robot_model(model), ValidationError);
    }
}
