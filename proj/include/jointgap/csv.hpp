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

#include <string>

#include "jointgap/dynamics.hpp"

namespace jointgap {

/// Locale-independent decimal formatting. `format_full` emits 17
/// significant digits, enough for exact double round-trips.
std::string format_full(double value);
std::string format_sig(double value, int significant_digits);

/// Locale-independent parse of a full field; throws ValidationError with
/// `where` in the message on garbage or trailing characters.
double parse_double(const std::string& field, const std::string& where);

/// Trajectory CSV wire format: header `t,q1,...,qN[,qd1,...,qdN]`, decimal
/// values, t strictly increasing. Velocities are optional on ingest; when
/// absent they are reconstructed by finite differences (central inside,
/// one-sided at the ends). Errors name the offending line.
Trajectory read_trajectory_csv(const std::string& path);

/// Writes t plus both q and qd blocks at full precision;
/// read(write(t)) == t exactly.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

/// Velocity-only view (header `t,qd1,...,qdN`), the Fig.-4-style artifact.
void write_velocities_csv(const Trajectory& traj, const std::string& path);

}  // namespace jointgap
