// cfmimo — system-level simulator for cell-free massive MIMO IoT networks
// Copyright (c) 2026 cfmimo contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>

#include "cfmimo/pilots.hpp"
#include "cfmimo/propagation.hpp"

namespace cfmimo::expcli {

enum class SystemKind { cellfree_lmmse, cellfree_suboptimal, smallcell };
enum class PowerControl { max_power, maxmin, target_sinr, target_sinr_drop };
enum class Direction { uplink, downlink };

/// One experiment: a system/power-control pair swept over network
/// realizations. Defaults reproduce the IoT uplink setting (M=128, K=40,
/// tau=60, D=100 m, 20 mW, uncorrelated shadowing).
struct ExperimentConfig {
    SystemKind system = SystemKind::cellfree_lmmse;
    PowerControl power_control = PowerControl::maxmin;
    Direction direction = Direction::uplink;
    std::size_t n_realizations = 500;
    std::uint64_t base_seed = 1;
    std::string tag = "run";
    int threads = 1;

    arma::uword n_aps = 128;
    arma::uword n_users = 40;
    arma::uword tau = 60;
    double tau_c = 200.0;  // coherence interval (symbols); not pinned by the settings table
    double area_side_m = 100.0;
    double ap_height_m = 15.0;
    double user_height_m = 1.65;
    pilots::PilotKind pilot_kind = pilots::PilotKind::random_sphere;

    double pilot_power_w = 0.02;
    double uplink_power_w = 0.02;
    double downlink_power_w = 0.2;
    double target_sinr_db = 5.0;  // common target for power_control = target_sinr
    double drop_fraction = 0.05;
    double bisection_rel_tol = 1e-3;
    int bisection_max_iters = 60;
    double target_epsilon = 1e-4;
    int target_max_iters = 500;

    netgen::ShadowingMode shadowing = netgen::ShadowingMode::uncorrelated;
    netgen::PropagationParams propagation;
};

/// Applies one "section.key = value" assignment; throws on unknown keys or
/// malformed values.
void set_config_key(ExperimentConfig& cfg, const std::string& section, const std::string& key,
                    const std::string& value);

/// Parses the sectioned key-value format ('#' and ';' comments).
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

/// Canonical re-parseable dump of a configuration.
std::string resolved_text(const ExperimentConfig& cfg);

/// Full cross-field validation (enumeration combinations, tau < tau_c, ...).
void validate(const ExperimentConfig& cfg);

std::string to_string(SystemKind s);
std::string to_string(PowerControl p);
std::string to_string(Direction d);

}  // namespace cfmimo::expcli
