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

#include "cfmimo/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cfmimo::expcli {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, const std::string& key) {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("config: bad number for " + key + ": " + v);
    return d;
}

std::uint64_t to_u64(const std::string& v, const std::string& key) {
    std::size_t used = 0;
    const unsigned long long d = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument("config: bad integer for " + key + ": " + v);
    return d;
}

[[noreturn]] void bad_enum(const std::string& key, const std::string& v) {
    throw std::invalid_argument("config: invalid value for " + key + ": " + v);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string to_string(SystemKind s) {
    switch (s) {
        case SystemKind::cellfree_lmmse: return "cellfree_lmmse";
        case SystemKind::cellfree_suboptimal: return "cellfree_suboptimal";
        case SystemKind::smallcell: return "smallcell";
    }
    return "?";
}

std::string to_string(PowerControl p) {
    switch (p) {
        case PowerControl::max_power: return "max_power";
        case PowerControl::maxmin: return "maxmin";
        case PowerControl::target_sinr: return "target_sinr";
        case PowerControl::target_sinr_drop: return "target_sinr_drop";
    }
    return "?";
}

std::string to_string(Direction d) {
    return d == Direction::uplink ? "uplink" : "downlink";
}

void set_config_key(ExperimentConfig& cfg, const std::string& section, const std::string& key,
                    const std::string& value) {
    const std::string id = section + "." + key;
    if (section == "experiment") {
        if (key == "system") {
            if (value == "cellfree_lmmse") cfg.system = SystemKind::cellfree_lmmse;
            else if (value == "cellfree_suboptimal") cfg.system = SystemKind::cellfree_suboptimal;
            else if (value == "smallcell") cfg.system = SystemKind::smallcell;
            else bad_enum(id, value);
        } else if (key == "power_control") {
            if (value == "max_power") cfg.power_control = PowerControl::max_power;
            else if (value == "maxmin") cfg.power_control = PowerControl::maxmin;
            else if (value == "target_sinr") cfg.power_control = PowerControl::target_sinr;
            else if (value == "target_sinr_drop") cfg.power_control = PowerControl::target_sinr_drop;
            else bad_enum(id, value);
        } else if (key == "direction") {
            if (value == "uplink") cfg.direction = Direction::uplink;
            else if (value == "downlink") cfg.direction = Direction::downlink;
            else bad_enum(id, value);
        } else if (key == "n_realizations") cfg.n_realizations = to_u64(value, id);
        else if (key == "base_seed") cfg.base_seed = to_u64(value, id);
        else if (key == "tag") cfg.tag = value;
        else if (key == "threads") cfg.threads = int(to_u64(value, id));
        else throw std::invalid_argument("config: unknown key " + id);
    } else if (section == "network") {
        if (key == "m") cfg.n_aps = arma::uword(to_u64(value, id));
        else if (key == "k") cfg.n_users = arma::uword(to_u64(value, id));
        else if (key == "tau") cfg.tau = arma::uword(to_u64(value, id));
        else if (key == "tau_c") cfg.tau_c = to_double(value, id);
        else if (key == "d") cfg.area_side_m = to_double(value, id);
        else if (key == "ap_height") cfg.ap_height_m = to_double(value, id);
        else if (key == "user_height") cfg.user_height_m = to_double(value, id);
        else if (key == "pilots") {
            if (value == "random") cfg.pilot_kind = pilots::PilotKind::random_sphere;
            else if (value == "orthonormal") cfg.pilot_kind = pilots::PilotKind::orthonormal;
            else bad_enum(id, value);
        } else throw std::invalid_argument("config: unknown key " + id);
    } else if (section == "power") {
        if (key == "pilot_w") cfg.pilot_power_w = to_double(value, id);
        else if (key == "uplink_w") cfg.uplink_power_w = to_double(value, id);
        else if (key == "downlink_w") cfg.downlink_power_w = to_double(value, id);
        else if (key == "target_sinr_db") cfg.target_sinr_db = to_double(value, id);
        else if (key == "drop_fraction") cfg.drop_fraction = to_double(value, id);
        else if (key == "bisection_rel_tol") cfg.bisection_rel_tol = to_double(value, id);
        else if (key == "bisection_max_iters") cfg.bisection_max_iters = int(to_u64(value, id));
        else if (key == "target_epsilon") cfg.target_epsilon = to_double(value, id);
        else if (key == "target_max_iters") cfg.target_max_iters = int(to_u64(value, id));
        else throw std::invalid_argument("config: unknown key " + id);
    } else if (section == "propagation") {
        auto& p = cfg.propagation;
        if (key == "carrier_freq_mhz") p.carrier_freq_mhz = to_double(value, id);
        else if (key == "sigma_sh_db") p.sigma_sh_db = to_double(value, id);
        else if (key == "d0") p.d0_m = to_double(value, id);
        else if (key == "d1") p.d1_m = to_double(value, id);
        else if (key == "d_decorr") p.d_decorr_m = to_double(value, id);
        else if (key == "delta") p.delta_mix = to_double(value, id);
        else if (key == "bandwidth_hz") p.bandwidth_hz = to_double(value, id);
        else if (key == "noise_figure_db") p.noise_figure_db = to_double(value, id);
        else if (key == "noise_temp_k") p.noise_temp_k = to_double(value, id);
        else if (key == "shadowing") {
            if (value == "correlated") cfg.shadowing = netgen::ShadowingMode::correlated;
            else if (value == "uncorrelated") cfg.shadowing = netgen::ShadowingMode::uncorrelated;
            else bad_enum(id, value);
        } else throw std::invalid_argument("config: unknown key " + id);
    } else {
        throw std::invalid_argument("config: unknown section [" + section + "]");
    }
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config: bad section header at line " +
                                            std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value at line " +
                                        std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw std::invalid_argument("config: key outside any section at line " +
                                        std::to_string(lineno));
        set_config_key(cfg, section, key, value);
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string resolved_text(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "[experiment]\n";
    os << "system = " << to_string(cfg.system) << "\n";
    os << "power_control = " << to_string(cfg.power_control) << "\n";
    os << "direction = " << to_string(cfg.direction) << "\n";
    os << "n_realizations = " << cfg.n_realizations << "\n";
    os << "base_seed = " << cfg.base_seed << "\n";
    os << "tag = " << cfg.tag << "\n";
    os << "threads = " << cfg.threads << "\n";
    os << "\n[network]\n";
    os << "m = " << cfg.n_aps << "\n";
    os << "k = " << cfg.n_users << "\n";
    os << "tau = " << cfg.tau << "\n";
    os << "tau_c = " << fmt(cfg.tau_c) << "\n";
    os << "d = " << fmt(cfg.area_side_m) << "\n";
    os << "ap_height = " << fmt(cfg.ap_height_m) << "\n";
    os << "user_height = " << fmt(cfg.user_height_m) << "\n";
    os << "pilots = "
       << (cfg.pilot_kind == pilots::PilotKind::random_sphere ? "random" : "orthonormal") << "\n";
    os << "\n[power]\n";
    os << "pilot_w = " << fmt(cfg.pilot_power_w) << "\n";
    os << "uplink_w = " << fmt(cfg.uplink_power_w) << "\n";
    os << "downlink_w = " << fmt(cfg.downlink_power_w) << "\n";
    os << "target_sinr_db = " << fmt(cfg.target_sinr_db) << "\n";
    os << "drop_fraction = " << fmt(cfg.drop_fraction) << "\n";
    os << "bisection_rel_tol = " << fmt(cfg.bisection_rel_tol) << "\n";
    os << "bisection_max_iters = " << cfg.bisection_max_iters << "\n";
    os << "target_epsilon = " << fmt(cfg.target_epsilon) << "\n";
    os << "target_max_iters = " << cfg.target_max_iters << "\n";
    os << "\n[propagation]\n";
    os << "carrier_freq_mhz = " << fmt(cfg.propagation.carrier_freq_mhz) << "\n";
    os << "sigma_sh_db = " << fmt(cfg.propagation.sigma_sh_db) << "\n";
    os << "d0 = " << fmt(cfg.propagation.d0_m) << "\n";
    os << "d1 = " << fmt(cfg.propagation.d1_m) << "\n";
    os << "d_decorr = " << fmt(cfg.propagation.d_decorr_m) << "\n";
    os << "delta = " << fmt(cfg.propagation.delta_mix) << "\n";
    os << "bandwidth_hz = " << fmt(cfg.propagation.bandwidth_hz) << "\n";
    os << "noise_figure_db = " << fmt(cfg.propagation.noise_figure_db) << "\n";
    os << "noise_temp_k = " << fmt(cfg.propagation.noise_temp_k) << "\n";
    os << "shadowing = "
       << (cfg.shadowing == netgen::ShadowingMode::correlated ? "correlated" : "uncorrelated")
       << "\n";
    return os.str();
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.n_realizations < 1) throw std::invalid_argument("config: n_realizations must be >= 1");
    if (cfg.n_aps < 1 || cfg.n_users < 1) throw std::invalid_argument("config: need m, k >= 1");
    if (!(double(cfg.tau) < cfg.tau_c)) throw std::invalid_argument("config: need tau < tau_c");
    if (!(cfg.area_side_m > 0.0)) throw std::invalid_argument("config: d must be positive");
    if (cfg.drop_fraction < 0.0 || cfg.drop_fraction >= 1.0)
        throw std::invalid_argument("config: drop_fraction must lie in [0,1)");
    if (cfg.threads < 1) throw std::invalid_argument("config: threads must be >= 1");
    if (cfg.direction == Direction::downlink &&
        (cfg.power_control == PowerControl::target_sinr ||
         cfg.power_control == PowerControl::target_sinr_drop))
        throw std::invalid_argument("config: target-SINR control is uplink only");
    if (cfg.system == SystemKind::smallcell &&
        (cfg.power_control == PowerControl::target_sinr ||
         cfg.power_control == PowerControl::target_sinr_drop))
        throw std::invalid_argument("config: target-SINR control is not defined for small cells");
    if (cfg.system == SystemKind::smallcell && cfg.n_aps < cfg.n_users)
        throw std::invalid_argument("config: small-cell runs need m >= k");
    if (cfg.pilot_kind == pilots::PilotKind::orthonormal && cfg.tau < cfg.n_users)
        throw std::invalid_argument("config: orthonormal pilots need tau >= k");
    // the remaining propagation checks live with netgen
    netgen::noise_power_w(cfg.propagation);
}

}  // namespace cfmimo::expcli
