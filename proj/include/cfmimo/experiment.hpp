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
#include <vector>

#include "cfmimo/chest.hpp"
#include "cfmimo/config.hpp"

namespace cfmimo::expcli {

/// Sorted per-user values (one row per user per realization) with
/// nearest-rank percentile accessors.
struct CdfTable {
    std::vector<double> values;        // ascending
    std::vector<std::uint64_t> seeds;  // realization seed per row

    std::size_t size() const { return values.size(); }
    /// Nearest-rank percentile, p in (0, 100].
    double percentile(double p) const;
    double median() const { return percentile(50.0); }
    /// 95%-outage level: the 5th percentile.
    double outage95() const { return percentile(5.0); }
};

CdfTable make_cdf_table(std::vector<std::pair<double, std::uint64_t>> rows);

struct RunResult {
    CdfTable throughput;
    CdfTable energy_eff;  // one row per realization; uplink runs only
    std::size_t realizations_done = 0;
    std::size_t solver_failures = 0;
    bool failure_flag = false;  // > 1% of realizations failed
    std::string resolved_config;
    std::string summary_text;
    ExperimentConfig config;
};

/// Sweeps n_realizations network/pilot realizations of the configured
/// system, applies the configured power control and aggregates per-user
/// throughput (and uplink energy efficiency). Deterministic under base_seed;
/// per-realization solver failures are counted and skipped.
RunResult run_experiment(const ExperimentConfig& cfg);

/// CSV with columns value,empirical_cdf,system,power_control,direction,seed.
void emit_csv(const CdfTable& table, const ExperimentConfig& cfg, const std::string& path);

/// Writes throughput.csv (+ energy_efficiency.csv for uplink),
/// resolved_config.ini and summary.txt under out_dir.
void write_run_outputs(const RunResult& result, const std::string& out_dir);

/// Baseline estimator evaluated through the same closed-form machinery
/// (identical to LMMSE under orthonormal pilots).
chest::LmmseBank suboptimal_estimation_mode(const netgen::LargeScale& ls,
                                            const pilots::PilotBook& book, double rho_p);

}  // namespace cfmimo::expcli
