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

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cfmimo/chest.hpp"
#include "cfmimo/experiment.hpp"
#include "cfmimo/mcval.hpp"
#include "cfmimo/perf.hpp"
#include "cfmimo/pilots.hpp"
#include "cfmimo/power.hpp"
#include "cfmimo/rng.hpp"

namespace {

using namespace cfmimo;

struct Overrides {
    std::uint64_t seed = 0;
    bool has_seed = false;
    std::size_t realizations = 0;
    int threads = 0;
};

void apply_overrides(expcli::ExperimentConfig& cfg, const Overrides& ov) {
    if (ov.has_seed) cfg.base_seed = ov.seed;
    if (ov.realizations > 0) cfg.n_realizations = ov.realizations;
    if (ov.threads > 0) cfg.threads = ov.threads;
}

int cmd_run(const std::string& config_path, const Overrides& ov, const std::string& out_dir) {
    expcli::ExperimentConfig cfg = expcli::load_config_file(config_path);
    apply_overrides(cfg, ov);
    const expcli::RunResult res = expcli::run_experiment(cfg);
    expcli::write_run_outputs(res, out_dir);
    std::cout << res.summary_text;
    std::cout << "outputs written to " << out_dir << "\n";
    return res.failure_flag ? 2 : 0;
}

// A compact correctness pass: moment lemmas, term-level statistics and
// closed-form vs empirical SINR agreement on a small network.
int cmd_validate(std::size_t n_samples, std::uint64_t seed) {
    const arma::uword M = 8, K = 4, tau = 6;
    const netgen::Geometry geom = netgen::place_network(M, K, 150.0, seed);
    netgen::PropagationParams prop;
    const netgen::LargeScale ls =
        netgen::build_large_scale(geom, prop, netgen::ShadowingMode::uncorrelated, seed);
    const double noise = netgen::noise_power_w(prop);
    const netgen::PowerBudget budget = netgen::make_power_budget(0.02, 0.02, 0.2, noise);
    const pilots::PilotBook book = pilots::random_pilot_book(tau, K, seed);
    const chest::LmmseBank bank = chest::build_lmmse_bank(ls, book, budget.rho_p);

    int fails = 0;
    std::cout << "validate: M=" << M << " K=" << K << " tau=" << tau << ", " << n_samples
              << " draws\n";

    const mcval::MomentReport rep = mcval::moment_checks(bank, ls, book, budget.rho_p,
                                                         std::max<std::size_t>(n_samples, 10000),
                                                         derive_seed(seed, 21));
    std::cout << rep.to_text();

    perf::UplinkPower up;
    up.eta = arma::vec(K, arma::fill::value(0.8));
    const arma::uword k = 1;
    const mcval::TermEstimates terms = mcval::empirical_uplink_terms(
        ls, book, bank, budget.rho_u, up, k, n_samples, derive_seed(seed, 22));
    const McEstimate emp = mcval::empirical_sinr(terms);
    const double cf = perf::uplink_sinr_cf(ls, book, bank, budget.rho_u, up, k);
    const double rel = std::abs(cf - emp.mean) / cf;
    const double tol = std::max(0.02, 4.0 * emp.std_error / cf);
    std::printf("uplink SINR user %llu: closed form %.6e, empirical %.6e (rel %.4f, tol %.4f) %s\n",
                (unsigned long long)k, cf, emp.mean, rel, tol, rel < tol ? "OK" : "FAIL");
    if (rel >= tol) fails++;

    perf::DownlinkPower dp;
    dp.eta = 1.0 / (double(K) * bank.gamma);
    const mcval::TermEstimates dterms = mcval::empirical_downlink_terms(
        ls, book, bank, budget.rho_d, dp, k, n_samples, derive_seed(seed, 23));
    const McEstimate demp = mcval::empirical_sinr(dterms);
    const double dcf = perf::downlink_sinr_cf(ls, book, bank, budget.rho_d, dp, k);
    const double drel = std::abs(dcf - demp.mean) / dcf;
    const double dtol = std::max(0.02, 4.0 * demp.std_error / dcf);
    std::printf("downlink SINR user %llu: closed form %.6e, empirical %.6e (rel %.4f, tol %.4f) %s\n",
                (unsigned long long)k, dcf, demp.mean, drel, dtol, drel < dtol ? "OK" : "FAIL");
    if (drel >= dtol) fails++;

    std::cout << (fails ? "validation FAILED\n" : "validation passed\n");
    return fails ? 1 : 0;
}

struct GridAxis {
    std::string section, key;
    std::vector<std::string> values;
};

GridAxis parse_axis(const std::string& spec) {
    const auto eq = spec.find('=');
    const auto dot = spec.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
        throw std::runtime_error("bad --grid spec (want section.key=v1,v2): " + spec);
    GridAxis ax;
    ax.section = spec.substr(0, dot);
    ax.key = spec.substr(dot + 1, eq - dot - 1);
    std::string rest = spec.substr(eq + 1);
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) ax.values.push_back(item);
    if (ax.values.empty()) throw std::runtime_error("empty --grid value list: " + spec);
    return ax;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& grid_specs,
              const Overrides& ov, const std::string& out_dir) {
    const expcli::ExperimentConfig base = expcli::load_config_file(config_path);
    std::vector<GridAxis> axes;
    for (const auto& g : grid_specs) axes.push_back(parse_axis(g));

    std::size_t combos = 1;
    for (const auto& ax : axes) combos *= ax.values.size();
    int rc = 0;
    for (std::size_t c = 0; c < combos; c++) {
        expcli::ExperimentConfig cfg = base;
        std::size_t rem = c;
        std::string label;
        for (const auto& ax : axes) {
            const std::string v = ax.values[rem % ax.values.size()];
            rem /= ax.values.size();
            expcli::set_config_key(cfg, ax.section, ax.key, v);
            label += "_" + ax.key + "-" + v;
        }
        apply_overrides(cfg, ov);
        expcli::validate(cfg);
        char idx[16];
        std::snprintf(idx, sizeof(idx), "combo_%03zu", c);
        const std::string dir = out_dir + "/" + idx + label;
        std::cout << "=== " << idx << label << "\n";
        const expcli::RunResult res = expcli::run_experiment(cfg);
        expcli::write_run_outputs(res, dir);
        std::cout << res.summary_text;
        if (res.failure_flag) rc = 2;
    }
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cell-free massive MIMO IoT network simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    Overrides ov;
    std::uint64_t seed_opt = 0;
    std::size_t samples = 200000;
    std::vector<std::string> grid_specs;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out-dir", out_dir, "output directory");
        sub->add_option("--realizations", ov.realizations, "override n_realizations");
        sub->add_option("--threads", ov.threads, "worker threads");
        sub->add_option_function<std::uint64_t>(
            "--seed", [&](const std::uint64_t& s) { ov.seed = s; ov.has_seed = true; },
            "override base_seed");
    };

    CLI::App* run = app.add_subcommand("run", "run one experiment from a config file");
    run->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
    add_common(run);

    CLI::App* val = app.add_subcommand("validate", "run the Monte Carlo validation suite");
    val->add_option("--samples", samples, "realizations per estimate");
    val->add_option("--seed", seed_opt, "validation seed");

    CLI::App* sweep = app.add_subcommand("sweep", "grid sweep over config overrides");
    sweep->add_option("config", config_path, "base config file")
        ->required()
        ->check(CLI::ExistingFile);
    sweep->add_option("--grid", grid_specs, "axis spec section.key=v1,v2 (repeatable)");
    add_common(sweep);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, ov, out_dir);
        if (val->parsed()) return cmd_validate(samples, seed_opt ? seed_opt : 1);
        if (sweep->parsed()) return cmd_sweep(config_path, grid_specs, ov, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
