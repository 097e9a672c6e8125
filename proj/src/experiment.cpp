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

#include "cfmimo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cfmimo/geometry.hpp"
#include "cfmimo/mcval.hpp"
#include "cfmimo/perf.hpp"
#include "cfmimo/power.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo::expcli {

namespace {

struct RealizationOutcome {
    bool ok = false;
    std::string error;
    std::vector<double> throughputs;  // surviving users only
    double energy_eff = 0.0;
    bool has_ee = false;
    std::uint64_t seed = 0;
};

// Uplink power control on a prepared coefficient set. Returns (eta, active).
std::pair<arma::vec, arma::uvec> uplink_control(const ExperimentConfig& cfg,
                                                const perf::UplinkCoeffs& coeffs) {
    const arma::uword K = coeffs.g_sum.n_elem;
    const arma::uvec all = arma::regspace<arma::uvec>(0, K - 1);
    switch (cfg.power_control) {
        case PowerControl::max_power:
            return {arma::vec(K, arma::fill::ones), all};
        case PowerControl::maxmin: {
            power::BisectionSpec bs;
            bs.rel_tol = cfg.bisection_rel_tol;
            bs.max_iters = cfg.bisection_max_iters;
            return {power::uplink_maxmin(coeffs, bs).eta, all};
        }
        case PowerControl::target_sinr: {
            power::TargetSpec ts;
            ts.delta = arma::vec(K, arma::fill::value(std::pow(10.0, cfg.target_sinr_db / 10.0)));
            ts.epsilon = cfg.target_epsilon;
            ts.max_iters = cfg.target_max_iters;
            const power::TargetResult tr = power::target_sinr_iterate(coeffs, ts);
            if (!tr.converged) throw std::runtime_error("target_sinr did not converge");
            return {tr.eta, all};
        }
        case PowerControl::target_sinr_drop: {
            const power::DropResult dr = power::drop_and_retarget(
                coeffs, cfg.drop_fraction, cfg.target_epsilon, cfg.target_max_iters,
                cfg.bisection_rel_tol);
            return {dr.eta, dr.active_set};
        }
    }
    throw std::logic_error("uplink_control: unreachable");
}

RealizationOutcome run_one(const ExperimentConfig& cfg, std::size_t index) {
    RealizationOutcome out;
    out.seed = cfg.base_seed ^ std::uint64_t(index);
    try {
        const netgen::Geometry geom =
            netgen::place_network(cfg.n_aps, cfg.n_users, cfg.area_side_m, out.seed,
                                  cfg.ap_height_m, cfg.user_height_m);
        const netgen::LargeScale ls =
            netgen::build_large_scale(geom, cfg.propagation, cfg.shadowing, out.seed);
        const double noise_w = netgen::noise_power_w(cfg.propagation);
        const netgen::PowerBudget budget = netgen::make_power_budget(
            cfg.pilot_power_w, cfg.uplink_power_w, cfg.downlink_power_w, noise_w);
        const pilots::PilotBook book =
            cfg.pilot_kind == pilots::PilotKind::random_sphere
                ? pilots::random_pilot_book(cfg.tau, cfg.n_users, out.seed)
                : pilots::orthonormal_pilot_book(cfg.tau, cfg.n_users, out.seed);

        const bool uplink = cfg.direction == Direction::uplink;
        const double overhead = (cfg.system == SystemKind::smallcell) ? 2.0 * double(cfg.tau)
                                                                      : double(cfg.tau);
        const double bw = cfg.propagation.bandwidth_hz;

        arma::vec rates;
        arma::uvec active;
        arma::vec eta_for_ee;

        if (cfg.system == SystemKind::smallcell) {
            const arma::uvec serving = perf::assign_serving_aps(ls.beta);
            // pilot powers follow the data power, uplink convention
            const perf::SmallCellModel model =
                uplink ? perf::build_smallcell_uplink(ls, book, serving, budget.rho_u,
                                                      budget.rho_u, cfg.tau)
                       : perf::build_smallcell_downlink(ls, book, serving, budget.rho_d,
                                                        budget.rho_u, cfg.tau);
            arma::vec p(cfg.n_users, arma::fill::ones);
            if (cfg.power_control == PowerControl::maxmin) {
                power::BisectionSpec bs;
                bs.rel_tol = cfg.bisection_rel_tol;
                bs.max_iters = cfg.bisection_max_iters;
                p = power::smallcell_maxmin(model, bs).eta;
            }
            rates = perf::smallcell_rates(model, p);
            active = arma::regspace<arma::uvec>(0, cfg.n_users - 1);
            eta_for_ee = p;
        } else {
            const chest::LmmseBank bank =
                cfg.system == SystemKind::cellfree_lmmse
                    ? chest::build_lmmse_bank(ls, book, budget.rho_p)
                    : suboptimal_estimation_mode(ls, book, budget.rho_p);
            if (uplink) {
                const perf::UplinkCoeffs coeffs =
                    perf::build_uplink_coeffs(ls, book, bank, budget.rho_u);
                auto [eta, act] = uplink_control(cfg, coeffs);
                const arma::vec s = perf::sinr_all(coeffs, eta);
                rates.set_size(cfg.n_users);
                for (arma::uword k = 0; k < cfg.n_users; k++) rates[k] = perf::rate_from_sinr(s[k]);
                active = act;
                eta_for_ee = eta;
            } else {
                const power::ConeProblem cone =
                    power::build_cone_problem(ls, book, bank, budget.rho_d);
                arma::vec zeta = cone.zeta;
                if (cfg.power_control == PowerControl::maxmin) {
                    power::BisectionSpec bs;
                    bs.rel_tol = cfg.bisection_rel_tol;
                    bs.max_iters = cfg.bisection_max_iters;
                    zeta = power::downlink_maxmin(cone, bs).zeta;
                } else {
                    // full power, per-AP budget split evenly over users
                    for (arma::uword k = 0; k < cfg.n_users; k++)
                        for (arma::uword m = 0; m < cfg.n_aps; m++)
                            zeta[cone.index(m, k)] =
                                1.0 / std::sqrt(double(cfg.n_users) * bank.gamma(m, k));
                }
                const arma::vec s = power::cone_sinr_all(cone, zeta);
                rates.set_size(cfg.n_users);
                for (arma::uword k = 0; k < cfg.n_users; k++) rates[k] = perf::rate_from_sinr(s[k]);
                active = arma::regspace<arma::uvec>(0, cfg.n_users - 1);
            }
        }

        out.throughputs.reserve(active.n_elem);
        for (const arma::uword k : active)
            out.throughputs.push_back(perf::throughput_bps(rates[k], bw, overhead, cfg.tau_c));
        if (uplink) {
            const arma::vec r_act = rates.elem(active);
            const arma::vec e_act = eta_for_ee.elem(active);
            out.energy_eff = perf::energy_efficiency(r_act, e_act, cfg.uplink_power_w);
            out.has_ee = true;
        }
        out.ok = true;
    } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
    }
    return out;
}

}  // namespace

double CdfTable::percentile(double p) const {
    if (values.empty()) throw std::runtime_error("CdfTable: empty");
    if (!(p > 0.0) || p > 100.0) throw std::invalid_argument("CdfTable: percentile must be in (0,100]");
    const std::size_t n = values.size();
    std::size_t rank = std::size_t(std::ceil(p / 100.0 * double(n)));
    if (rank < 1) rank = 1;
    if (rank > n) rank = n;
    return values[rank - 1];
}

CdfTable make_cdf_table(std::vector<std::pair<double, std::uint64_t>> rows) {
    std::sort(rows.begin(), rows.end());
    CdfTable t;
    t.values.reserve(rows.size());
    t.seeds.reserve(rows.size());
    for (const auto& [v, s] : rows) {
        t.values.push_back(v);
        t.seeds.push_back(s);
    }
    return t;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    std::vector<RealizationOutcome> outcomes(cfg.n_realizations);

    const int n_threads = std::max(1, cfg.threads);
    if (n_threads == 1) {
        for (std::size_t i = 0; i < cfg.n_realizations; i++) outcomes[i] = run_one(cfg, i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (int t = 0; t < n_threads; t++) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < cfg.n_realizations;
                     i = next.fetch_add(1))
                    outcomes[i] = run_one(cfg, i);
            });
        }
        for (auto& th : pool) th.join();
    }

    RunResult res;
    res.config = cfg;
    res.resolved_config = resolved_text(cfg);
    std::vector<std::pair<double, std::uint64_t>> tp_rows, ee_rows;
    for (const auto& o : outcomes) {
        if (!o.ok) {
            res.solver_failures++;
            continue;
        }
        res.realizations_done++;
        for (const double v : o.throughputs) tp_rows.emplace_back(v, o.seed);
        if (o.has_ee) ee_rows.emplace_back(o.energy_eff, o.seed);
    }
    if (tp_rows.empty()) throw std::runtime_error("run_experiment: every realization failed");
    res.throughput = make_cdf_table(std::move(tp_rows));
    res.energy_eff = make_cdf_table(std::move(ee_rows));
    res.failure_flag =
        double(res.solver_failures) > 0.01 * double(cfg.n_realizations);

    std::ostringstream os;
    os << "experiment " << cfg.tag << ": " << to_string(cfg.system) << " / "
       << to_string(cfg.power_control) << " / " << to_string(cfg.direction) << "\n";
    os << "realizations: " << res.realizations_done << " ok, " << res.solver_failures
       << " failed" << (res.failure_flag ? " [FLAG: >1% failures]" : "") << "\n";
    os << "throughput rows: " << res.throughput.size() << "\n";
    char buf[128];
    std::snprintf(buf, sizeof(buf), "throughput median: %.6e bits/s\n", res.throughput.median());
    os << buf;
    std::snprintf(buf, sizeof(buf), "throughput 95%%-outage: %.6e bits/s\n",
                  res.throughput.outage95());
    os << buf;
    if (res.energy_eff.size()) {
        std::snprintf(buf, sizeof(buf), "energy efficiency median: %.6e bits/J\n",
                      res.energy_eff.median());
        os << buf;
    }
    res.summary_text = os.str();
    return res;
}

void emit_csv(const CdfTable& table, const ExperimentConfig& cfg, const std::string& path) {
    if (table.values.empty()) throw std::invalid_argument("emit_csv: empty table");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
    out << "value,empirical_cdf,system,power_control,direction,seed\n";
    const std::size_t n = table.values.size();
    char buf[96];
    for (std::size_t i = 0; i < n; i++) {
        std::snprintf(buf, sizeof(buf), "%.17e,%.17e", table.values[i],
                      double(i + 1) / double(n));
        out << buf << ',' << to_string(cfg.system) << ',' << to_string(cfg.power_control) << ','
            << to_string(cfg.direction) << ',' << table.seeds[i] << "\n";
    }
    if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

void write_run_outputs(const RunResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    emit_csv(result.throughput, result.config, out_dir + "/throughput.csv");
    if (result.energy_eff.size())
        emit_csv(result.energy_eff, result.config, out_dir + "/energy_efficiency.csv");
    std::ofstream cfg_out(out_dir + "/resolved_config.ini", std::ios::binary);
    cfg_out << result.resolved_config;
    std::ofstream sum_out(out_dir + "/summary.txt", std::ios::binary);
    sum_out << result.summary_text;
}

chest::LmmseBank suboptimal_estimation_mode(const netgen::LargeScale& ls,
                                            const pilots::PilotBook& book, double rho_p) {
    return chest::build_suboptimal_bank(ls, book, rho_p);
}

}  // namespace cfmimo::expcli
