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

#include "cfmimo/perf.hpp"

#include <cmath>
#include <stdexcept>

#include "cfmimo/expint.hpp"

namespace cfmimo::perf {

void validate(const UplinkPower& p) {
    if (p.eta.min() < -1e-12 || p.eta.max() > 1.0 + 1e-12)
        throw std::invalid_argument("UplinkPower: eta must lie in [0,1]");
}

void validate(const DownlinkPower& p, const arma::mat& gamma) {
    if (p.eta.min() < -1e-12) throw std::invalid_argument("DownlinkPower: eta must be nonnegative");
    const arma::vec load = arma::sum(p.eta % gamma, 1);
    if (load.max() > 1.0 + 1e-9)
        throw std::invalid_argument("DownlinkPower: per-AP constraint sum_k eta_mk gamma_mk <= 1 violated");
}

double uplink_sinr_cf(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                      const chest::LmmseBank& bank, double rho_u, const UplinkPower& power,
                      arma::uword k) {
    const arma::uword M = ls.beta.n_rows;
    const arma::uword K = ls.beta.n_cols;
    const arma::vec& eta = power.eta;
    const double trp = bank.tau_rho_p;

    double g_sum = 0.0, self = 0.0;
    arma::vec lin(K, arma::fill::zeros);   // sum_m beta_mi ||a_mk||^2
    arma::vec quad(K, arma::fill::zeros);  // sum_m beta_mi sum_j beta_mj |psi_j^H a_mk|^2
    arma::cx_vec coh(K, arma::fill::zeros);  // sum_m beta_mi psi_i^H a_mk
    for (arma::uword m = 0; m < M; m++) {
        const arma::cx_vec a = bank.a_ops[m].col(k);
        g_sum += bank.gamma(m, k);
        self += bank.gamma(m, k) * ls.beta(m, k);
        const arma::cx_vec qcol = book.psi.t() * a;  // psi_j^H a_mk over j
        const double an2 = std::real(arma::cdot(a, a));
        double r = 0.0;
        for (arma::uword j = 0; j < K; j++) r += ls.beta(m, j) * std::norm(qcol[j]);
        for (arma::uword i = 0; i < K; i++) {
            lin[i] += ls.beta(m, i) * an2;
            quad[i] += ls.beta(m, i) * r;
            coh[i] += ls.beta(m, i) * qcol[i];
        }
    }
    double interference = 0.0;
    for (arma::uword i = 0; i < K; i++) {
        if (i == k) continue;
        interference += eta[i] * (lin[i] + trp * (std::norm(coh[i]) + quad[i]));
    }
    const double num = rho_u * eta[k] * g_sum * g_sum;
    const double den = g_sum + rho_u * eta[k] * self + rho_u * interference;
    return num / den;
}

double downlink_sinr_cf(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                        const chest::LmmseBank& bank, double rho_d, const DownlinkPower& power,
                        arma::uword k) {
    const arma::uword M = ls.beta.n_rows;
    const arma::uword K = ls.beta.n_cols;
    const arma::mat& eta = power.eta;
    const double trp = bank.tau_rho_p;

    double sig = 0.0, self = 0.0;
    for (arma::uword m = 0; m < M; m++) {
        sig += std::sqrt(eta(m, k)) * bank.gamma(m, k);
        self += eta(m, k) * bank.gamma(m, k) * ls.beta(m, k);
    }

    double interference = 0.0;
    for (arma::uword i = 0; i < K; i++) {
        if (i == k) continue;
        double lin = 0.0, quad = 0.0;
        std::complex<double> coh{};
        for (arma::uword m = 0; m < M; m++) {
            const arma::cx_vec a = bank.a_ops[m].col(i);
            const double an2 = std::real(arma::cdot(a, a));
            const arma::cx_vec qcol = book.psi.t() * a;
            double r = 0.0;
            for (arma::uword j = 0; j < K; j++) r += ls.beta(m, j) * std::norm(qcol[j]);
            lin += eta(m, i) * ls.beta(m, k) * an2;
            quad += eta(m, i) * ls.beta(m, k) * r;
            coh += std::sqrt(eta(m, i)) * ls.beta(m, k) * qcol[k];
        }
        interference += lin + trp * (std::norm(coh) + quad);
    }
    const double num = rho_d * sig * sig;
    const double den = 1.0 + rho_d * self + rho_d * interference;
    return num / den;
}

double uplink_sinr_orthonormal(const arma::mat& gamma, const arma::mat& beta, double rho_u,
                               const UplinkPower& power, arma::uword k) {
    const double g_sum = arma::accu(gamma.col(k));
    double cross = 0.0;
    for (arma::uword i = 0; i < beta.n_cols; i++)
        cross += power.eta[i] * arma::dot(gamma.col(k), beta.col(i));
    return rho_u * power.eta[k] * g_sum * g_sum / (g_sum + rho_u * cross);
}

double downlink_sinr_orthonormal(const arma::mat& gamma, const arma::mat& beta, double rho_d,
                                 const DownlinkPower& power, arma::uword k) {
    double sig = 0.0;
    for (arma::uword m = 0; m < gamma.n_rows; m++) sig += std::sqrt(power.eta(m, k)) * gamma(m, k);
    double cross = 0.0;
    for (arma::uword i = 0; i < beta.n_cols; i++)
        cross += arma::dot(power.eta.col(i) % gamma.col(i), beta.col(k));
    return rho_d * sig * sig / (1.0 + rho_d * cross);
}

double uplink_sinr_collocated(const arma::vec& beta, const arma::vec& gamma, arma::uword n_aps,
                              double rho_u, const arma::vec& eta, arma::uword k) {
    return rho_u * eta[k] * double(n_aps) * gamma[k] / (1.0 + rho_u * arma::dot(eta, beta));
}

double downlink_sinr_collocated(const arma::vec& beta, arma::uword n_aps, double rho_d,
                                const arma::vec& eta, arma::uword k) {
    return rho_d * double(n_aps) * eta[k] / (1.0 + rho_d * beta[k] * arma::accu(eta));
}

EstimatorStats build_estimator_stats(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                                     const chest::LmmseBank& bank) {
    const arma::uword M = ls.beta.n_rows;
    const arma::uword K = ls.beta.n_cols;
    EstimatorStats st;
    st.tau_rho_p = bank.tau_rho_p;
    st.anorm2.set_size(M, K);
    st.rsum.set_size(M, K);
    st.q.resize(M);
    for (arma::uword m = 0; m < M; m++) {
        const arma::cx_mat& a = bank.a_ops[m];
        st.q[m] = book.psi.t() * a;  // (j,k) = psi_j^H a_mk
        for (arma::uword k = 0; k < K; k++) {
            st.anorm2(m, k) = std::real(arma::cdot(a.col(k), a.col(k)));
            double r = 0.0;
            for (arma::uword j = 0; j < K; j++) r += ls.beta(m, j) * std::norm(st.q[m](j, k));
            st.rsum(m, k) = r;
        }
    }
    return st;
}

UplinkCoeffs build_uplink_coeffs(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                                 const chest::LmmseBank& bank, double rho_u) {
    const arma::uword M = ls.beta.n_rows;
    const arma::uword K = ls.beta.n_cols;
    const EstimatorStats st = build_estimator_stats(ls, book, bank);

    UplinkCoeffs c;
    c.rho_u = rho_u;
    c.g_sum = arma::sum(bank.gamma, 0).t();
    c.self = arma::sum(bank.gamma % ls.beta, 0).t();

    const arma::mat w = st.anorm2 + st.tau_rho_p * st.rsum;
    c.cross = w.t() * ls.beta;  // (k,i) = sum_m beta_mi (||a_mk||^2 + trp rsum(m,k))
    arma::cx_mat coh(K, K, arma::fill::zeros);  // (i,k) = sum_m beta_mi psi_i^H a_mk
    for (arma::uword m = 0; m < M; m++) {
        const arma::cx_vec b = arma::conv_to<arma::cx_vec>::from(ls.beta.row(m).t());
        coh += st.q[m].each_col() % b;
    }
    for (arma::uword k = 0; k < K; k++) {
        for (arma::uword i = 0; i < K; i++)
            c.cross(k, i) += (i == k) ? 0.0 : st.tau_rho_p * std::norm(coh(i, k));
        c.cross(k, k) = 0.0;
    }
    return c;
}

double sinr(const UplinkCoeffs& c, const arma::vec& eta, arma::uword k) {
    const double num = c.rho_u * eta[k] * c.g_sum[k] * c.g_sum[k];
    const double den = c.g_sum[k] + c.rho_u * eta[k] * c.self[k] +
                       c.rho_u * arma::dot(c.cross.row(k), eta);
    return num / den;
}

arma::vec sinr_all(const UplinkCoeffs& c, const arma::vec& eta) {
    arma::vec s(eta.n_elem);
    const arma::vec cross = c.cross * eta;
    for (arma::uword k = 0; k < eta.n_elem; k++) {
        const double num = c.rho_u * eta[k] * c.g_sum[k] * c.g_sum[k];
        const double den = c.g_sum[k] + c.rho_u * eta[k] * c.self[k] + c.rho_u * cross[k];
        s[k] = num / den;
    }
    return s;
}

double interference_load(const UplinkCoeffs& c, const arma::vec& eta, arma::uword k) {
    return (c.g_sum[k] / c.rho_u + eta[k] * c.self[k] + arma::dot(c.cross.row(k), eta)) /
           (c.g_sum[k] * c.g_sum[k]);
}

arma::uvec assign_serving_aps(const arma::mat& beta) {
    const arma::uword M = beta.n_rows;
    const arma::uword K = beta.n_cols;
    if (M < K) throw std::invalid_argument("assign_serving_aps: fewer APs than users");

    arma::vec best(K);
    for (arma::uword k = 0; k < K; k++) best[k] = beta.col(k).max();
    const arma::uvec order = arma::sort_index(best, "descend");

    arma::uvec serving(K);
    std::vector<bool> taken(M, false);
    for (arma::uword idx = 0; idx < K; idx++) {
        const arma::uword k = order[idx];
        arma::uword pick = M;
        double pick_gain = -1.0;
        for (arma::uword m = 0; m < M; m++) {
            if (!taken[m] && beta(m, k) > pick_gain) {
                pick_gain = beta(m, k);
                pick = m;
            }
        }
        serving[k] = pick;
        taken[pick] = true;
    }
    return serving;
}

namespace {

SmallCellModel build_smallcell_common(const netgen::LargeScale& ls,
                                      const pilots::PilotBook& book, const arma::uvec& serving_ap,
                                      double rho, double rho_pilot, arma::uword tau_pilot,
                                      bool downlink) {
    const arma::uword K = ls.beta.n_cols;
    if (serving_ap.n_elem != K) throw std::invalid_argument("small-cell: bad assignment size");
    const arma::mat pg = arma::abs(book.psi.t() * book.psi);  // |psi_k^H psi_k'|
    const double rpt = rho_pilot * double(tau_pilot);

    SmallCellModel mo;
    mo.serving_ap = serving_ap;
    mo.rho = rho;
    mo.gain_self.set_size(K);
    mo.wbar.set_size(K);
    mo.cross_gain.set_size(K, K);
    for (arma::uword k = 0; k < K; k++) {
        const arma::uword mk = serving_ap[k];
        const double bs = ls.beta(mk, k);
        mo.gain_self[k] = bs;
        double pilot_den = 0.0;
        for (arma::uword kp = 0; kp < K; kp++) {
            const double corr2 = pg(k, kp) * pg(k, kp);
            // uplink training contaminates at the serving AP; downlink
            // training at the user, through each interferer's serving AP
            pilot_den += (downlink ? ls.beta(serving_ap[kp], k) : bs) * corr2;
            mo.cross_gain(k, kp) =
                downlink ? ls.beta(serving_ap[kp], k) : ls.beta(mk, kp);
        }
        mo.cross_gain(k, k) = 0.0;
        mo.wbar[k] = rpt * bs * bs / (rpt * pilot_den + 1.0);
    }
    return mo;
}

}  // namespace

SmallCellModel build_smallcell_uplink(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                                      const arma::uvec& serving_ap, double rho_u, double rho_up,
                                      arma::uword tau_u) {
    return build_smallcell_common(ls, book, serving_ap, rho_u, rho_up, tau_u, false);
}

SmallCellModel build_smallcell_downlink(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                                        const arma::uvec& serving_ap, double rho_d, double rho_dp,
                                        arma::uword tau_d) {
    return build_smallcell_common(ls, book, serving_ap, rho_d, rho_dp, tau_d, true);
}

double smallcell_effective_sinr(const SmallCellModel& model, const arma::vec& p, arma::uword k) {
    const double num = model.rho * p[k] * model.wbar[k];
    const double den = model.rho * p[k] * (model.gain_self[k] - model.wbar[k]) +
                       model.rho * arma::dot(model.cross_gain.row(k), p) + 1.0;
    return num / den;
}

arma::vec smallcell_rates(const SmallCellModel& model, const arma::vec& p) {
    arma::vec r(p.n_elem);
    for (arma::uword k = 0; k < p.n_elem; k++) {
        const double w = smallcell_effective_sinr(model, p, k);
        if (!std::isfinite(w) || w < 0.0)
            throw std::runtime_error("smallcell_rates: effective SINR is not finite");
        r[k] = exp_fading_rate_bits(w);
    }
    return r;
}

arma::vec smallcell_uplink_rate(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                                const arma::uvec& serving_ap, double rho_u, double rho_up,
                                arma::uword tau_u, const arma::vec& eta_sc) {
    return smallcell_rates(build_smallcell_uplink(ls, book, serving_ap, rho_u, rho_up, tau_u),
                           eta_sc);
}

arma::vec smallcell_downlink_rate(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                                  const arma::uvec& serving_ap, double rho_d, double rho_dp,
                                  arma::uword tau_d, const arma::vec& alpha_sc) {
    return smallcell_rates(build_smallcell_downlink(ls, book, serving_ap, rho_d, rho_dp, tau_d),
                           alpha_sc);
}

double throughput_bps(double rate_bits, double bandwidth_hz, double tau_overhead, double tau_c) {
    if (tau_overhead < 0.0 || tau_overhead >= tau_c)
        throw std::invalid_argument("throughput_bps: need 0 <= tau_overhead < tau_c");
    return bandwidth_hz * (1.0 - tau_overhead / tau_c) / 2.0 * rate_bits;
}

double energy_efficiency(const arma::vec& rates_bits, const arma::vec& eta, double uplink_power_w) {
    const double total = arma::accu(eta);
    if (!(total > 0.0)) throw std::invalid_argument("energy_efficiency: sum of eta must be positive");
    if (!(uplink_power_w > 0.0)) throw std::invalid_argument("energy_efficiency: P_u must be positive");
    return arma::accu(rates_bits) / (uplink_power_w * total);
}

}  // namespace cfmimo::perf
