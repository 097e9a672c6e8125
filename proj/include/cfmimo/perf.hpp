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

#include <armadillo>
#include <cstdint>
#include <string>
#include <vector>

#include "cfmimo/chest.hpp"
#include "cfmimo/pilots.hpp"
#include "cfmimo/propagation.hpp"

namespace cfmimo::perf {

/// Per-user uplink transmit coefficients, eta_k in [0,1].
struct UplinkPower {
    arma::vec eta;
};

/// Per-AP/per-user downlink coefficients eta_mk >= 0 subject to
/// sum_k eta_mk gamma_mk <= 1 for every AP m.
struct DownlinkPower {
    arma::mat eta;  // M x K
};

void validate(const UplinkPower& p);
void validate(const DownlinkPower& p, const arma::mat& gamma);

/// Per-user results of one evaluated system realization.
struct PerfReport {
    arma::vec sinr;            // linear (cell-free only; empty for small-cell)
    arma::vec rate_bits;       // bits/s/Hz
    arma::vec throughput_bps;  // bits/s
    double energy_eff = 0.0;   // bits/J per Hz of rate; uplink only
    std::string experiment_tag;
    std::string system_kind;
    std::uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// Cell-free closed forms
// ---------------------------------------------------------------------------

/// Uplink SINR of user k under matched filtering of LMMSE-type estimates,
/// evaluated term by term from the bank operators.
double uplink_sinr_cf(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                      const chest::LmmseBank& bank, double rho_u, const UplinkPower& power,
                      arma::uword k);

/// Downlink SINR of user k under conjugate beamforming.
double downlink_sinr_cf(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                        const chest::LmmseBank& bank, double rho_d, const DownlinkPower& power,
                        arma::uword k);

/// Orthonormal-pilot uplink reduction:
/// rho_u eta_k (sum_m gamma_mk)^2 /
///   (sum_m gamma_mk + rho_u sum_i eta_i sum_m gamma_mk beta_mi).
double uplink_sinr_orthonormal(const arma::mat& gamma, const arma::mat& beta, double rho_u,
                               const UplinkPower& power, arma::uword k);

/// Orthonormal-pilot downlink reduction.
double downlink_sinr_orthonormal(const arma::mat& gamma, const arma::mat& beta, double rho_d,
                                 const DownlinkPower& power, arma::uword k);

/// Collocated uplink form: rho_u eta_k M gamma_k / (1 + rho_u sum_i eta_i beta_i).
double uplink_sinr_collocated(const arma::vec& beta, const arma::vec& gamma, arma::uword n_aps,
                              double rho_u, const arma::vec& eta, arma::uword k);

/// Collocated downlink form with eta_mk = eta_k/(M gamma_k):
/// rho_d M eta_k / (1 + rho_d beta_k sum_i eta_i).
double downlink_sinr_collocated(const arma::vec& beta, arma::uword n_aps, double rho_d,
                                const arma::vec& eta, arma::uword k);

// ---------------------------------------------------------------------------
// Precomputed coefficient form of the same closed forms (solver hot path)
// ---------------------------------------------------------------------------

/// Pilot/estimator cross statistics shared by the uplink and downlink forms:
/// anorm2(m,k) = ||a_{m,k}||^2, rsum(m,k) = sum_j beta_mj |psi_j^H a_{m,k}|^2
/// and q[m](j,k) = psi_j^H a_{m,k}.
struct EstimatorStats {
    arma::mat anorm2;  // M x K
    arma::mat rsum;    // M x K
    std::vector<arma::cx_mat> q;
    double tau_rho_p = 0.0;
};

EstimatorStats build_estimator_stats(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                                     const chest::LmmseBank& bank);

/// Uplink SINR as a ratio of affine functions of eta:
/// SINR_k = rho_u eta_k g_sum_k^2 /
///          (g_sum_k + rho_u eta_k self_k + rho_u sum_{i != k} cross(k,i) eta_i).
struct UplinkCoeffs {
    arma::vec g_sum;  // sum_m gamma_mk
    arma::vec self;   // sum_m gamma_mk beta_mk
    arma::mat cross;  // K x K, row k = coefficients of interferer powers
    double rho_u = 0.0;
};

UplinkCoeffs build_uplink_coeffs(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                                 const chest::LmmseBank& bank, double rho_u);

double sinr(const UplinkCoeffs& c, const arma::vec& eta, arma::uword k);
arma::vec sinr_all(const UplinkCoeffs& c, const arma::vec& eta);

/// Interference load I_k(eta) = eta_k / SINR_k(eta) (affine in eta).
double interference_load(const UplinkCoeffs& c, const arma::vec& eta, arma::uword k);

// ---------------------------------------------------------------------------
// Small-cell baseline
// ---------------------------------------------------------------------------

/// Greedy exclusive assignment: users ordered by their strongest gain, each
/// taking the best AP still free. One AP serves at most one user.
arma::uvec assign_serving_aps(const arma::mat& beta);

/// Effective-SINR model of a small-cell direction. sinr_k(p) =
/// rho p_k wbar_k / (rho p_k (gain_self_k - wbar_k)
///                   + rho sum_{k' != k} p_k' cross_gain(k,k') + 1).
struct SmallCellModel {
    arma::uvec serving_ap;
    arma::vec gain_self;   // beta at the serving AP
    arma::vec wbar;        // estimate quality (omega_bar / mu_bar)
    arma::mat cross_gain;  // K x K interference couplings
    double rho = 0.0;
};

SmallCellModel build_smallcell_uplink(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                                      const arma::uvec& serving_ap, double rho_u, double rho_up,
                                      arma::uword tau_u);

SmallCellModel build_smallcell_downlink(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                                        const arma::uvec& serving_ap, double rho_d, double rho_dp,
                                        arma::uword tau_d);

/// Effective SINR parameter (omega or mu) for user k at powers p in [0,1]^K.
double smallcell_effective_sinr(const SmallCellModel& model, const arma::vec& p, arma::uword k);

/// Ergodic rate -log2(e) e^{1/w} Ei(-1/w) per user.
arma::vec smallcell_rates(const SmallCellModel& model, const arma::vec& p);

/// Convenience wrappers per the module surface.
arma::vec smallcell_uplink_rate(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                                const arma::uvec& serving_ap, double rho_u, double rho_up,
                                arma::uword tau_u, const arma::vec& eta_sc);
arma::vec smallcell_downlink_rate(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                                  const arma::uvec& serving_ap, double rho_d, double rho_dp,
                                  arma::uword tau_d, const arma::vec& alpha_sc);

// ---------------------------------------------------------------------------
// Rates, throughput, energy efficiency
// ---------------------------------------------------------------------------

inline double rate_from_sinr(double sinr_linear) { return std::log2(1.0 + sinr_linear); }

/// Net per-user throughput B (1 - tau_overhead/tau_c)/2 * rate.
double throughput_bps(double rate_bits, double bandwidth_hz, double tau_overhead, double tau_c);

/// Uplink energy efficiency sum_k R_k / (P_u sum_k eta_k), bits/J per Hz.
double energy_efficiency(const arma::vec& rates_bits, const arma::vec& eta, double uplink_power_w);

}  // namespace cfmimo::perf
