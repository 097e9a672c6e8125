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
#include <vector>

#include "cfmimo/pilots.hpp"
#include "cfmimo/propagation.hpp"

namespace cfmimo::chest {

/// Per-AP linear channel estimators and estimate variances.
/// a_ops[m] is the tau x K operator A_m whose k-th column maps the pilot
/// observation y_m to the estimate g_hat_mk = a_{m,k}^H y_m; gamma(m,k) is
/// the variance of that estimate.
struct LmmseBank {
    std::vector<arma::cx_mat> a_ops;
    arma::mat gamma;  // M x K
    double rho_p = 0.0;
    double tau_rho_p = 0.0;  // tau * rho_p, as it appears in the SINR forms

    arma::uword n_aps() const { return a_ops.size(); }
    arma::uword n_users() const { return gamma.n_cols; }
};

/// One realization of channels, pilot observations and estimates.
struct ChannelDraw {
    arma::cx_mat g;        // M x K true channels
    arma::cx_mat y_pilot;  // tau x M received pilot block
    arma::cx_mat g_hat;    // M x K estimates
    arma::cx_mat g_tilde;  // M x K estimation errors, g - g_hat
};

/// Builds the LMMSE bank: A_m = sqrt(tau rho_p) (tau rho_p Psi B_m Psi^H +
/// I)^{-1} Psi B_m and gamma_mk = sqrt(tau rho_p) beta_mk Re(psi_k^H a_mk).
LmmseBank build_lmmse_bank(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                           double rho_p);

/// Baseline single-pilot projection estimator: a_{m,k} =
/// sqrt(tau rho_p) beta_mk / (tau rho_p beta_mk + 1) * psi_k. Coincides with
/// the LMMSE bank under orthonormal pilots.
LmmseBank build_suboptimal_bank(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                                double rho_p);

/// Samples h, w ~ CN(0,1), forms y_m = sqrt(tau rho_p) Psi g_m + w_m and the
/// estimates g_hat_m = A_m^H y_m.
ChannelDraw draw_channel(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                         const LmmseBank& bank, double rho_p, std::uint64_t seed);

}  // namespace cfmimo::chest
