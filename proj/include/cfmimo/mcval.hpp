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

#include "cfmimo/chest.hpp"
#include "cfmimo/perf.hpp"
#include "cfmimo/stats.hpp"

namespace cfmimo::mcval {

/// Empirical estimates of the received-signal decomposition: squared
/// coherent signal term and the variances of the beamforming-uncertainty,
/// interference and noise terms.
struct TermEstimates {
    McEstimate t1_sq;
    McEstimate var_t2;
    McEstimate var_t3;
    McEstimate var_t4;
    std::size_t n_samples = 0;
};

/// Samples fresh (g, w, s) realizations and measures the uplink term
/// statistics for user k. Oracle draws live on their own seed stream.
TermEstimates empirical_uplink_terms(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                                     const chest::LmmseBank& bank, double rho_u,
                                     const perf::UplinkPower& power, arma::uword k,
                                     std::size_t n_samples, std::uint64_t seed);

/// Downlink mirror of the term measurement (conjugate beamforming signal).
TermEstimates empirical_downlink_terms(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                                       const chest::LmmseBank& bank, double rho_d,
                                       const perf::DownlinkPower& power, arma::uword k,
                                       std::size_t n_samples, std::uint64_t seed);

/// T1^2 / (Var T2 + Var T3 + Var T4) with first-order error propagation.
McEstimate empirical_sinr(const TermEstimates& t);

/// Estimate-moment checks: estimation-error orthogonality, cross-AP
/// estimate correlation (adjacent AP pairs) and the fourth moment E|g_hat|^4.
struct MomentReport {
    arma::cx_mat err_corr_mean;  // M x K, E[g_hat conj(g_tilde)]
    arma::mat err_corr_se;
    arma::cx_mat pair_corr_mean;  // (M-1) x K, E[g_hat_mk conj(g_hat_{m+1,k})]
    arma::mat pair_corr_se;
    arma::mat fourth_moment;  // M x K, E|g_hat_mk|^4
    arma::mat fourth_moment_se;
    arma::mat gamma;  // reference, M x K
    std::size_t n_samples = 0;

    std::string to_text() const;
};

MomentReport moment_checks(const chest::LmmseBank& bank, const netgen::LargeScale& ls,
                           const pilots::PilotBook& book, double rho_p, std::size_t n_samples,
                           std::uint64_t seed);

}  // namespace cfmimo::mcval
