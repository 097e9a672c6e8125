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

#include "cfmimo/geometry.hpp"

namespace cfmimo::netgen {

/// Large-scale propagation settings. Defaults follow a 1.9 GHz suburban
/// deployment with 8 dB lognormal shadowing and a 20 MHz noise bandwidth.
struct PropagationParams {
    double carrier_freq_mhz = 1900.0;  // f
    double sigma_sh_db = 8.0;          // shadow-fading std dev
    double d0_m = 10.0;                // inner breakpoint
    double d1_m = 50.0;                // outer breakpoint
    double d_decorr_m = 20.0;          // shadowing decorrelation distance
    double delta_mix = 0.5;            // AP/user shadowing mix in [0,1]
    double bandwidth_hz = 20e6;        // B
    double noise_figure_db = 9.0;
    double noise_temp_k = 290.0;       // T0
};

enum class ShadowingMode { correlated, uncorrelated };

/// Large-scale fading matrix beta (linear power gains) and the underlying
/// standard-normal shadowing field z.
struct LargeScale {
    arma::mat beta;      // M x K, strictly positive
    arma::mat shadow_z;  // M x K
};

/// Noise-normalized transmit powers.
struct PowerBudget {
    double rho_p = 0.0;  // pilot
    double rho_u = 0.0;  // uplink data
    double rho_d = 0.0;  // downlink data
    double pilot_power_w = 0.0;
    double uplink_power_w = 0.0;
    double downlink_power_w = 0.0;
    double noise_power_w = 0.0;
};

/// Fixed-offset term L of the three-slope model (dB). f in MHz, heights in
/// meters.
double hata_offset_db(double carrier_freq_mhz, double ap_height_m, double user_height_m);

/// Three-slope path loss in dB (a negative gain). Distances enter the Hata
/// slope in km, matching the constant L; the model is implemented exactly as
/// stated, including its ~1.7 dB step at d1 (the 34 vs 35 slope mismatch).
double path_loss_db(double distance_m, const PropagationParams& params, double ap_height_m,
                    double user_height_m);

/// Two-component correlated shadow field: z = sqrt(delta) a_m +
/// sqrt(1-delta) b_k with distance-decaying covariances 2^(-d/d_decorr)
/// over wrap distances. Marginals are standard normal.
arma::mat correlated_shadowing(const Geometry& geom, const PropagationParams& params,
                               std::uint64_t seed);

/// I.i.d. standard-normal shadow field.
arma::mat uncorrelated_shadowing(arma::uword n_aps, arma::uword n_users, std::uint64_t seed);

/// beta[m][k] = 10^((PL_dB(d_mk) + sigma_sh * z_mk)/10). Shadowing applies
/// on every distance branch.
LargeScale build_large_scale(const Geometry& geom, const PropagationParams& params,
                             ShadowingMode mode, std::uint64_t seed);

/// B * k_B * T0 * 10^(NF/10), in watts.
double noise_power_w(const PropagationParams& params);

PowerBudget make_power_budget(double pilot_power_w, double uplink_power_w,
                              double downlink_power_w, double noise_w);

}  // namespace cfmimo::netgen
