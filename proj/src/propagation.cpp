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

#include "cfmimo/propagation.hpp"

#include <cmath>
#include <stdexcept>

#include "cfmimo/rng.hpp"

namespace cfmimo::netgen {

namespace {

constexpr double kBoltzmannJPerK = 1.381e-23;

void check_params(const PropagationParams& p) {
    if (!(p.carrier_freq_mhz > 0.0)) throw std::invalid_argument("propagation: carrier frequency must be positive");
    if (!(p.d0_m > 0.0) || !(p.d1_m > p.d0_m))
        throw std::invalid_argument("propagation: need 0 < d0 < d1");
    if (p.delta_mix < 0.0 || p.delta_mix > 1.0)
        throw std::invalid_argument("propagation: delta_mix must lie in [0,1]");
    if (!(p.bandwidth_hz > 0.0)) throw std::invalid_argument("propagation: bandwidth must be positive");
}

/// Symmetric square root of a distance-decay covariance matrix, with a
/// small diagonal jitter to absorb rounding. Throws if the matrix is
/// indefinite beyond what jitter can explain (degenerate geometry).
arma::mat covariance_sqrt(const arma::mat& cov) {
    arma::mat jittered = cov + 1e-12 * arma::eye(cov.n_rows, cov.n_cols);
    arma::vec eigval;
    arma::mat eigvec;
    if (!arma::eig_sym(eigval, eigvec, jittered))
        throw std::runtime_error("correlated_shadowing: eigendecomposition failed");
    if (eigval.min() < -1e-8)
        throw std::runtime_error("correlated_shadowing: covariance not PSD after jitter");
    eigval.transform([](double v) { return v > 0.0 ? std::sqrt(v) : 0.0; });
    return eigvec * arma::diagmat(eigval) * eigvec.t();
}

}  // namespace

double hata_offset_db(double carrier_freq_mhz, double ap_height_m, double user_height_m) {
    if (!(carrier_freq_mhz > 0.0) || !(ap_height_m > 0.0) || !(user_height_m > 0.0))
        throw std::invalid_argument("hata_offset_db: frequency and heights must be positive");
    const double lf = std::log10(carrier_freq_mhz);
    return 46.3 + 33.9 * lf - 13.82 * std::log10(ap_height_m) -
           (1.1 * lf - 0.7) * user_height_m + (1.56 * lf - 0.8);
}

double path_loss_db(double distance_m, const PropagationParams& params, double ap_height_m,
                    double user_height_m) {
    check_params(params);
    if (distance_m < 0.0) throw std::invalid_argument("path_loss_db: negative distance");
    const double L = hata_offset_db(params.carrier_freq_mhz, ap_height_m, user_height_m);
    // The slope constant assumes km.
    const double d_km = distance_m * 1e-3;
    const double d0_km = params.d0_m * 1e-3;
    const double d1_km = params.d1_m * 1e-3;
    if (distance_m > params.d1_m) return -L - 35.0 * std::log10(d_km);
    if (distance_m > params.d0_m)
        return -L - 15.0 * std::log10(d1_km) - 20.0 * std::log10(d_km);
    return -L - 15.0 * std::log10(d1_km) - 20.0 * std::log10(d0_km);
}

arma::mat correlated_shadowing(const Geometry& geom, const PropagationParams& params,
                               std::uint64_t seed) {
    check_params(params);
    const arma::uword M = geom.n_aps();
    const arma::uword K = geom.n_users();
    const double D = geom.area_side_m;

    const arma::mat d_ap = wrap_distance_matrix(geom.ap_xy, geom.ap_xy, D);
    const arma::mat d_user = wrap_distance_matrix(geom.user_xy, geom.user_xy, D);
    const arma::mat cov_a = arma::exp2(-d_ap / params.d_decorr_m);
    const arma::mat cov_b = arma::exp2(-d_user / params.d_decorr_m);

    RandomStream rs(derive_seed(seed, seed_stream::shadowing));
    arma::vec ga(M), gb(K);
    rs.fill_normal(ga);
    rs.fill_normal(gb);
    const arma::vec a = covariance_sqrt(cov_a) * ga;
    const arma::vec b = covariance_sqrt(cov_b) * gb;

    const double wa = std::sqrt(params.delta_mix);
    const double wb = std::sqrt(1.0 - params.delta_mix);
    arma::mat z(M, K);
    for (arma::uword k = 0; k < K; k++)
        for (arma::uword m = 0; m < M; m++) z(m, k) = wa * a[m] + wb * b[k];
    return z;
}

arma::mat uncorrelated_shadowing(arma::uword n_aps, arma::uword n_users, std::uint64_t seed) {
    RandomStream rs(derive_seed(seed, seed_stream::shadowing));
    arma::mat z(n_aps, n_users);
    for (arma::uword i = 0; i < z.n_elem; i++) z[i] = rs.normal();
    return z;
}

LargeScale build_large_scale(const Geometry& geom, const PropagationParams& params,
                             ShadowingMode mode, std::uint64_t seed) {
    check_params(params);
    const arma::uword M = geom.n_aps();
    const arma::uword K = geom.n_users();

    LargeScale ls;
    ls.shadow_z = (mode == ShadowingMode::correlated)
                      ? correlated_shadowing(geom, params, seed)
                      : uncorrelated_shadowing(M, K, seed);

    const arma::mat dist = wrap_distance_matrix(geom.ap_xy, geom.user_xy, geom.area_side_m);
    ls.beta.set_size(M, K);
    for (arma::uword k = 0; k < K; k++) {
        for (arma::uword m = 0; m < M; m++) {
            const double pl = path_loss_db(dist(m, k), params, geom.ap_height_m,
                                           geom.user_height_m);
            ls.beta(m, k) = std::pow(10.0, (pl + params.sigma_sh_db * ls.shadow_z(m, k)) / 10.0);
        }
    }
    if (!ls.beta.is_finite() || ls.beta.min() <= 0.0)
        throw std::runtime_error("build_large_scale: beta must be finite and positive");
    return ls;
}

double noise_power_w(const PropagationParams& params) {
    check_params(params);
    return params.bandwidth_hz * kBoltzmannJPerK * params.noise_temp_k *
           std::pow(10.0, params.noise_figure_db / 10.0);
}

PowerBudget make_power_budget(double pilot_power_w, double uplink_power_w,
                              double downlink_power_w, double noise_w) {
    if (!(pilot_power_w > 0.0) || !(uplink_power_w > 0.0) || !(downlink_power_w > 0.0) ||
        !(noise_w > 0.0))
        throw std::invalid_argument("make_power_budget: powers must be positive");
    PowerBudget b;
    b.pilot_power_w = pilot_power_w;
    b.uplink_power_w = uplink_power_w;
    b.downlink_power_w = downlink_power_w;
    b.noise_power_w = noise_w;
    b.rho_p = pilot_power_w / noise_w;
    b.rho_u = uplink_power_w / noise_w;
    b.rho_d = downlink_power_w / noise_w;
    return b;
}

}  // namespace cfmimo::netgen
