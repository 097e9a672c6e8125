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

#include "cfmimo/chest.hpp"
#include "cfmimo/geometry.hpp"
#include "cfmimo/pilots.hpp"
#include "cfmimo/propagation.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo::testutil {

struct Instance {
    netgen::Geometry geom;
    netgen::LargeScale ls;
    netgen::PowerBudget budget;
    pilots::PilotBook book;
    chest::LmmseBank bank;
};

/// A seeded IoT-style instance: uniform placement on a 120 m square,
/// standard propagation defaults, random-sphere pilots, 20 mW / 20 mW /
/// 200 mW transmit powers.
inline Instance make_instance(arma::uword M, arma::uword K, arma::uword tau, std::uint64_t seed,
                              bool orthonormal = false, double side_m = 120.0) {
    Instance in;
    in.geom = netgen::place_network(M, K, side_m, seed);
    netgen::PropagationParams prop;
    in.ls = netgen::build_large_scale(in.geom, prop, netgen::ShadowingMode::uncorrelated, seed);
    in.budget = netgen::make_power_budget(0.02, 0.02, 0.2, netgen::noise_power_w(prop));
    in.book = orthonormal ? pilots::orthonormal_pilot_book(tau, K, seed)
                          : pilots::random_pilot_book(tau, K, seed);
    in.bank = chest::build_lmmse_bank(in.ls, in.book, in.budget.rho_p);
    return in;
}

/// Uniform random uplink powers in (lo, 1].
inline arma::vec random_eta(arma::uword K, std::uint64_t seed, double lo = 0.05) {
    RandomStream rs(derive_seed(seed, 77));
    arma::vec eta(K);
    for (auto& v : eta) v = lo + (1.0 - lo) * rs.uniform();
    return eta;
}

/// Random downlink powers meeting every per-AP constraint.
inline arma::mat random_downlink_eta(const arma::mat& gamma, std::uint64_t seed) {
    RandomStream rs(derive_seed(seed, 78));
    const arma::uword M = gamma.n_rows, K = gamma.n_cols;
    arma::mat eta(M, K);
    for (arma::uword m = 0; m < M; m++) {
        for (arma::uword k = 0; k < K; k++)
            eta(m, k) = (0.05 + 0.95 * rs.uniform()) / (double(K) * gamma(m, k));
    }
    return eta;
}

}  // namespace cfmimo::testutil
