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

#include "cfmimo/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "cfmimo/rng.hpp"

namespace cfmimo::netgen {

Geometry place_network(arma::uword n_aps, arma::uword n_users, double area_side_m,
                       std::uint64_t seed, double ap_height_m, double user_height_m) {
    if (n_aps < 1 || n_users < 1) throw std::invalid_argument("place_network: need M >= 1 and K >= 1");
    if (!(area_side_m > 0.0)) throw std::invalid_argument("place_network: area side must be positive");
    if (!(ap_height_m > 0.0) || !(user_height_m > 0.0))
        throw std::invalid_argument("place_network: antenna heights must be positive");

    RandomStream rs(derive_seed(seed, seed_stream::geometry));
    Geometry g;
    g.area_side_m = area_side_m;
    g.ap_height_m = ap_height_m;
    g.user_height_m = user_height_m;
    g.ap_xy.set_size(n_aps, 2);
    g.user_xy.set_size(n_users, 2);
    for (arma::uword m = 0; m < n_aps; m++) {
        g.ap_xy(m, 0) = rs.uniform() * area_side_m;
        g.ap_xy(m, 1) = rs.uniform() * area_side_m;
    }
    for (arma::uword k = 0; k < n_users; k++) {
        g.user_xy(k, 0) = rs.uniform() * area_side_m;
        g.user_xy(k, 1) = rs.uniform() * area_side_m;
    }
    return g;
}

double wrap_distance(const arma::rowvec2& p, const arma::rowvec2& q, double area_side_m) {
    double s = 0.0;
    for (int d = 0; d < 2; d++) {
        double diff = std::abs(p[d] - q[d]);
        diff = std::min(diff, area_side_m - diff);
        s += diff * diff;
    }
    return std::sqrt(s);
}

arma::mat wrap_distance_matrix(const arma::mat& a, const arma::mat& b, double area_side_m) {
    arma::mat d(a.n_rows, b.n_rows);
    for (arma::uword i = 0; i < a.n_rows; i++) {
        for (arma::uword j = 0; j < b.n_rows; j++) {
            double dx = std::abs(a(i, 0) - b(j, 0));
            double dy = std::abs(a(i, 1) - b(j, 1));
            dx = std::min(dx, area_side_m - dx);
            dy = std::min(dy, area_side_m - dy);
            d(i, j) = std::sqrt(dx * dx + dy * dy);
        }
    }
    return d;
}

}  // namespace cfmimo::netgen
