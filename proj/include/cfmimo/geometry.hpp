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

namespace cfmimo::netgen {

/// AP/user placement on a D x D square with toroidal wrap-around.
struct Geometry {
    double area_side_m = 0.0;     // D
    arma::mat ap_xy;              // M x 2, coordinates in [0, D)
    arma::mat user_xy;            // K x 2
    double ap_height_m = 15.0;    // h_AP
    double user_height_m = 1.65;  // h_u

    arma::uword n_aps() const { return ap_xy.n_rows; }
    arma::uword n_users() const { return user_xy.n_rows; }
};

/// Uniform i.i.d. placement of M APs and K users, deterministic under seed.
Geometry place_network(arma::uword n_aps, arma::uword n_users, double area_side_m,
                       std::uint64_t seed, double ap_height_m = 15.0,
                       double user_height_m = 1.65);

/// Min-image (toroidal) distance between two points of the wrapped square.
double wrap_distance(const arma::rowvec2& p, const arma::rowvec2& q, double area_side_m);

/// All pairwise wrap distances between two point sets (rows of a, rows of b).
arma::mat wrap_distance_matrix(const arma::mat& a, const arma::mat& b, double area_side_m);

}  // namespace cfmimo::netgen
