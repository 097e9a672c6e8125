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

namespace cfmimo::pilots {

enum class PilotKind { random_sphere, orthonormal };

/// Pilot matrix Psi (tau x K) with unit-norm columns psi_k.
struct PilotBook {
    arma::cx_mat psi;
    arma::uword tau = 0;
    PilotKind kind = PilotKind::random_sphere;

    arma::uword n_users() const { return psi.n_cols; }
};

/// Columns drawn uniformly on the complex unit sphere in C^tau.
PilotBook random_pilot_book(arma::uword tau, arma::uword n_users, std::uint64_t seed);

/// Psi^H Psi = I_K; requires tau >= K.
PilotBook orthonormal_pilot_book(arma::uword tau, arma::uword n_users, std::uint64_t seed);

}  // namespace cfmimo::pilots
