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

#include "cfmimo/pilots.hpp"

#include <stdexcept>

#include "cfmimo/rng.hpp"

namespace cfmimo::pilots {

PilotBook random_pilot_book(arma::uword tau, arma::uword n_users, std::uint64_t seed) {
    if (tau < 1 || n_users < 1) throw std::invalid_argument("random_pilot_book: need tau >= 1, K >= 1");
    RandomStream rs(derive_seed(seed, seed_stream::pilots));
    PilotBook book;
    book.tau = tau;
    book.kind = PilotKind::random_sphere;
    book.psi.set_size(tau, n_users);
    rs.fill_complex_normal(book.psi);
    for (arma::uword k = 0; k < n_users; k++) book.psi.col(k) /= arma::norm(book.psi.col(k));
    return book;
}

PilotBook orthonormal_pilot_book(arma::uword tau, arma::uword n_users, std::uint64_t seed) {
    if (n_users < 1) throw std::invalid_argument("orthonormal_pilot_book: need K >= 1");
    if (tau < n_users)
        throw std::invalid_argument("orthonormal_pilot_book: tau must be >= K for orthonormal pilots");
    RandomStream rs(derive_seed(seed, seed_stream::pilots));
    arma::cx_mat g(tau, n_users);
    rs.fill_complex_normal(g);
    arma::cx_mat q, r;
    if (!arma::qr_econ(q, r, g)) throw std::runtime_error("orthonormal_pilot_book: QR failed");
    PilotBook book;
    book.tau = tau;
    book.kind = PilotKind::orthonormal;
    book.psi = q.head_cols(n_users);
    return book;
}

}  // namespace cfmimo::pilots
