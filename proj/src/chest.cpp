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

#include "cfmimo/chest.hpp"

#include <cmath>
#include <stdexcept>

#include "cfmimo/rng.hpp"

namespace cfmimo::chest {

LmmseBank build_lmmse_bank(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                           double rho_p) {
    const arma::uword M = ls.beta.n_rows;
    const arma::uword K = ls.beta.n_cols;
    if (book.n_users() != K) throw std::invalid_argument("build_lmmse_bank: pilot/user count mismatch");
    if (!(rho_p > 0.0)) throw std::invalid_argument("build_lmmse_bank: rho_p must be positive");
    if (!ls.beta.is_finite()) throw std::invalid_argument("build_lmmse_bank: beta is not finite");

    const arma::uword tau = book.tau;
    const double trp = double(tau) * rho_p;
    const double srtrp = std::sqrt(trp);
    const arma::cx_mat eye_tau = arma::eye<arma::cx_mat>(tau, tau);

    LmmseBank bank;
    bank.rho_p = rho_p;
    bank.tau_rho_p = trp;
    bank.a_ops.resize(M);
    bank.gamma.set_size(M, K);
    for (arma::uword m = 0; m < M; m++) {
        // Psi B_m (tau x K), columns scaled by beta_mk
        arma::cx_mat psi_b = book.psi;
        for (arma::uword k = 0; k < K; k++) psi_b.col(k) *= ls.beta(m, k);
        const arma::cx_mat sys = trp * psi_b * book.psi.t() + eye_tau;
        arma::cx_mat a;
        if (!arma::solve(a, sys, psi_b, arma::solve_opts::likely_sympd))
            throw std::runtime_error("build_lmmse_bank: linear solve failed");
        a *= srtrp;
        bank.a_ops[m] = a;
        for (arma::uword k = 0; k < K; k++) {
            const std::complex<double> corr = arma::cdot(book.psi.col(k), a.col(k));
            const double gamma = srtrp * ls.beta(m, k) * corr.real();
            if (std::abs(corr.imag()) > 1e-9 * std::max(std::abs(corr.real()), 1e-300))
                throw std::runtime_error("build_lmmse_bank: estimate variance has a non-real component");
            bank.gamma(m, k) = gamma;
        }
    }
    return bank;
}

LmmseBank build_suboptimal_bank(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                                double rho_p) {
    const arma::uword M = ls.beta.n_rows;
    const arma::uword K = ls.beta.n_cols;
    if (book.n_users() != K) throw std::invalid_argument("build_suboptimal_bank: pilot/user count mismatch");
    if (!(rho_p > 0.0)) throw std::invalid_argument("build_suboptimal_bank: rho_p must be positive");

    const double trp = double(book.tau) * rho_p;
    const double srtrp = std::sqrt(trp);

    LmmseBank bank;
    bank.rho_p = rho_p;
    bank.tau_rho_p = trp;
    bank.a_ops.resize(M);
    bank.gamma.set_size(M, K);
    for (arma::uword m = 0; m < M; m++) {
        arma::cx_mat a(book.tau, K);
        for (arma::uword k = 0; k < K; k++) {
            const double b = ls.beta(m, k);
            a.col(k) = (srtrp * b / (trp * b + 1.0)) * book.psi.col(k);
            bank.gamma(m, k) = trp * b * b / (trp * b + 1.0);
        }
        bank.a_ops[m] = a;
    }
    return bank;
}

ChannelDraw draw_channel(const netgen::LargeScale& ls, const pilots::PilotBook& book,
                         const LmmseBank& bank, double rho_p, std::uint64_t seed) {
    const arma::uword M = ls.beta.n_rows;
    const arma::uword K = ls.beta.n_cols;
    if (bank.n_aps() != M || bank.gamma.n_cols != K)
        throw std::invalid_argument("draw_channel: bank does not match the network");

    RandomStream rs(derive_seed(seed, seed_stream::channel));
    ChannelDraw d;
    d.g.set_size(M, K);
    rs.fill_complex_normal(d.g);
    d.g %= arma::sqrt(arma::conv_to<arma::cx_mat>::from(ls.beta));

    arma::cx_mat w(book.tau, M);
    rs.fill_complex_normal(w);
    d.y_pilot = std::sqrt(double(book.tau) * rho_p) * (book.psi * d.g.st()) + w;

    d.g_hat.set_size(M, K);
    for (arma::uword m = 0; m < M; m++)
        d.g_hat.row(m) = (bank.a_ops[m].t() * d.y_pilot.col(m)).st();
    d.g_tilde = d.g - d.g_hat;
    return d;
}

}  // namespace cfmimo::chest
