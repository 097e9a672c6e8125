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

#include <doctest.h>

#include "cfmimo/chest.hpp"
#include "cfmimo/stats.hpp"
#include "test_util.hpp"

using namespace cfmimo;
using namespace cfmimo::chest;
using cfmimo::testutil::make_instance;

namespace {

netgen::LargeScale unit_ls(arma::uword M, arma::uword K, double beta_val) {
    netgen::LargeScale ls;
    ls.beta = arma::mat(M, K, arma::fill::value(beta_val));
    ls.shadow_z = arma::mat(M, K, arma::fill::zeros);
    return ls;
}

}  // namespace

TEST_CASE("scalar bank: tau=1, K=1, beta=1, rho_p=1") {
    const netgen::LargeScale ls = unit_ls(1, 1, 1.0);
    const pilots::PilotBook book = pilots::random_pilot_book(1, 1, 4);
    const LmmseBank bank = build_lmmse_bank(ls, book, 1.0);
    // A = (psi psi^H + I)^{-1} psi = psi/2
    CHECK(std::abs(bank.a_ops[0](0, 0) - 0.5 * book.psi(0, 0)) < 1e-14);
    CHECK(bank.gamma(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("orthonormal pilots give the diagonal closed form") {
    const auto in = make_instance(6, 4, 8, 21, /*orthonormal=*/true);
    const double trp = in.bank.tau_rho_p;
    for (arma::uword m = 0; m < 6; m++) {
        for (arma::uword k = 0; k < 4; k++) {
            const double b = in.ls.beta(m, k);
            const double expected = trp * b * b / (1.0 + trp * b);
            CHECK(in.bank.gamma(m, k) == doctest::Approx(expected).epsilon(1e-10));
            for (arma::uword i = 0; i < 4; i++) {
                if (i == k) continue;
                CHECK(std::abs(arma::cdot(in.book.psi.col(i), in.bank.a_ops[m].col(k))) < 1e-10);
            }
        }
    }
}

TEST_CASE("estimate variance is bounded by the channel variance") {
    const auto in = make_instance(8, 5, 4, 31);
    CHECK(arma::all(arma::vectorise(in.bank.gamma) >= 0.0));
    CHECK(arma::all(arma::vectorise(in.ls.beta - in.bank.gamma) > -1e-9));
}

TEST_CASE("bank covariance identity") {
    const auto in = make_instance(5, 3, 4, 41);
    const double trp = in.bank.tau_rho_p;
    for (arma::uword m = 0; m < 5; m++) {
        arma::cx_mat psi_b = in.book.psi;
        for (arma::uword k = 0; k < 3; k++) psi_b.col(k) *= in.ls.beta(m, k);
        const arma::cx_mat sys = trp * psi_b * in.book.psi.t() +
                                 arma::eye<arma::cx_mat>(in.book.tau, in.book.tau);
        const arma::cx_mat lhs = in.bank.a_ops[m].t() * sys * in.bank.a_ops[m];
        const arma::cx_mat rhs = std::sqrt(trp) *
                                 arma::diagmat(arma::conv_to<arma::cx_vec>::from(
                                     in.ls.beta.row(m).t())) *
                                 in.book.psi.t() * in.bank.a_ops[m];
        CHECK(arma::norm(lhs - rhs, "fro") < 1e-9 * std::max(1.0, arma::norm(rhs, "fro")));
    }
}

TEST_CASE("permuting users permutes gamma columns") {
    const auto in = make_instance(4, 3, 5, 51);
    netgen::LargeScale p_ls = in.ls;
    pilots::PilotBook p_book = in.book;
    const arma::uvec perm{2, 0, 1};
    p_ls.beta = in.ls.beta.cols(perm);
    p_book.psi = in.book.psi.cols(perm);
    const LmmseBank p_bank = build_lmmse_bank(p_ls, p_book, in.budget.rho_p);
    CHECK(arma::approx_equal(p_bank.gamma, in.bank.gamma.cols(perm), "reldiff", 1e-12));
}

TEST_CASE("draw statistics recover beta, gamma, and LMMSE orthogonality") {
    const auto in = make_instance(4, 3, 4, 61);
    const arma::uword n = 100000;
    std::vector<ComplexMoments> mg(12), mhat(12), mprod(12);
    for (std::uint64_t s = 0; s < n; s++) {
        const ChannelDraw d = draw_channel(in.ls, in.book, in.bank, in.budget.rho_p, s);
        for (arma::uword m = 0; m < 4; m++)
            for (arma::uword k = 0; k < 3; k++) {
                mg[m * 3 + k].add(d.g(m, k));
                mhat[m * 3 + k].add(d.g_hat(m, k));
                mprod[m * 3 + k].add(d.g_hat(m, k) * std::conj(d.g_tilde(m, k)));
            }
    }
    for (arma::uword m = 0; m < 4; m++) {
        for (arma::uword k = 0; k < 3; k++) {
            const auto i = m * 3 + k;
            CHECK(mg[i].variance() == doctest::Approx(in.ls.beta(m, k)).epsilon(0.02));
            CHECK(mhat[i].variance() == doctest::Approx(in.bank.gamma(m, k)).epsilon(0.02));
            // estimate/error orthogonality within 4 standard errors
            CHECK(std::abs(mprod[i].mean()) < 4.0 * mprod[i].mean_std_error());
        }
    }
}

TEST_CASE("decomposition identity and determinism of draws") {
    const auto in = make_instance(3, 2, 3, 71);
    const ChannelDraw a = draw_channel(in.ls, in.book, in.bank, in.budget.rho_p, 9);
    const ChannelDraw b = draw_channel(in.ls, in.book, in.bank, in.budget.rho_p, 9);
    const ChannelDraw c = draw_channel(in.ls, in.book, in.bank, in.budget.rho_p, 10);
    CHECK(arma::norm(a.g - (a.g_hat + a.g_tilde), "fro") == 0.0);  // exact by construction
    CHECK(arma::approx_equal(a.g, b.g, "absdiff", 0.0));
    CHECK(!arma::approx_equal(a.g, c.g, "absdiff", 1e-12));
}

TEST_CASE("suboptimal bank matches the analytic column form") {
    const auto in = make_instance(4, 3, 5, 81);
    const LmmseBank sub = build_suboptimal_bank(in.ls, in.book, in.budget.rho_p);
    const double trp = sub.tau_rho_p;
    for (arma::uword m = 0; m < 4; m++)
        for (arma::uword k = 0; k < 3; k++) {
            const double b = in.ls.beta(m, k);
            const arma::cx_vec expected =
                (std::sqrt(trp) * b / (trp * b + 1.0)) * in.book.psi.col(k);
            CHECK(arma::norm(sub.a_ops[m].col(k) - expected) < 1e-12);
            CHECK(sub.gamma(m, k) == doctest::Approx(trp * b * b / (trp * b + 1.0)).epsilon(1e-12));
        }
}
