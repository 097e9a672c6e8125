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

#include "cfmimo/pilots.hpp"
#include "cfmimo/stats.hpp"

using namespace cfmimo;
using namespace cfmimo::pilots;

TEST_CASE("random pilots have unit-norm columns") {
    const PilotBook b = random_pilot_book(60, 40, 11);
    for (arma::uword k = 0; k < 40; k++)
        CHECK(arma::norm(b.psi.col(k)) == doctest::Approx(1.0).epsilon(1e-12));
    const PilotBook c = random_pilot_book(60, 40, 11);
    CHECK(arma::approx_equal(b.psi, c.psi, "absdiff", 0.0));
}

TEST_CASE("tau = 1 pilots are fully correlated unit scalars") {
    const PilotBook b = random_pilot_book(1, 2, 3);
    CHECK(std::abs(b.psi(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(arma::cdot(b.psi.col(0), b.psi.col(1))) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mean squared pilot correlation is 1/tau") {
    const arma::uword tau = 60, K = 40;
    RealMeanVar rv;
    for (std::uint64_t s = 0; s < 60; s++) {
        const PilotBook b = random_pilot_book(tau, K, s);
        const arma::cx_mat gram = b.psi.t() * b.psi;
        for (arma::uword i = 0; i < K; i++)
            for (arma::uword j = i + 1; j < K; j++) rv.add(std::norm(gram(i, j)));
    }
    CHECK(rv.mean() == doctest::Approx(1.0 / double(tau)).epsilon(0.05));
}

TEST_CASE("orthonormal pilots") {
    SUBCASE("square book is unitary") {
        const PilotBook b = orthonormal_pilot_book(4, 4, 5);
        const arma::cx_mat g = b.psi.t() * b.psi;
        CHECK(arma::norm(g - arma::eye<arma::cx_mat>(4, 4), "fro") < 1e-12);
    }
    SUBCASE("tall book is orthonormal") {
        const PilotBook b = orthonormal_pilot_book(8, 4, 5);
        const arma::cx_mat g = b.psi.t() * b.psi;
        CHECK(arma::norm(g - arma::eye<arma::cx_mat>(4, 4), "fro") < 1e-12);
    }
    SUBCASE("tau < K is rejected") {
        CHECK_THROWS_AS(orthonormal_pilot_book(3, 4, 5), std::invalid_argument);
    }
}

TEST_CASE("gram diagonal is one for both kinds") {
    for (const auto& b :
         {random_pilot_book(12, 7, 2), orthonormal_pilot_book(12, 7, 2)}) {
        const arma::cx_mat g = b.psi.t() * b.psi;
        for (arma::uword k = 0; k < 7; k++)
            CHECK(std::abs(g(k, k) - 1.0) < 1e-12);
    }
}
